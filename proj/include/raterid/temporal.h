#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "raterid/corpus.h"

namespace raterid {

using WeekdayWeights = std::array<double, kDaysPerWeek>;

// Empirical weekday distribution p_i(d) of one user's rating events.
struct DayProfile {
  UserId user = 0;
  WeekdayWeights weights{};
};

// Throws UndefinedProfileError when the user has no events in train.
DayProfile day_profile(std::span<const RatingEvent> train, UserId user);

// 1/2 sum_d |p(d) - q(d)|.
double total_variation(const WeekdayWeights& p, const WeekdayWeights& q);

// delta_H: mean total variation over ordered pairs of distinct members.
double household_tv(std::span<const RatingEvent> train,
                    const Household& household);

enum class PriorMode { kUniform, kBin, kDay };

// Counts behind q(i), q(i | b) and q(i | d) for one household, with additive
// smoothing: q = (member count + eps) / (household count + eps |H|).
// Member positions follow household.members.
struct TemporalPriors {
  HouseholdId household = 0;
  std::vector<UserId> members;
  double epsilon = 0.0;
  Binning binning;
  std::vector<double> member_counts;                // [member]
  std::vector<std::vector<double>> bin_counts;      // [bin][member]
  std::vector<std::vector<double>> day_counts;      // [day][member]

  std::size_t size() const { return members.size(); }

  // q(i) for every member. Uniform if the household has no events and eps=0.
  std::vector<double> prior() const;
  // q(i | b) for a 1-based bin; nullopt when undefined (no events, eps = 0).
  std::optional<std::vector<double>> given_bin(int bin) const;
  // q(i | d) for a weekday 0..6; nullopt when undefined.
  std::optional<std::vector<double>> given_day(int day) const;

  // The conditional selected by mode for an event time. Undefined
  // conditionals fall back to q(i) (with a logged warning).
  std::vector<double> conditional(PriorMode mode, Timestamp timestamp) const;
};

inline constexpr double kDefaultSmoothing = 0.5;

TemporalPriors fit_priors(std::span<const RatingEvent> train,
                          const Household& household, double epsilon,
                          const Binning& binning);

// All households in one pass over train.
std::map<HouseholdId, TemporalPriors> fit_priors_all(
    std::span<const RatingEvent> train, const HouseholdMap& households,
    double epsilon, const Binning& binning);

// Index of the largest value; ties go to the smaller user id.
std::size_t argmax_member(std::span<const double> scores,
                          std::span<const UserId> members);

// argmax over members of the selected conditional; never reads the rating.
UserId classify_prior(const TemporalPriors& priors, PriorMode mode,
                      const TestEvent& event);

// Per household and member: counts of training events by weekday.
// Columns: household, member, sun, mon, tue, wed, thu, fri, sat.
void write_weekday_histogram(std::ostream& out,
                             std::span<const RatingEvent> train,
                             const HouseholdMap& households);

// Per-household delta_H followed by a 10-bucket histogram of its
// distribution. Households with a member lacking events report NA.
void write_tv_histogram(std::ostream& out, std::span<const RatingEvent> train,
                        const HouseholdMap& households);

}  // namespace raterid
