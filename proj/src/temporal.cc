#include "raterid/temporal.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "raterid/errors.h"
#include "raterid/log.h"
#include "raterid/text_io.h"

namespace raterid {

namespace {

std::array<std::size_t, kDaysPerWeek> weekday_counts(
    std::span<const RatingEvent> train, UserId user) {
  std::array<std::size_t, kDaysPerWeek> counts{};
  for (const auto& e : train) {
    if (e.user == user) ++counts[weekday_of(e.timestamp)];
  }
  return counts;
}

DayProfile profile_from_counts(UserId user,
                               const std::array<std::size_t, kDaysPerWeek>& c) {
  std::size_t total = 0;
  for (auto v : c) total += v;
  if (total == 0) {
    throw UndefinedProfileError("user " + std::to_string(user) +
                                " has no training events");
  }
  DayProfile profile;
  profile.user = user;
  for (int d = 0; d < kDaysPerWeek; ++d) {
    profile.weights[d] =
        static_cast<double>(c[d]) / static_cast<double>(total);
  }
  return profile;
}

double mean_pairwise_tv(const std::vector<DayProfile>& profiles) {
  const std::size_t n = profiles.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) sum += total_variation(profiles[a].weights, profiles[b].weights);
    }
  }
  return sum / static_cast<double>(n * (n - 1));
}

}  // namespace

DayProfile day_profile(std::span<const RatingEvent> train, UserId user) {
  return profile_from_counts(user, weekday_counts(train, user));
}

double total_variation(const WeekdayWeights& p, const WeekdayWeights& q) {
  // 1 - sum min(p, q): equal to half the L1 distance for distributions, and
  // exactly 1 when the supports are disjoint.
  double overlap = 0.0;
  for (int d = 0; d < kDaysPerWeek; ++d) overlap += std::min(p[d], q[d]);
  return std::max(0.0, 1.0 - overlap);
}

double household_tv(std::span<const RatingEvent> train,
                    const Household& household) {
  std::vector<DayProfile> profiles;
  for (UserId member : household.members) {
    profiles.push_back(day_profile(train, member));
  }
  return mean_pairwise_tv(profiles);
}

// --- Priors -------------------------------------------------------------------

namespace {

std::vector<double> smoothed(const std::vector<double>& counts, double eps) {
  double total = 0.0;
  for (double c : counts) total += c;
  const double denominator = total + eps * static_cast<double>(counts.size());
  std::vector<double> q(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    q[k] = (counts[k] + eps) / denominator;
  }
  return q;
}

bool defined(const std::vector<double>& counts, double eps) {
  if (eps > 0.0) return true;
  for (double c : counts) {
    if (c > 0.0) return true;
  }
  return false;
}

TemporalPriors empty_priors(const Household& household, double epsilon,
                            const Binning& binning) {
  if (!(epsilon >= 0.0)) throw ConfigError("smoothing must be non-negative");
  TemporalPriors priors;
  priors.household = household.id;
  priors.members = household.members;
  priors.epsilon = epsilon;
  priors.binning = binning;
  const std::size_t size = household.size();
  priors.member_counts.assign(size, 0.0);
  priors.bin_counts.assign(binning.bin_count, std::vector<double>(size, 0.0));
  priors.day_counts.assign(kDaysPerWeek, std::vector<double>(size, 0.0));
  return priors;
}

void count_event(TemporalPriors& priors, std::size_t position,
                 Timestamp timestamp) {
  priors.member_counts[position] += 1.0;
  priors.bin_counts[bin_of_clamped(timestamp, priors.binning) - 1][position] +=
      1.0;
  priors.day_counts[weekday_of(timestamp)][position] += 1.0;
}

}  // namespace

std::vector<double> TemporalPriors::prior() const {
  if (!defined(member_counts, epsilon)) {
    return std::vector<double>(size(), 1.0 / static_cast<double>(size()));
  }
  return smoothed(member_counts, epsilon);
}

std::optional<std::vector<double>> TemporalPriors::given_bin(int bin) const {
  if (bin < 1 || bin > static_cast<int>(bin_counts.size())) {
    throw RangeError("bin " + std::to_string(bin) + " outside the priors");
  }
  const auto& counts = bin_counts[bin - 1];
  if (!defined(counts, epsilon)) return std::nullopt;
  return smoothed(counts, epsilon);
}

std::optional<std::vector<double>> TemporalPriors::given_day(int day) const {
  if (day < 0 || day >= kDaysPerWeek) {
    throw RangeError("weekday " + std::to_string(day) + " outside 0..6");
  }
  const auto& counts = day_counts[day];
  if (!defined(counts, epsilon)) return std::nullopt;
  return smoothed(counts, epsilon);
}

std::vector<double> TemporalPriors::conditional(PriorMode mode,
                                                Timestamp timestamp) const {
  std::optional<std::vector<double>> q;
  switch (mode) {
    case PriorMode::kUniform:
      return prior();
    case PriorMode::kBin:
      q = given_bin(bin_of_clamped(timestamp, binning));
      break;
    case PriorMode::kDay:
      q = given_day(weekday_of(timestamp));
      break;
  }
  if (!q) {
    log::warn("household " + std::to_string(household) +
              ": undefined temporal conditional, falling back to q(i)");
    return prior();
  }
  return *q;
}

TemporalPriors fit_priors(std::span<const RatingEvent> train,
                          const Household& household, double epsilon,
                          const Binning& binning) {
  TemporalPriors priors = empty_priors(household, epsilon, binning);
  for (const auto& e : train) {
    const int position = household.position(e.user);
    if (position >= 0) {
      count_event(priors, static_cast<std::size_t>(position), e.timestamp);
    }
  }
  return priors;
}

std::map<HouseholdId, TemporalPriors> fit_priors_all(
    std::span<const RatingEvent> train, const HouseholdMap& households,
    double epsilon, const Binning& binning) {
  std::map<HouseholdId, TemporalPriors> all;
  for (const auto& [id, household] : households) {
    all.emplace(id, empty_priors(household, epsilon, binning));
  }
  const auto lookup = household_of_users(households);
  for (const auto& e : train) {
    auto it = lookup.find(e.user);
    if (it == lookup.end()) continue;
    TemporalPriors& priors = all.at(it->second);
    const int position = households.at(it->second).position(e.user);
    count_event(priors, static_cast<std::size_t>(position), e.timestamp);
  }
  return all;
}

std::size_t argmax_member(std::span<const double> scores,
                          std::span<const UserId> members) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best] ||
        (scores[k] == scores[best] && members[k] < members[best])) {
      best = k;
    }
  }
  return best;
}

UserId classify_prior(const TemporalPriors& priors, PriorMode mode,
                      const TestEvent& event) {
  const auto q = priors.conditional(mode, event.timestamp);
  return priors.members[argmax_member(q, priors.members)];
}

// --- Histogram exports --------------------------------------------------------

void write_weekday_histogram(std::ostream& out,
                             std::span<const RatingEvent> train,
                             const HouseholdMap& households) {
  std::map<UserId, std::array<std::size_t, kDaysPerWeek>> counts;
  for (const auto& [id, household] : households) {
    for (UserId member : household.members) counts[member] = {};
  }
  for (const auto& e : train) {
    auto it = counts.find(e.user);
    if (it != counts.end()) ++it->second[weekday_of(e.timestamp)];
  }
  out << "household\tmember\tsun\tmon\ttue\twed\tthu\tfri\tsat\n";
  for (const auto& [id, household] : households) {
    for (UserId member : household.members) {
      out << id << '\t' << member;
      for (auto c : counts[member]) out << '\t' << c;
      out << '\n';
    }
  }
}

void write_tv_histogram(std::ostream& out, std::span<const RatingEvent> train,
                        const HouseholdMap& households) {
  std::map<UserId, std::array<std::size_t, kDaysPerWeek>> counts;
  for (const auto& [id, household] : households) {
    for (UserId member : household.members) counts[member] = {};
  }
  for (const auto& e : train) {
    auto it = counts.find(e.user);
    if (it != counts.end()) ++it->second[weekday_of(e.timestamp)];
  }
  constexpr int kBuckets = 10;
  std::array<std::size_t, kBuckets> buckets{};
  out << "household\tsize\tdelta_h\n";
  for (const auto& [id, household] : households) {
    out << id << '\t' << household.size() << '\t';
    try {
      std::vector<DayProfile> profiles;
      for (UserId member : household.members) {
        profiles.push_back(profile_from_counts(member, counts[member]));
      }
      const double tv = mean_pairwise_tv(profiles);
      out << text::format_fixed(tv, 6) << '\n';
      const int bucket = std::min(kBuckets - 1, static_cast<int>(tv * kBuckets));
      ++buckets[bucket];
    } catch (const UndefinedProfileError&) {
      out << "NA\n";
    }
  }
  out << "\nbucket_low\tbucket_high\thouseholds\n";
  for (int k = 0; k < kBuckets; ++k) {
    out << text::format_fixed(static_cast<double>(k) / kBuckets, 1) << '\t'
        << text::format_fixed(static_cast<double>(k + 1) / kBuckets, 1) << '\t'
        << buckets[k] << '\n';
  }
}

}  // namespace raterid
