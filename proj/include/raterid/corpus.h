#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace raterid {

using UserId = std::int64_t;
using MovieId = std::int64_t;
using HouseholdId = std::int64_t;
// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr double kMinRating = 0.0;
inline constexpr double kMaxRating = 100.0;
inline constexpr int kDaysPerWeek = 7;
inline constexpr int kHoursPerDay = 24;
inline constexpr Timestamp kSecondsPerDay = 86400;

// One training observation (i, j, M_ij, t_ij).
struct RatingEvent {
  UserId user = 0;
  MovieId movie = 0;
  double rating = 0.0;
  Timestamp timestamp = 0;

  bool operator==(const RatingEvent&) const = default;
};

// A household-level observation (H, j, M_Hj, t_Hj). true_user is known only
// for held-out or synthetic data.
struct TestEvent {
  HouseholdId household = 0;
  MovieId movie = 0;
  double rating = 0.0;
  Timestamp timestamp = 0;
  std::optional<UserId> true_user;

  bool operator==(const TestEvent&) const = default;
};

struct Household {
  HouseholdId id = 0;
  // Ordered; members.front() is the designated first member in ROC sweeps.
  std::vector<UserId> members;

  std::size_t size() const { return members.size(); }
  bool contains(UserId user) const;
  // Index of user in members, or -1.
  int position(UserId user) const;

  bool operator==(const Household&) const = default;
};

using HouseholdMap = std::map<HouseholdId, Household>;

struct Dataset {
  std::vector<RatingEvent> train;
  HouseholdMap households;
  std::vector<TestEvent> test;
  // Index-space sizes: every user id is < user_count, every movie id (train
  // or test) is < movie_count.
  std::size_t user_count = 0;
  std::size_t movie_count = 0;

  bool operator==(const Dataset&) const = default;
};

// Builds a dataset, computing the index-space sizes, and validates it.
Dataset make_dataset(std::vector<RatingEvent> train, HouseholdMap households,
                     std::vector<TestEvent> test);

// Throws if an invariant is broken: duplicate (user, movie) in train, a user
// in two households, a test event of an unknown household, or a true_user
// that is not a member of the event's household.
void validate(const Dataset& dataset);

// user -> household lookup.
std::map<UserId, HouseholdId> household_of_users(const HouseholdMap& households);

// --- File formats -----------------------------------------------------------
//
// Ratings: "user movie rating timestamp" per line.
// Households: "household member1 ... memberL" with 2 <= L <= 4.
// Test: "household movie rating timestamp [true_user]".
// Fields are separated by tabs, commas or blanks (detected per file from the
// first data line). Empty lines and lines starting with '#' are skipped.

std::vector<RatingEvent> parse_ratings(std::istream& in,
                                       const std::string& source = "<stream>");
std::vector<RatingEvent> parse_ratings(const std::filesystem::path& path);

HouseholdMap parse_households(std::istream& in,
                              const std::string& source = "<stream>");
HouseholdMap parse_households(const std::filesystem::path& path);

std::vector<TestEvent> parse_test(std::istream& in,
                                  const std::string& source = "<stream>");
std::vector<TestEvent> parse_test(const std::filesystem::path& path);

// Tab-separated writers; ratings are written in shortest round-trip form so
// that parse(write(x)) == x.
void write_ratings(std::ostream& out, std::span<const RatingEvent> events);
void write_households(std::ostream& out, const HouseholdMap& households);
void write_test(std::ostream& out, std::span<const TestEvent> events);

// Loads and validates train + households (+ test when the path is non-empty).
Dataset load_dataset(const std::filesystem::path& train,
                     const std::filesystem::path& households,
                     const std::filesystem::path& test = {});

// --- Time -------------------------------------------------------------------

// Civil weekday in UTC, 0 = Sunday ... 6 = Saturday.
int weekday_of(Timestamp timestamp);

// Hour of day in UTC, 0..23.
int hour_of(Timestamp timestamp);

enum class BinningKind {
  kDate,     // T equal-duration bins over [origin, origin + span]
  kWeekday,  // 7 bins keyed by weekday; origin/span unused
};

struct Binning {
  int bin_count = 1;
  Timestamp origin = 0;
  Timestamp span = 1;
  BinningKind kind = BinningKind::kDate;

  // Date binning over [min, max] timestamp of the events (span >= 1).
  static Binning from_events(std::span<const RatingEvent> events,
                             int bin_count);
  static Binning weekday();

  bool operator==(const Binning&) const = default;
};

// 1 + floor(T (t - origin) / span), clamped to T at the right edge.
// Throws RangeError when t lies outside [origin, origin + span].
int bin_of(Timestamp timestamp, const Binning& binning);

// Same, but timestamps outside the range map to the nearest edge bin.
int bin_of_clamped(Timestamp timestamp, const Binning& binning);

// --- Cross-validation -------------------------------------------------------

inline constexpr double kDefaultHoldoutFraction = 0.04;

// Random-subsampling split. Households are visited in id order, members in
// household order; each of a member's training events moves to the test set
// with probability `fraction`. Moved events carry true_user. Events of users
// outside households always stay in train. The returned dataset keeps the
// household map and index-space sizes of the input.
Dataset cv_split(const Dataset& dataset, double fraction, std::uint64_t seed);

// --- Synthetic data ---------------------------------------------------------

struct SynthConfig {
  std::size_t households_size2 = 0;
  std::size_t households_size3 = 0;
  std::size_t households_size4 = 0;
  std::size_t events_per_user = 0;
  // 0: housemates view on disjoint weekdays (and hours); 1: identical habits.
  double overlap = 0.0;
  std::size_t rank = 3;
  double noise_sigma = 10.0;
  std::uint64_t seed = 1;
  // Optional keys.
  std::size_t movies = 0;  // 0 -> max(100, 2 * events_per_user)
  double test_fraction = kDefaultHoldoutFraction;
  double bias_sigma = 12.0;
  double taste_scale = 15.0;
  // Off-habit share of hour draws; defaults to overlap.
  std::optional<double> hour_overlap;
  // Sharpness of each member's hour-of-day bump around its peak.
  double hour_concentration = 8.0;
  // How strongly taste drives which movies a user rates; 0 picks uniformly.
  double choice_strength = 1.0;

  void validate() const;
};

// Flat key=value file; '#' starts a comment. The eight keys
// households_size2, households_size3, households_size4, events_per_user,
// overlap, rank, noise_sigma and seed are required; movies, test_fraction,
// bias_sigma, taste_scale, hour_overlap, hour_concentration and
// choice_strength are optional. Throws ConfigError.
SynthConfig parse_synth_config(std::istream& in);
SynthConfig parse_synth_config(const std::filesystem::path& path);

// Generates households with planted ground truth. Ratings are
// round(<u_i, v_j> + z_i + noise) clipped to [0, 100]. Each member gets its
// own block of weekdays; a member's weekday distribution is
// (1 - overlap) * uniform(own days) + overlap * uniform(all days), so two
// housemates are exactly 1 - overlap apart in total variation. Hours follow
// (1 - w) * a von Mises bump + w * uniform (w = hour_overlap), with the members'
// peaks spread evenly around the clock. Weekday and hour draws use
// systematic sampling, keeping empirical profiles within 1/events_per_user
// of the planted ones. Movies are distinct per user, favouring those the
// user likes (choice_strength). Each member also gets a random activity
// level per month. A test slice (test_fraction, per member) is held out
// with true_user set.
Dataset synth_generate(const SynthConfig& config, std::uint64_t seed);

}  // namespace raterid
