#include "raterid/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "raterid/errors.h"
#include "raterid/rng.h"
#include "raterid/text_io.h"

namespace raterid {

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& message)
    : Error(source + ":" + std::to_string(line) + ": " + message),
      line_(line) {}

bool Household::contains(UserId user) const {
  return std::find(members.begin(), members.end(), user) != members.end();
}

int Household::position(UserId user) const {
  auto it = std::find(members.begin(), members.end(), user);
  return it == members.end() ? -1 : static_cast<int>(it - members.begin());
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

// Iterates the data lines of a stream, detecting the delimiter on the first
// one and handing (line number, fields) to the callback.
template <typename Callback>
void for_each_record(std::istream& in, Callback&& callback) {
  std::string line;
  std::size_t line_number = 0;
  std::optional<text::Delimiter> delimiter;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::is_blank_or_comment(line)) continue;
    if (!delimiter) delimiter = text::detect_delimiter(line);
    callback(line_number, text::split_fields(line, *delimiter));
  }
}

std::int64_t require_int(std::string_view field, const std::string& source,
                         std::size_t line, const char* what) {
  auto value = text::parse_int(field);
  if (!value) {
    throw ParseError(source, line,
                     std::string("invalid ") + what + " '" +
                         std::string(field) + "'");
  }
  return *value;
}

double require_rating(std::string_view field, const std::string& source,
                      std::size_t line) {
  auto value = text::parse_double(field);
  if (!value || !std::isfinite(*value)) {
    throw ParseError(source, line,
                     "invalid rating '" + std::string(field) + "'");
  }
  if (*value < kMinRating || *value > kMaxRating) {
    throw RangeError(source + ":" + std::to_string(line) + ": rating " +
                     std::string(field) + " outside [0, 100]");
  }
  return *value;
}

Timestamp require_timestamp(std::string_view field, const std::string& source,
                            std::size_t line) {
  Timestamp t = require_int(field, source, line, "timestamp");
  if (t < 0) {
    throw RangeError(source + ":" + std::to_string(line) +
                     ": negative timestamp");
  }
  return t;
}

std::int64_t require_id(std::string_view field, const std::string& source,
                        std::size_t line, const char* what) {
  std::int64_t id = require_int(field, source, line, what);
  if (id < 0) {
    throw ParseError(source, line, std::string("negative ") + what);
  }
  return id;
}

}  // namespace

std::vector<RatingEvent> parse_ratings(std::istream& in,
                                       const std::string& source) {
  std::vector<RatingEvent> events;
  for_each_record(in, [&](std::size_t line, const auto& fields) {
    if (fields.size() != 4) {
      throw ParseError(source, line,
                       "expected 4 fields, found " +
                           std::to_string(fields.size()));
    }
    RatingEvent event;
    event.user = require_id(fields[0], source, line, "user id");
    event.movie = require_id(fields[1], source, line, "movie id");
    event.rating = require_rating(fields[2], source, line);
    event.timestamp = require_timestamp(fields[3], source, line);
    events.push_back(event);
  });
  return events;
}

std::vector<RatingEvent> parse_ratings(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_ratings(in, path.string());
}

HouseholdMap parse_households(std::istream& in, const std::string& source) {
  HouseholdMap households;
  for_each_record(in, [&](std::size_t line, const auto& fields) {
    if (fields.size() < 3 || fields.size() > 5) {
      throw StructureError(source + ":" + std::to_string(line) +
                           ": a household needs 2 to 4 members, found " +
                           std::to_string(fields.size() - 1));
    }
    Household household;
    household.id = require_id(fields[0], source, line, "household id");
    for (std::size_t k = 1; k < fields.size(); ++k) {
      UserId member = require_id(fields[k], source, line, "member id");
      if (household.contains(member)) {
        throw StructureError(source + ":" + std::to_string(line) +
                             ": member " + std::to_string(member) +
                             " listed twice");
      }
      household.members.push_back(member);
    }
    if (households.count(household.id)) {
      throw DuplicateError(source + ":" + std::to_string(line) +
                           ": duplicate household id " +
                           std::to_string(household.id));
    }
    households.emplace(household.id, std::move(household));
  });
  return households;
}

HouseholdMap parse_households(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_households(in, path.string());
}

std::vector<TestEvent> parse_test(std::istream& in, const std::string& source) {
  std::vector<TestEvent> events;
  for_each_record(in, [&](std::size_t line, const auto& fields) {
    if (fields.size() != 4 && fields.size() != 5) {
      throw ParseError(source, line,
                       "expected 4 or 5 fields, found " +
                           std::to_string(fields.size()));
    }
    TestEvent event;
    event.household = require_id(fields[0], source, line, "household id");
    event.movie = require_id(fields[1], source, line, "movie id");
    event.rating = require_rating(fields[2], source, line);
    event.timestamp = require_timestamp(fields[3], source, line);
    if (fields.size() == 5 && fields[4] != "NA") {
      event.true_user = require_id(fields[4], source, line, "user id");
    }
    events.push_back(event);
  });
  return events;
}

std::vector<TestEvent> parse_test(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_test(in, path.string());
}

void write_ratings(std::ostream& out, std::span<const RatingEvent> events) {
  for (const auto& e : events) {
    out << e.user << '\t' << e.movie << '\t' << text::format_exact(e.rating)
        << '\t' << e.timestamp << '\n';
  }
}

void write_households(std::ostream& out, const HouseholdMap& households) {
  for (const auto& [id, household] : households) {
    out << id;
    for (UserId member : household.members) out << '\t' << member;
    out << '\n';
  }
}

void write_test(std::ostream& out, std::span<const TestEvent> events) {
  for (const auto& e : events) {
    out << e.household << '\t' << e.movie << '\t'
        << text::format_exact(e.rating) << '\t' << e.timestamp;
    if (e.true_user) out << '\t' << *e.true_user;
    out << '\n';
  }
}

std::map<UserId, HouseholdId> household_of_users(
    const HouseholdMap& households) {
  std::map<UserId, HouseholdId> lookup;
  for (const auto& [id, household] : households) {
    for (UserId member : household.members) lookup.emplace(member, id);
  }
  return lookup;
}

void validate(const Dataset& dataset) {
  std::set<std::pair<UserId, MovieId>> seen;
  for (const auto& e : dataset.train) {
    if (e.user < 0 || static_cast<std::size_t>(e.user) >= dataset.user_count ||
        e.movie < 0 ||
        static_cast<std::size_t>(e.movie) >= dataset.movie_count) {
      throw RangeError("train event outside the dataset index space");
    }
    if (!seen.emplace(e.user, e.movie).second) {
      throw DuplicateError("user " + std::to_string(e.user) +
                           " rated movie " + std::to_string(e.movie) +
                           " twice");
    }
  }
  std::set<UserId> assigned;
  for (const auto& [id, household] : dataset.households) {
    if (household.id != id) {
      throw StructureError("household key/id mismatch for " +
                           std::to_string(id));
    }
    if (household.size() < 2 || household.size() > 4) {
      throw StructureError("household " + std::to_string(id) +
                           " must have 2 to 4 members");
    }
    for (UserId member : household.members) {
      if (!assigned.insert(member).second) {
        throw StructureError("user " + std::to_string(member) +
                             " belongs to more than one household");
      }
    }
  }
  for (const auto& e : dataset.test) {
    auto it = dataset.households.find(e.household);
    if (it == dataset.households.end()) {
      throw StructureError("test event refers to unknown household " +
                           std::to_string(e.household));
    }
    if (e.true_user && !it->second.contains(*e.true_user)) {
      throw StructureError("true user " + std::to_string(*e.true_user) +
                           " is not a member of household " +
                           std::to_string(e.household));
    }
  }
}

Dataset make_dataset(std::vector<RatingEvent> train, HouseholdMap households,
                     std::vector<TestEvent> test) {
  Dataset dataset;
  std::int64_t max_user = -1;
  std::int64_t max_movie = -1;
  for (const auto& e : train) {
    max_user = std::max(max_user, e.user);
    max_movie = std::max(max_movie, e.movie);
  }
  for (const auto& [id, household] : households) {
    for (UserId member : household.members) {
      max_user = std::max(max_user, member);
    }
  }
  for (const auto& e : test) max_movie = std::max(max_movie, e.movie);
  dataset.train = std::move(train);
  dataset.households = std::move(households);
  dataset.test = std::move(test);
  dataset.user_count = static_cast<std::size_t>(max_user + 1);
  dataset.movie_count = static_cast<std::size_t>(max_movie + 1);
  validate(dataset);
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& train,
                     const std::filesystem::path& households,
                     const std::filesystem::path& test) {
  std::vector<TestEvent> test_events;
  if (!test.empty()) test_events = parse_test(test);
  return make_dataset(parse_ratings(train), parse_households(households),
                      std::move(test_events));
}

// --- Time -------------------------------------------------------------------

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

}  // namespace

int weekday_of(Timestamp timestamp) {
  // 1970-01-01 was a Thursday (index 4).
  const std::int64_t days = floor_div(timestamp, kSecondsPerDay);
  return static_cast<int>(floor_mod(days + 4, kDaysPerWeek));
}

int hour_of(Timestamp timestamp) {
  return static_cast<int>(floor_mod(timestamp, kSecondsPerDay) / 3600);
}

Binning Binning::from_events(std::span<const RatingEvent> events,
                             int bin_count) {
  if (bin_count < 1) throw ConfigError("bin count must be positive");
  Binning binning;
  binning.bin_count = bin_count;
  if (events.empty()) return binning;
  auto [lo, hi] = std::minmax_element(
      events.begin(), events.end(),
      [](const RatingEvent& a, const RatingEvent& b) {
        return a.timestamp < b.timestamp;
      });
  binning.origin = lo->timestamp;
  binning.span = std::max<Timestamp>(1, hi->timestamp - lo->timestamp);
  return binning;
}

Binning Binning::weekday() {
  Binning binning;
  binning.bin_count = kDaysPerWeek;
  binning.kind = BinningKind::kWeekday;
  return binning;
}

int bin_of_clamped(Timestamp timestamp, const Binning& binning) {
  if (binning.kind == BinningKind::kWeekday) return weekday_of(timestamp) + 1;
  if (timestamp <= binning.origin) return 1;
  const std::int64_t offset = timestamp - binning.origin;
  if (offset >= binning.span) return binning.bin_count;
  // T * offset fits in 64 bits for any realistic T and epoch range.
  const std::int64_t bin = 1 + (binning.bin_count * offset) / binning.span;
  return static_cast<int>(std::min<std::int64_t>(bin, binning.bin_count));
}

int bin_of(Timestamp timestamp, const Binning& binning) {
  if (binning.kind == BinningKind::kDate &&
      (timestamp < binning.origin ||
       timestamp - binning.origin > binning.span)) {
    throw RangeError("timestamp " + std::to_string(timestamp) +
                     " outside the binning range");
  }
  return bin_of_clamped(timestamp, binning);
}

// --- Cross-validation -------------------------------------------------------

Dataset cv_split(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("holdout fraction must lie in [0, 1]");
  }
  std::map<UserId, std::vector<std::size_t>> events_of;
  for (const auto& [id, household] : dataset.households) {
    for (UserId member : household.members) events_of[member];
  }
  for (std::size_t k = 0; k < dataset.train.size(); ++k) {
    auto it = events_of.find(dataset.train[k].user);
    if (it != events_of.end()) it->second.push_back(k);
  }

  Rng rng(seed);
  std::vector<bool> moved(dataset.train.size(), false);
  Dataset split;
  for (const auto& [id, household] : dataset.households) {
    for (UserId member : household.members) {
      for (std::size_t k : events_of[member]) {
        if (!rng.bernoulli(fraction)) continue;
        moved[k] = true;
        const auto& e = dataset.train[k];
        split.test.push_back(
            TestEvent{id, e.movie, e.rating, e.timestamp, member});
      }
    }
  }
  split.train.reserve(dataset.train.size() - split.test.size());
  for (std::size_t k = 0; k < dataset.train.size(); ++k) {
    if (!moved[k]) split.train.push_back(dataset.train[k]);
  }
  split.households = dataset.households;
  split.user_count = dataset.user_count;
  split.movie_count = dataset.movie_count;
  return split;
}

// --- Synthetic data ---------------------------------------------------------

void SynthConfig::validate() const {
  if (events_per_user == 0) throw ConfigError("events_per_user must be >= 1");
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw ConfigError("overlap must lie in [0, 1]");
  }
  if (rank == 0) throw ConfigError("rank must be >= 1");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  if (!(bias_sigma >= 0.0)) throw ConfigError("bias_sigma must be >= 0");
  if (!(taste_scale >= 0.0)) throw ConfigError("taste_scale must be >= 0");
  if (!(hour_concentration >= 0.0)) {
    throw ConfigError("hour_concentration must be >= 0");
  }
  if (hour_overlap && !(*hour_overlap >= 0.0 && *hour_overlap <= 1.0)) {
    throw ConfigError("hour_overlap must lie in [0, 1]");
  }
  if (!std::isfinite(choice_strength)) {
    throw ConfigError("choice_strength must be finite");
  }
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in [0, 1)");
  }
  if (movies != 0 && movies < events_per_user) {
    throw ConfigError("movies must be >= events_per_user");
  }
}

namespace {

std::size_t parse_count(const std::string& key, const std::string& value) {
  auto parsed = text::parse_int(value);
  if (!parsed) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  if (*parsed < 0) throw ConfigError(key + " must be non-negative");
  return static_cast<std::size_t>(*parsed);
}

double parse_real(const std::string& key, const std::string& value) {
  auto parsed = text::parse_double(value);
  if (!parsed || !std::isfinite(*parsed)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return *parsed;
}

}  // namespace

SynthConfig parse_synth_config(std::istream& in) {
  SynthConfig config;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (text::trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected key=value");
    }
    std::string key(text::trim(std::string_view(line).substr(0, eq)));
    std::string value(text::trim(std::string_view(line).substr(eq + 1)));
    if (!seen.insert(key).second) throw ConfigError("duplicate key " + key);
    if (key == "households_size2") {
      config.households_size2 = parse_count(key, value);
    } else if (key == "households_size3") {
      config.households_size3 = parse_count(key, value);
    } else if (key == "households_size4") {
      config.households_size4 = parse_count(key, value);
    } else if (key == "events_per_user") {
      config.events_per_user = parse_count(key, value);
    } else if (key == "overlap") {
      config.overlap = parse_real(key, value);
    } else if (key == "rank") {
      config.rank = parse_count(key, value);
    } else if (key == "noise_sigma") {
      config.noise_sigma = parse_real(key, value);
    } else if (key == "seed") {
      config.seed = parse_count(key, value);
    } else if (key == "movies") {
      config.movies = parse_count(key, value);
    } else if (key == "test_fraction") {
      config.test_fraction = parse_real(key, value);
    } else if (key == "bias_sigma") {
      config.bias_sigma = parse_real(key, value);
    } else if (key == "taste_scale") {
      config.taste_scale = parse_real(key, value);
    } else if (key == "hour_concentration") {
      config.hour_concentration = parse_real(key, value);
    } else if (key == "hour_overlap") {
      config.hour_overlap = parse_real(key, value);
    } else if (key == "choice_strength") {
      config.choice_strength = parse_real(key, value);
    } else {
      throw ConfigError("unknown key " + key);
    }
  }
  for (const char* required :
       {"households_size2", "households_size3", "households_size4",
        "events_per_user", "overlap", "rank", "noise_sigma", "seed"}) {
    if (!seen.count(required)) {
      throw ConfigError(std::string("missing key ") + required);
    }
  }
  config.validate();
  return config;
}

SynthConfig parse_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return parse_synth_config(in);
}

namespace {

// 2010-01-03 00:00:00 UTC, a Sunday.
constexpr Timestamp kSynthOrigin = 1262476800;
constexpr int kSynthWeeks = 52;
constexpr int kSynthMonths = 12;

// Systematic sampling of `count` categories from `probabilities`: one uniform
// offset, evenly spaced points through the inverse CDF, then shuffled.
std::vector<int> systematic_sample(const std::vector<double>& probabilities,
                                   std::size_t count, Rng& rng) {
  std::vector<int> draws(count);
  const double offset = rng.uniform();
  std::size_t category = 0;
  double cumulative = probabilities[0];
  for (std::size_t k = 0; k < count; ++k) {
    const double point = (static_cast<double>(k) + offset) /
                          static_cast<double>(count);
    while (point >= cumulative && category + 1 < probabilities.size()) {
      ++category;
      cumulative += probabilities[category];
    }
    draws[k] = static_cast<int>(category);
  }
  rng.shuffle(std::span<int>(draws));
  return draws;
}

// Mixture (1 - overlap) * uniform(own) + overlap * uniform(all).
std::vector<double> habit_distribution(const std::vector<int>& own,
                                       std::size_t categories,
                                       double overlap) {
  std::vector<double> p(categories, overlap / static_cast<double>(categories));
  for (int c : own) p[c] += (1.0 - overlap) / static_cast<double>(own.size());
  return p;
}

// (1 - overlap) * von Mises bump around `peak` + overlap * uniform, over the
// 24 hours of the clock.
std::vector<double> hour_distribution(double peak, double concentration,
                                      double overlap) {
  std::vector<double> bump(kHoursPerDay);
  double total = 0.0;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double angle = 2.0 * std::numbers::pi * (h - peak) / kHoursPerDay;
    bump[h] = std::exp(concentration * (std::cos(angle) - 1.0));
    total += bump[h];
  }
  std::vector<double> p(kHoursPerDay);
  for (int h = 0; h < kHoursPerDay; ++h) {
    p[h] = (1.0 - overlap) * bump[h] / total + overlap / kHoursPerDay;
  }
  return p;
}

std::size_t draw_weighted(const std::vector<double>& weights, double total,
                          Rng& rng) {
  double point = rng.uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    point -= weights[k];
    if (point < 0.0) return k;
  }
  return weights.size() - 1;
}

}  // namespace

Dataset synth_generate(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t n_movies =
      config.movies != 0 ? config.movies
                         : std::max<std::size_t>(100, 2 * config.events_per_user);
  const std::size_t rank = config.rank;
  Rng rng(seed);

  HouseholdMap households;
  HouseholdId next_household = 1;
  UserId next_user = 0;
  const std::size_t counts[3] = {config.households_size2,
                                 config.households_size3,
                                 config.households_size4};
  for (std::size_t size = 2; size <= 4; ++size) {
    for (std::size_t h = 0; h < counts[size - 2]; ++h) {
      Household household;
      household.id = next_household++;
      for (std::size_t k = 0; k < size; ++k) {
        household.members.push_back(next_user++);
      }
      households.emplace(household.id, household);
    }
  }
  const std::size_t n_users = static_cast<std::size_t>(next_user);

  // Var(<u, v>) = rank * s^4 = taste_scale^2.
  const double factor_scale =
      std::pow(config.taste_scale * config.taste_scale /
                   static_cast<double>(rank),
               0.25);
  std::vector<std::vector<double>> user_taste(n_users,
                                              std::vector<double>(rank));
  std::vector<double> user_bias(n_users);
  for (std::size_t i = 0; i < n_users; ++i) {
    for (auto& x : user_taste[i]) x = factor_scale * rng.normal();
    user_bias[i] = 50.0 + config.bias_sigma * rng.normal();
  }
  std::vector<std::vector<double>> movie_profile(n_movies,
                                                 std::vector<double>(rank));
  for (auto& profile : movie_profile) {
    for (auto& x : profile) x = factor_scale * rng.normal();
  }

  std::vector<RatingEvent> train;
  train.reserve(n_users * config.events_per_user);

  for (const auto& [id, household] : households) {
    const std::size_t size = household.size();
    std::vector<int> days(kDaysPerWeek);
    std::iota(days.begin(), days.end(), 0);
    rng.shuffle(std::span<int>(days));
    const double hour_offset = rng.uniform() * kHoursPerDay;

    for (std::size_t m = 0; m < size; ++m) {
      const UserId user = household.members[m];
      std::vector<int> own_days;
      for (std::size_t k = m; k < days.size(); k += size) {
        own_days.push_back(days[k]);
      }
      const double peak_hour =
          hour_offset + static_cast<double>(kHoursPerDay * m) /
                            static_cast<double>(size);
      std::vector<double> activity(kSynthMonths);
      for (auto& a : activity) a = 0.5 + rng.uniform();
      std::vector<double> week_weights(kSynthWeeks);
      double week_total = 0.0;
      for (int w = 0; w < kSynthWeeks; ++w) {
        week_weights[w] = activity[(kSynthMonths * w) / kSynthWeeks];
        week_total += week_weights[w];
      }

      const std::size_t n = config.events_per_user;
      auto day_draws = systematic_sample(
          habit_distribution(own_days, kDaysPerWeek, config.overlap), n, rng);
      auto hour_draws = systematic_sample(
          hour_distribution(peak_hour, config.hour_concentration,
                            config.hour_overlap.value_or(config.overlap)),
          n, rng);

      // Gumbel top-n: distinct movies drawn with weights
      // exp(choice_strength * <u, v> / taste_scale).
      std::vector<std::pair<double, MovieId>> keys(n_movies);
      for (std::size_t j = 0; j < n_movies; ++j) {
        double affinity = 0.0;
        for (std::size_t k = 0; k < rank; ++k) {
          affinity += user_taste[user][k] * movie_profile[j][k];
        }
        if (config.taste_scale > 0.0) affinity /= config.taste_scale;
        const double u = std::max(rng.uniform(), 0x1p-60);
        const double gumbel = -std::log(-std::log(u));
        keys[j] = {config.choice_strength * affinity + gumbel,
                   static_cast<MovieId>(j)};
      }
      std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n),
                        keys.end(), std::greater<>());
      for (std::size_t e = 0; e < n; ++e) {
        const MovieId movie = keys[e].second;
        const auto week = static_cast<Timestamp>(
            draw_weighted(week_weights, week_total, rng));
        const Timestamp t = kSynthOrigin +
                            (7 * week + day_draws[e]) * kSecondsPerDay +
                            static_cast<Timestamp>(hour_draws[e]) * 3600 +
                            static_cast<Timestamp>(rng.below(3600));
        double value = user_bias[user];
        for (std::size_t k = 0; k < rank; ++k) {
          value += user_taste[user][k] * movie_profile[movie][k];
        }
        value += config.noise_sigma * rng.normal();
        const double rating =
            std::clamp(std::round(value), kMinRating, kMaxRating);
        train.push_back(RatingEvent{user, movie, rating, t});
      }
    }
  }

  Dataset full = make_dataset(std::move(train), std::move(households), {});
  full.movie_count = std::max(full.movie_count, n_movies);
  return cv_split(full, config.test_fraction, derive_seed(seed, 1));
}

}  // namespace raterid
