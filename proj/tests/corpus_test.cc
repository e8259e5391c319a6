#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "raterid/corpus.h"
#include "raterid/errors.h"
#include "raterid/rng.h"
#include "raterid/temporal.h"

namespace raterid {
namespace {

std::vector<RatingEvent> ratings_from(const std::string& text) {
  std::istringstream in(text);
  return parse_ratings(in);
}

HouseholdMap households_from(const std::string& text) {
  std::istringstream in(text);
  return parse_households(in);
}

SynthConfig small_config(double overlap) {
  SynthConfig c;
  c.households_size2 = 6;
  c.households_size3 = 2;
  c.households_size4 = 2;
  c.events_per_user = 70;
  c.overlap = overlap;
  c.rank = 3;
  c.noise_sigma = 5.0;
  return c;
}

TEST(ParseRatings, SingleLine) {
  const auto events = ratings_from("7 12 85 1288000000\n");
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0], (RatingEvent{7, 12, 85.0, 1288000000}));
}

TEST(ParseRatings, EmptyInput) { EXPECT_TRUE(ratings_from("").empty()); }

TEST(ParseRatings, RatingAboveRangeIsRejected) {
  EXPECT_THROW(ratings_from("7 12 150 0\n"), RangeError);
  EXPECT_THROW(ratings_from("7 12 -1 0\n"), RangeError);
}

TEST(ParseRatings, CommaAndTabSeparators) {
  EXPECT_EQ(ratings_from("1,2,30,40\n"), ratings_from("1\t2\t30\t40\n"));
}

TEST(ParseRatings, SkipsCommentsAndBlankLines) {
  const auto events = ratings_from("# header\n\n1 2 3 4\n");
  EXPECT_EQ(events.size(), 1u);
}

TEST(ParseRatings, MalformedLineNamesItsLine) {
  try {
    ratings_from("1 2 3 4\n1 2 x 4\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(ParseHouseholds, SingleLine) {
  const auto h = households_from("3 10 11\n");
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h.at(3), (Household{3, {10, 11}}));
}

TEST(ParseHouseholds, SingleMemberIsAStructureError) {
  EXPECT_THROW(households_from("3 10\n"), StructureError);
  EXPECT_THROW(households_from("3 1 2 3 4 5\n"), StructureError);
}

TEST(ParseHouseholds, DuplicateIdIsRejected) {
  EXPECT_THROW(households_from("3 10 11\n3 12 13\n"), DuplicateError);
}

TEST(ParseTest, OptionalTrueUser) {
  std::istringstream in("1 5 60 100 7\n1 6 70 200\n");
  const auto test = parse_test(in);
  ASSERT_EQ(test.size(), 2u);
  EXPECT_EQ(test[0].true_user, std::optional<UserId>(7));
  EXPECT_FALSE(test[1].true_user.has_value());
}

TEST(FileFormats, WriteParseRoundTrip) {
  const auto data = synth_generate(small_config(0.2), 4);
  std::ostringstream r, h, t;
  write_ratings(r, data.train);
  write_households(h, data.households);
  write_test(t, data.test);
  std::istringstream ri(r.str()), hi(h.str()), ti(t.str());
  EXPECT_EQ(parse_ratings(ri), data.train);
  EXPECT_EQ(parse_households(hi), data.households);
  EXPECT_EQ(parse_test(ti), data.test);
}

TEST(Validate, UserInTwoHouseholds) {
  HouseholdMap h{{1, {1, {0, 1}}}, {2, {2, {1, 2}}}};
  EXPECT_THROW(make_dataset({}, h, {}), StructureError);
}

TEST(Validate, TrueUserOutsideHousehold) {
  HouseholdMap h{{1, {1, {0, 1}}}};
  std::vector<TestEvent> test{{1, 0, 50, 0, UserId{5}}};
  EXPECT_ANY_THROW(make_dataset({}, h, test));
}

TEST(WeekdayOf, Epoch) {
  EXPECT_EQ(weekday_of(0), 4);
  EXPECT_EQ(weekday_of(345600), 1);
}

TEST(WeekdayOf, MatchesCalendarOracle) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto t = static_cast<Timestamp>(rng.below(4'000'000'000ULL)) -
                   1'000'000'000;
    ASSERT_EQ(weekday_of(t), oracle::civil_weekday(t)) << t;
    ASSERT_EQ(weekday_of(t), weekday_of(t + 7 * kSecondsPerDay));
  }
}

TEST(HourOf, WithinDay) {
  EXPECT_EQ(hour_of(0), 0);
  EXPECT_EQ(hour_of(3600 * 5 + 59), 5);
  EXPECT_EQ(hour_of(-1), 23);
}

TEST(BinOf, Edges) {
  const Binning b{12, 0, 1200, BinningKind::kDate};
  EXPECT_EQ(bin_of(0, b), 1);
  EXPECT_EQ(bin_of(1200, b), 12);
  EXPECT_EQ(bin_of(650, b), 7);
  EXPECT_THROW(bin_of(1201, b), RangeError);
  EXPECT_EQ(bin_of_clamped(1201, b), 12);
  EXPECT_EQ(bin_of_clamped(-5, b), 1);
}

TEST(BinOf, MonotoneAndSurjective) {
  const Binning b{7, 1000, 777, BinningKind::kDate};
  int previous = 1;
  std::vector<bool> seen(8, false);
  for (Timestamp t = 1000; t <= 1777; ++t) {
    const int bin = bin_of(t, b);
    ASSERT_GE(bin, previous);
    previous = bin;
    seen[bin] = true;
  }
  for (int k = 1; k <= 7; ++k) EXPECT_TRUE(seen[k]) << k;
}

TEST(BinOf, WeekdayBinning) {
  const Binning b = Binning::weekday();
  EXPECT_EQ(bin_of(0, b), 5);  // Thursday is the fifth day from Sunday
}

Dataset thousand_event_dataset() {
  std::vector<RatingEvent> train;
  HouseholdMap households;
  for (int h = 0; h < 10; ++h) {
    households[h] = Household{h, {2 * h, 2 * h + 1}};
    for (int m = 0; m < 100; ++m) {
      train.push_back({2 * h + (m % 2), m, 50.0, 1000 + m});
    }
  }
  return make_dataset(std::move(train), std::move(households), {});
}

TEST(CvSplit, PartitionsTheTrainingSet) {
  const Dataset data = thousand_event_dataset();
  const Dataset split = cv_split(data, 0.04, 9);
  std::vector<RatingEvent> joined = split.train;
  for (const auto& e : split.test) {
    ASSERT_TRUE(e.true_user.has_value());
    joined.push_back({*e.true_user, e.movie, e.rating, e.timestamp});
  }
  auto key = [](const RatingEvent& a, const RatingEvent& b) {
    return std::tie(a.user, a.movie, a.timestamp) <
           std::tie(b.user, b.movie, b.timestamp);
  };
  auto original = data.train;
  std::sort(joined.begin(), joined.end(), key);
  std::sort(original.begin(), original.end(), key);
  EXPECT_EQ(joined, original);
  EXPECT_EQ(split.user_count, data.user_count);
  EXPECT_EQ(split.households, data.households);
}

TEST(CvSplit, SameSeedSameSplit) {
  const Dataset data = thousand_event_dataset();
  EXPECT_EQ(cv_split(data, 0.04, 3), cv_split(data, 0.04, 3));
  EXPECT_NE(cv_split(data, 0.04, 3), cv_split(data, 0.04, 4));
}

TEST(CvSplit, TinyFractionGivesEmptyTest) {
  EXPECT_TRUE(cv_split(thousand_event_dataset(), 1e-12, 1).test.empty());
}

TEST(CvSplit, HoldoutSizeConcentrates) {
  const Dataset data = thousand_event_dataset();
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    total += static_cast<double>(cv_split(data, 0.04, seed).test.size());
  }
  const double mean = total / 50.0;
  EXPECT_GE(mean, 20.0);
  EXPECT_LE(mean, 60.0);
}

TEST(SynthConfig, ParsesRequiredAndOptionalKeys) {
  std::istringstream in(
      "households_size2 = 3\nhouseholds_size3=1\nhouseholds_size4 = 0\n"
      "events_per_user = 20\noverlap = 0.5\nrank = 2\nnoise_sigma = 4\n"
      "seed = 9  # trailing comment\nhour_overlap = 0.1\n");
  const SynthConfig c = parse_synth_config(in);
  EXPECT_EQ(c.households_size2, 3u);
  EXPECT_EQ(c.events_per_user, 20u);
  EXPECT_DOUBLE_EQ(c.overlap, 0.5);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.hour_overlap, std::optional<double>(0.1));
}

TEST(SynthConfig, MissingKeyAndBadValues) {
  std::istringstream missing("households_size2 = 3\n");
  EXPECT_THROW(parse_synth_config(missing), ConfigError);
  std::istringstream bad(
      "households_size2 = 3\nhouseholds_size3=1\nhouseholds_size4 = 0\n"
      "events_per_user = 20\noverlap = 1.5\nrank = 2\nnoise_sigma = 4\n"
      "seed = 9\n");
  EXPECT_THROW(parse_synth_config(bad), ConfigError);
  EXPECT_THROW(parse_synth_config(std::filesystem::path("/nonexistent/x")),
               ConfigError);
}

TEST(SynthGenerate, DisjointWeekdaysAtZeroOverlap) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset data = synth_generate(small_config(0.0), seed);
    for (const auto& [id, h] : data.households) {
      EXPECT_DOUBLE_EQ(household_tv(data.train, h), 1.0) << id;
    }
  }
}

TEST(SynthGenerate, SharedHabitsAtFullOverlap) {
  SynthConfig c = small_config(1.0);
  c.events_per_user = 300;
  const Dataset data = synth_generate(c, 5);
  for (const auto& [id, h] : data.households) {
    EXPECT_LT(household_tv(data.train, h), 0.15) << id;
  }
}

TEST(SynthGenerate, Deterministic) {
  EXPECT_EQ(synth_generate(small_config(0.3), 8),
            synth_generate(small_config(0.3), 8));
}

TEST(SynthGenerate, WellFormed) {
  const Dataset data = synth_generate(small_config(0.1), 2);
  EXPECT_EQ(data.households.size(), 10u);
  EXPECT_NO_THROW(validate(data));
  for (const auto& e : data.train) {
    EXPECT_GE(e.rating, kMinRating);
    EXPECT_LE(e.rating, kMaxRating);
  }
  for (const auto& e : data.test) EXPECT_TRUE(e.true_user.has_value());
}

TEST(LoadDataset, ReadsFilesFromDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "raterid_corpus_test";
  std::filesystem::create_directories(dir);
  const Dataset data = synth_generate(small_config(0.1), 6);
  {
    std::ofstream r(dir / "train.tsv"), h(dir / "households.tsv"),
        t(dir / "test.tsv");
    write_ratings(r, data.train);
    write_households(h, data.households);
    write_test(t, data.test);
  }
  const Dataset loaded =
      load_dataset(dir / "train.tsv", dir / "households.tsv", dir / "test.tsv");
  EXPECT_EQ(loaded.train, data.train);
  EXPECT_EQ(loaded.test, data.test);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace raterid
