#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "raterid/errors.h"
#include "raterid/rng.h"
#include "raterid/temporal.h"

namespace raterid {
namespace {

// 1970-01-04 was a Sunday; day d of that week starts here.
Timestamp on_weekday(int day, int week = 0) {
  return (3 + day + 7 * week) * kSecondsPerDay + 3600;
}

RatingEvent event(UserId user, MovieId movie, Timestamp t) {
  return {user, movie, 50.0, t};
}

TEST(DayProfile, AllSunday) {
  const std::vector<RatingEvent> train{event(1, 0, on_weekday(0)),
                                       event(1, 1, on_weekday(0, 1)),
                                       event(1, 2, on_weekday(0, 2))};
  const auto p = day_profile(train, 1);
  EXPECT_EQ(p.weights, (WeekdayWeights{1, 0, 0, 0, 0, 0, 0}));
}

TEST(DayProfile, OnePerWeekday) {
  std::vector<RatingEvent> train;
  for (int d = 0; d < 7; ++d) train.push_back(event(1, d, on_weekday(d)));
  for (double w : day_profile(train, 1).weights) EXPECT_DOUBLE_EQ(w, 1.0 / 7.0);
}

TEST(DayProfile, Counting) {
  const std::vector<RatingEvent> train{event(1, 0, on_weekday(0)),
                                       event(1, 1, on_weekday(0, 3)),
                                       event(1, 2, on_weekday(3)),
                                       event(2, 2, on_weekday(5))};
  const auto w = day_profile(train, 1).weights;
  EXPECT_DOUBLE_EQ(w[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(w[3], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(w[5], 0.0);
}

TEST(DayProfile, UnknownUserIsUndefined) {
  EXPECT_THROW(day_profile({}, 4), UndefinedProfileError);
}

TEST(DayProfile, WeightsFormADistribution) {
  Rng rng(1);
  std::vector<RatingEvent> train;
  for (int k = 0; k < 500; ++k) {
    train.push_back(event(0, k, static_cast<Timestamp>(rng.below(1u << 30))));
  }
  double sum = 0.0;
  for (double w : day_profile(train, 0).weights) {
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(HouseholdTv, Examples) {
  const Household h{1, {1, 2}};
  std::vector<RatingEvent> disjoint{event(1, 0, on_weekday(0)),
                                    event(2, 0, on_weekday(1))};
  EXPECT_DOUBLE_EQ(household_tv(disjoint, h), 1.0);
  std::vector<RatingEvent> same{event(1, 0, on_weekday(2)),
                                event(2, 0, on_weekday(2, 4))};
  EXPECT_DOUBLE_EQ(household_tv(same, h), 0.0);
  std::vector<RatingEvent> half{event(1, 0, on_weekday(0)),
                                event(2, 0, on_weekday(0)),
                                event(2, 1, on_weekday(1))};
  EXPECT_DOUBLE_EQ(household_tv(half, h), 0.5);
}

TEST(HouseholdTv, BoundedAndOneIffDisjoint) {
  Rng rng(9);
  const Household h{1, {0, 1, 2}};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RatingEvent> train;
    std::vector<std::vector<bool>> used(3, std::vector<bool>(7, false));
    for (UserId u = 0; u < 3; ++u) {
      const int n = 1 + static_cast<int>(rng.below(4));
      for (int k = 0; k < n; ++k) {
        const int d = static_cast<int>(rng.below(7));
        used[u][d] = true;
        train.push_back(event(u, k, on_weekday(d)));
      }
    }
    bool disjoint = true;
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        for (int d = 0; d < 7; ++d) disjoint = disjoint && !(used[a][d] && used[b][d]);
      }
    }
    const double tv = household_tv(train, h);
    EXPECT_GE(tv, 0.0);
    EXPECT_LE(tv, 1.0);
    EXPECT_EQ(tv == 1.0, disjoint);
  }
}

TEST(TotalVariation, Symmetric) {
  const WeekdayWeights p{0.5, 0.5, 0, 0, 0, 0, 0};
  const WeekdayWeights q{0.25, 0, 0.75, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(total_variation(p, q), total_variation(q, p));
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.75);
}

const Binning kBinning{4, 0, 28 * kSecondsPerDay, BinningKind::kDate};

TEST(FitPriors, Counting) {
  const Household h{1, {1, 2}};
  const std::vector<RatingEvent> train{
      event(1, 0, on_weekday(0)), event(1, 1, on_weekday(0, 1)),
      event(1, 2, on_weekday(0, 2)), event(2, 0, on_weekday(3))};
  const auto priors = fit_priors(train, h, 0.0, kBinning);
  const auto q = priors.prior();
  EXPECT_DOUBLE_EQ(q[0], 0.75);
  EXPECT_DOUBLE_EQ(q[1], 0.25);
  const auto sunday = priors.given_day(0);
  ASSERT_TRUE(sunday);
  EXPECT_DOUBLE_EQ((*sunday)[0], 1.0);
  EXPECT_FALSE(priors.given_day(1).has_value());
  const auto smoothed = fit_priors(train, h, 1.0, kBinning).given_day(1);
  ASSERT_TRUE(smoothed);
  EXPECT_DOUBLE_EQ((*smoothed)[0], 0.5);
  EXPECT_DOUBLE_EQ((*smoothed)[1], 0.5);
  EXPECT_THROW(priors.given_bin(0), RangeError);
  EXPECT_THROW(priors.given_day(7), RangeError);
}

TEST(FitPriors, MatchesBruteForceRecount) {
  Rng rng(14);
  const Household h{3, {4, 7, 9}};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RatingEvent> train;
    const int n = 1 + static_cast<int>(rng.below(20));
    for (int k = 0; k < n; ++k) {
      const UserId u = h.members[rng.below(3)];
      train.push_back(event(u, k, static_cast<Timestamp>(
                                      rng.below(28 * kSecondsPerDay))));
    }
    train.push_back(event(99, 0, 5));  // outside the household
    const auto priors = fit_priors(train, h, 0.0, kBinning);
    const auto by_day = oracle::count_by(train, [](const RatingEvent& e) {
      return oracle::civil_weekday(e.timestamp);
    });
    const auto by_bin = oracle::count_by(train, [](const RatingEvent& e) {
      return static_cast<int>(e.timestamp / (7 * kSecondsPerDay));
    });
    for (int d = 0; d < 7; ++d) {
      int total = 0;
      for (UserId u : h.members) {
        auto it = by_day.find({u, d});
        total += it == by_day.end() ? 0 : it->second;
      }
      const auto q = priors.given_day(d);
      ASSERT_EQ(q.has_value(), total > 0);
      if (!q) continue;
      for (std::size_t i = 0; i < 3; ++i) {
        auto it = by_day.find({h.members[i], d});
        const int c = it == by_day.end() ? 0 : it->second;
        EXPECT_DOUBLE_EQ((*q)[i], static_cast<double>(c) / total);
      }
    }
    for (int b = 0; b < 4; ++b) {
      int total = 0;
      for (UserId u : h.members) {
        auto it = by_bin.find({u, b});
        total += it == by_bin.end() ? 0 : it->second;
      }
      const auto q = priors.given_bin(b + 1);
      ASSERT_EQ(q.has_value(), total > 0);
      if (!q) continue;
      for (std::size_t i = 0; i < 3; ++i) {
        auto it = by_bin.find({h.members[i], b});
        const int c = it == by_bin.end() ? 0 : it->second;
        EXPECT_DOUBLE_EQ((*q)[i], static_cast<double>(c) / total);
      }
    }
  }
}

TEST(FitPriors, AllHouseholdsMatchesSingle) {
  HouseholdMap households{{1, {1, {0, 1}}}, {2, {2, {2, 3, 4}}}};
  Rng rng(15);
  std::vector<RatingEvent> train;
  for (int k = 0; k < 60; ++k) {
    train.push_back(event(static_cast<UserId>(rng.below(5)), k,
                          static_cast<Timestamp>(rng.below(28 * kSecondsPerDay))));
  }
  const auto all = fit_priors_all(train, households, 0.5, kBinning);
  for (const auto& [id, h] : households) {
    const auto single = fit_priors(train, h, 0.5, kBinning);
    EXPECT_EQ(all.at(id).member_counts, single.member_counts);
    EXPECT_EQ(all.at(id).day_counts, single.day_counts);
    EXPECT_EQ(all.at(id).bin_counts, single.bin_counts);
  }
}

TEST(ClassifyPrior, Examples) {
  const Household h{1, {1, 2}};
  const std::vector<RatingEvent> train{
      event(1, 0, on_weekday(0)), event(1, 1, on_weekday(0, 1)),
      event(1, 2, on_weekday(0, 2)), event(2, 0, on_weekday(3))};
  const auto priors = fit_priors(train, h, 0.0, kBinning);
  EXPECT_EQ(classify_prior(priors, PriorMode::kUniform,
                           TestEvent{1, 5, 10.0, on_weekday(4), std::nullopt}),
            1);
  EXPECT_EQ(classify_prior(priors, PriorMode::kDay,
                           TestEvent{1, 5, 10.0, on_weekday(0, 3), std::nullopt}),
            1);
  EXPECT_EQ(classify_prior(priors, PriorMode::kDay,
                           TestEvent{1, 5, 10.0, on_weekday(3, 1), std::nullopt}),
            2);
}

TEST(ClassifyPrior, TieGoesToSmallerId) {
  const Household h{1, {8, 3}};
  const std::vector<RatingEvent> train{event(8, 0, on_weekday(1)),
                                       event(3, 0, on_weekday(1))};
  const auto priors = fit_priors(train, h, 0.0, kBinning);
  EXPECT_EQ(classify_prior(priors, PriorMode::kUniform,
                           TestEvent{1, 0, 0.0, 0, std::nullopt}),
            3);
  const std::vector<double> scores{0.5, 0.5};
  const std::vector<UserId> members{8, 3};
  EXPECT_EQ(argmax_member(scores, members), 1u);
}

TEST(ClassifyPrior, WeekShiftInvariant) {
  Rng rng(16);
  const Household h{1, {0, 1, 2}};
  std::vector<RatingEvent> train;
  for (int k = 0; k < 40; ++k) {
    train.push_back(event(static_cast<UserId>(rng.below(3)), k,
                          static_cast<Timestamp>(rng.below(28 * kSecondsPerDay))));
  }
  const auto priors = fit_priors(train, h, 0.5, kBinning);
  for (int k = 0; k < 100; ++k) {
    const auto t = static_cast<Timestamp>(rng.below(28 * kSecondsPerDay));
    const TestEvent e{1, 0, 50.0, t, std::nullopt};
    for (int weeks : {-3, 1, 50}) {
      TestEvent shifted = e;
      shifted.timestamp += weeks * 7 * kSecondsPerDay;
      EXPECT_EQ(classify_prior(priors, PriorMode::kDay, e),
                classify_prior(priors, PriorMode::kDay, shifted));
    }
  }
}

TEST(ClassifyPrior, IgnoresTheRating) {
  const Household h{1, {1, 2}};
  const std::vector<RatingEvent> train{event(1, 0, on_weekday(0)),
                                       event(2, 0, on_weekday(1))};
  const auto priors = fit_priors(train, h, 0.5, kBinning);
  for (PriorMode mode : {PriorMode::kUniform, PriorMode::kBin, PriorMode::kDay}) {
    EXPECT_EQ(classify_prior(priors, mode, {1, 0, 0.0, on_weekday(1), {}}),
              classify_prior(priors, mode, {1, 0, 100.0, on_weekday(1), {}}));
  }
}

TEST(Priors, UndefinedConditionalFallsBackToPrior) {
  const Household h{1, {1, 2}};
  const std::vector<RatingEvent> train{event(1, 0, on_weekday(0)),
                                       event(1, 1, on_weekday(0, 1)),
                                       event(2, 0, on_weekday(0))};
  const auto priors = fit_priors(train, h, 0.0, kBinning);
  EXPECT_EQ(priors.conditional(PriorMode::kDay, on_weekday(4)), priors.prior());
}

TEST(Histograms, WeekdayCounts) {
  HouseholdMap households{{1, {1, {1, 2}}}};
  const std::vector<RatingEvent> train{event(1, 0, on_weekday(0)),
                                       event(1, 1, on_weekday(0, 1)),
                                       event(2, 0, on_weekday(6))};
  std::ostringstream out;
  write_weekday_histogram(out, train, households);
  EXPECT_NE(out.str().find("1\t1\t2\t0\t0\t0\t0\t0\t0"), std::string::npos)
      << out.str();
  EXPECT_NE(out.str().find("1\t2\t0\t0\t0\t0\t0\t0\t1"), std::string::npos)
      << out.str();
}

TEST(Histograms, TvTableMarksUndefinedHouseholds) {
  HouseholdMap households{{1, {1, {1, 2}}}, {2, {2, {3, 4}}}};
  const std::vector<RatingEvent> train{event(1, 0, on_weekday(0)),
                                       event(2, 0, on_weekday(1)),
                                       event(3, 0, on_weekday(1))};
  std::ostringstream out;
  write_tv_histogram(out, train, households);
  const std::string text = out.str();
  EXPECT_NE(text.find("1\t2\t1.000000"), std::string::npos) << text;
  EXPECT_NE(text.find("2\tNA"), std::string::npos) << text;
}

}  // namespace
}  // namespace raterid
