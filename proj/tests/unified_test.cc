#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "raterid/errors.h"
#include "raterid/pipeline.h"
#include "raterid/rng.h"
#include "raterid/unified.h"

namespace raterid {
namespace {

// 1970-01-04 was a Sunday.
Timestamp on_weekday(int day, int hour = 0) {
  return (3 + day) * kSecondsPerDay + hour * 3600;
}

FeatureConfig only(bool a, bool b, bool c, bool d, bool e) {
  FeatureConfig f;
  f.weekday = a;
  f.hour = b;
  f.movie_factors = c;
  f.bins = d;
  f.rating = e;
  return f;
}

const Binning kBins{4, 0, 28 * kSecondsPerDay, BinningKind::kDate};

struct Instance {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Instance random_instance(Rng& rng, long rows, long cols) {
  Instance inst{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  Eigen::VectorXd truth(cols);
  for (long k = 0; k < cols; ++k) truth(k) = 4.0 * rng.uniform() - 2.0;
  for (long s = 0; s < rows; ++s) {
    for (long k = 0; k < cols; ++k) inst.x(s, k) = rng.normal();
    const double p = 1.0 / (1.0 + std::exp(-inst.x.row(s).dot(truth)));
    inst.y(s) = rng.bernoulli(p) ? 1.0 : 0.0;
  }
  return inst;
}

// Subgradient condition, computed here from scratch.
double kkt_gap(const Instance& inst, const Eigen::VectorXd& theta,
               double lambda1) {
  double worst = 0.0;
  for (long k = 0; k < inst.x.cols(); ++k) {
    double g = 0.0;
    for (long s = 0; s < inst.x.rows(); ++s) {
      const double t = inst.x.row(s).dot(theta);
      g += inst.x(s, k) * (1.0 / (1.0 + std::exp(-t)) - inst.y(s));
    }
    const double gap = theta(k) == 0.0
                           ? std::max(0.0, std::abs(g) - lambda1)
                           : std::abs(g + (theta(k) > 0 ? lambda1 : -lambda1));
    worst = std::max(worst, gap);
  }
  return worst;
}

TEST(Features, WeekdayOnly) {
  const FeatureSpace space(only(1, 0, 0, 0, 0), nullptr, kBins);
  EXPECT_EQ(space.dimension(), 7);
  const Eigen::VectorXd x = space.build(0, 50.0, on_weekday(0));
  EXPECT_EQ(x, (Eigen::VectorXd(7) << 1, 0, 0, 0, 0, 0, 0).finished());
}

TEST(Features, RatingEndpoints) {
  const FeatureSpace space(only(0, 0, 0, 0, 1), nullptr, kBins);
  EXPECT_DOUBLE_EQ(space.build(0, 100.0, 0)(0), 5.0);
  EXPECT_DOUBLE_EQ(space.build(0, 0.0, 0)(0), 1.0);
}

TEST(Features, Concatenation) {
  const FeatureSpace space(only(1, 0, 0, 0, 1), nullptr, kBins);
  const Eigen::VectorXd x = space.build(0, 50.0, on_weekday(3));
  EXPECT_EQ(x, (Eigen::VectorXd(8) << 0, 0, 0, 1, 0, 0, 0, 3.0).finished());
}

TEST(Features, HourAndBinBlocks) {
  const FeatureSpace space(only(0, 1, 0, 1, 0), nullptr, kBins);
  EXPECT_EQ(space.dimension(), 28);
  const Eigen::VectorXd x = space.build(0, 50.0, 8 * kSecondsPerDay + 5 * 3600);
  EXPECT_EQ(x(5), 1.0);
  EXPECT_EQ(x(24 + 1), 1.0);  // second week, bin 2
  EXPECT_DOUBLE_EQ(x.sum(), 2.0);
}

TEST(Features, MovieFactorsNeedAModel) {
  EXPECT_THROW(FeatureSpace(only(0, 0, 1, 0, 0), nullptr, kBins), ConfigError);
  FactorParams p;
  p.rank = 2;
  p.bin_count = 4;
  auto m = initial_model(1, 3, p, kBins);
  m.movie_factors[1].row(2) << 0.25, -1.5;
  const FeatureSpace space(only(0, 0, 1, 0, 0), &m, kBins);
  const Eigen::VectorXd x = space.build(2, 0.0, 8 * kSecondsPerDay);
  EXPECT_DOUBLE_EQ(x(0), 0.25);
  EXPECT_DOUBLE_EQ(x(1), -1.5);
  EXPECT_EQ(space.build(99, 0.0, 0), Eigen::VectorXd::Zero(2));
}

TEST(FeatureConfig, Validation) {
  EXPECT_THROW(only(0, 0, 0, 0, 0).validate(), ConfigError);
  FeatureConfig f;
  f.lambda1 = -1.0;
  EXPECT_THROW(f.validate(), ConfigError);
}

TEST(Standardize, Examples) {
  Eigen::MatrixXd rows(2, 2);
  rows << 0, 7, 2, 7;
  const Standardization s = standardize_fit(rows);
  EXPECT_DOUBLE_EQ(s.mean(0), 1.0);
  EXPECT_DOUBLE_EQ(s.scale(0), 1.0);
  const Eigen::MatrixXd z = s.apply(rows);
  EXPECT_DOUBLE_EQ(z(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(z(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(z(1, 1), 0.0);
  EXPECT_THROW(standardize_fit(Eigen::MatrixXd(0, 2)), InputError);
}

TEST(Standardize, FitRowsAreCentered) {
  Rng rng(3);
  Eigen::MatrixXd rows(30, 5);
  for (long i = 0; i < 30; ++i) {
    for (long k = 0; k < 5; ++k) rows(i, k) = 10.0 * rng.uniform() + k;
  }
  const Eigen::MatrixXd z = standardize_fit(rows).apply(rows);
  for (long k = 0; k < 5; ++k) EXPECT_NEAR(z.col(k).mean(), 0.0, 1e-12);
}

TEST(LogitProb, Examples) {
  const Eigen::VectorXd x = Eigen::Vector2d(1.0, 2.0);
  EXPECT_DOUBLE_EQ(logit_prob(Eigen::Vector2d::Zero(), x), 0.5);
  EXPECT_GT(logit_prob(Eigen::Vector2d(40.0, 0.0), x), 1.0 - 1e-12);
  EXPECT_GT(logit_prob(Eigen::Vector2d(-800.0, 0.0), x), -1e-300);
  EXPECT_TRUE(std::isfinite(logit_prob(Eigen::Vector2d(800.0, 0.0), x)));
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd theta = Eigen::Vector2d(rng.normal(), rng.normal()) * 5;
    EXPECT_NEAR(logit_prob(theta, x) + logit_prob(-theta, x), 1.0, 1e-12);
  }
}

TEST(FitLogistic, HugePenaltyGivesExactZero) {
  Rng rng(5);
  const Instance inst = random_instance(rng, 30, 4);
  const Eigen::VectorXd theta = fit_logistic(inst.x, inst.y, 1e6);
  EXPECT_TRUE((theta.array() == 0.0).all());
}

TEST(FitLogistic, OneDimensionalBisectionOracle) {
  const long n = 10;
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(n);
  const double lambda1 = 0.1;
  // d/dtheta for theta > 0: n sigma(theta) - n + lambda1.
  const double expect = oracle::bisect(
      [&](double t) { return n / (1.0 + std::exp(-t)) - n + lambda1; }, 0.0, 50.0);
  const Eigen::VectorXd theta = fit_logistic(x, y, lambda1);
  EXPECT_TRUE(std::isfinite(theta(0)));
  EXPECT_NEAR(theta(0), expect, 1e-6);
}

TEST(FitLogistic, MatchesDerivativeFreeOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const long p = 1 + static_cast<long>(rng.below(3));
    const Instance inst = random_instance(rng, 10, p);
    const double lambda1 = trial == 0 ? 0.01 : 0.01 + rng.uniform();
    const Eigen::VectorXd theta = fit_logistic(inst.x, inst.y, lambda1);
    const auto best = oracle::nelder_mead(
        [&](const oracle::Vec& t) {
          return oracle::logistic_objective(inst.x, inst.y, t, lambda1);
        },
        oracle::Vec(static_cast<std::size_t>(p), 0.0));
    const double oracle_value =
        oracle::logistic_objective(inst.x, inst.y, best, lambda1);
    const double ours = oracle::logistic_objective(
        inst.x, inst.y, oracle::Vec(theta.data(), theta.data() + p), lambda1);
    EXPECT_NEAR(ours, oracle_value, 1e-6) << trial;
    EXPECT_NEAR(logistic_objective(inst.x, inst.y, theta, lambda1), ours, 1e-9);
  }
}

TEST(FitLogistic, KktAndConvexity) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const long n = 5 + static_cast<long>(rng.below(40));
    const long p = 1 + static_cast<long>(rng.below(8));
    const Instance inst = random_instance(rng, n, p);
    const double lambda1 = 0.01 + 3.0 * rng.uniform();
    const Eigen::VectorXd theta = fit_logistic(inst.x, inst.y, lambda1);
    EXPECT_LE(kkt_gap(inst, theta, lambda1), 1e-6) << trial;
    const double at = logistic_objective(inst.x, inst.y, theta, lambda1);
    EXPECT_LE(at, logistic_objective(inst.x, inst.y, Eigen::VectorXd::Zero(p),
                                     lambda1));
    for (int draw = 0; draw < 100; ++draw) {
      Eigen::VectorXd other(p);
      for (long k = 0; k < p; ++k) other(k) = 3.0 * rng.normal();
      EXPECT_LE(at, logistic_objective(inst.x, inst.y, other, lambda1));
    }
  }
}

TEST(FitLogistic, RejectsNonBinaryLabels) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 1);
  EXPECT_THROW(fit_logistic(x, Eigen::Vector2d(0.0, 0.5), 0.1), InputError);
}

Dataset planted(std::uint64_t seed, double overlap, double hour_overlap) {
  SynthConfig c;
  c.households_size2 = 44;
  c.households_size3 = 4;
  c.households_size4 = 2;
  c.events_per_user = 200;
  c.overlap = overlap;
  c.hour_overlap = hour_overlap;
  c.rank = 3;
  c.noise_sigma = 5.0;
  return synth_generate(c, seed);
}

TEST(FitHousehold, OneModelPerMemberWithComplementaryLabels) {
  const Dataset data = planted(1, 0.2, 0.2);
  const FeatureSpace space(only(1, 1, 0, 0, 1), nullptr, kBins);
  for (const auto& [id, h] : data.households) {
    const auto models = fit_household(data.train, h, space);
    ASSERT_EQ(models.size(), h.size());
    if (h.size() != 2) continue;
    // Opposite labels on a shared standardized design: the fits mirror.
    EXPECT_LT((models[0].theta + models[1].theta).cwiseAbs().maxCoeff(), 1e-6);
    break;
  }
}

TEST(FitHousehold, WeekdaySeparableTrainingIsErrorFree) {
  const Dataset data = planted(2, 0.0, 0.0);
  const FeatureSpace space(only(1, 0, 0, 0, 0), nullptr, kBins);
  for (const auto& [id, h] : data.households) {
    const auto models = fit_household(data.train, h, space);
    for (const auto& e : data.train) {
      if (!h.contains(e.user)) continue;
      const TestEvent t{id, e.movie, e.rating, e.timestamp, e.user};
      ASSERT_EQ(classify_unified(models, space, t), e.user) << id;
    }
  }
}

TEST(FitHousehold, NoEventsIsAnError) {
  const FeatureSpace space(only(1, 0, 0, 0, 0), nullptr, kBins);
  EXPECT_THROW(fit_household({}, Household{1, {0, 1}}, space), InputError);
}

LogitModel zero_model(UserId member, int dim) {
  LogitModel m;
  m.member = member;
  m.theta = Eigen::VectorXd::Zero(dim);
  m.standardization.mean = Eigen::VectorXd::Zero(dim);
  m.standardization.scale = Eigen::VectorXd::Ones(dim);
  return m;
}

TEST(ClassifyUnified, ZeroWeightsTieToSmallerId) {
  const FeatureSpace space(only(1, 0, 0, 0, 0), nullptr, kBins);
  const std::vector<LogitModel> models{zero_model(9, 7), zero_model(4, 7)};
  EXPECT_EQ(classify_unified(models, space, {1, 0, 50.0, on_weekday(2), {}}), 4);
}

TEST(ClassifyUnified, HighestProbabilityWinsRegardlessOfOrder) {
  const FeatureSpace space(only(1, 0, 0, 0, 0), nullptr, kBins);
  auto a = zero_model(1, 7);
  auto b = zero_model(2, 7);
  a.theta(2) = std::log(0.9 / 0.1);
  b.theta(2) = std::log(0.2 / 0.8);
  const TestEvent e{1, 0, 50.0, on_weekday(2), {}};
  const auto probs = unified_probabilities({a, b}, space, e);
  EXPECT_NEAR(probs[0], 0.9, 1e-12);
  EXPECT_NEAR(probs[1], 0.2, 1e-12);
  EXPECT_EQ(classify_unified({a, b}, space, e), 1);
  EXPECT_EQ(classify_unified({b, a}, space, e), 1);
}

TEST(ClassifyUnified, SaturatedProbabilitiesStillOrdered) {
  const FeatureSpace space(only(1, 0, 0, 0, 0), nullptr, kBins);
  auto a = zero_model(1, 7);
  auto b = zero_model(2, 7);
  a.theta(2) = 60.0;
  b.theta(2) = 80.0;
  EXPECT_EQ(classify_unified({a, b}, space, {1, 0, 50.0, on_weekday(2), {}}), 2);
}

// Hours carry a second habit signal; adding them should help on average.
TEST(Unified, HourFeaturesNoWorseThanWeekdayAloneOverSeeds) {
  PipelineConfig weekday;
  weekday.classifier = ClassifierKind::kUnified;
  weekday.features = only(1, 0, 0, 0, 0);
  PipelineConfig both = weekday;
  both.features = only(1, 1, 0, 0, 0);
  double a_total = 0.0, ab_total = 0.0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    const Dataset data = planted(seed, 0.1, 0.05);
    SplitContext context(data);
    a_total += *evaluate_pipeline(context, weekday).summary.p;
    ab_total += *evaluate_pipeline(context, both).summary.p;
  }
  EXPECT_LE(ab_total / seeds, a_total / seeds);
}

TEST(WriteLogitModels, OneBlockPerMember) {
  std::ostringstream out;
  write_logit_models(out, {zero_model(3, 2), zero_model(5, 2)});
  EXPECT_NE(out.str().find('3'), std::string::npos);
  EXPECT_NE(out.str().find('5'), std::string::npos);
}

}  // namespace
}  // namespace raterid
