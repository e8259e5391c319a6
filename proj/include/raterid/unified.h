#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "raterid/corpus.h"
#include "raterid/factorize.h"

namespace raterid {

struct FeatureConfig {
  bool weekday = true;        // (a) one-hot, length 7
  bool hour = true;           // (b) one-hot UTC hour, length 24
  bool movie_factors = true;  // (c) v_j(b(t)), length r
  bool bins = true;           // (d) one-hot time bin, length T
  bool rating = true;         // (e) 1 + 4 M / 100, length 1
  double lambda1 = 0.01;

  // Throws ConfigError if no block is enabled or lambda1 < 0.
  void validate() const;

  bool operator==(const FeatureConfig&) const = default;
};

// Maps an event to its feature vector. The factor model is needed only for
// block (c); the binning drives block (d).
class FeatureSpace {
 public:
  // Throws ConfigError when (c) is enabled without a model.
  FeatureSpace(const FeatureConfig& config, const TemporalFactorModel* model,
               const Binning& binning);

  const FeatureConfig& config() const { return config_; }
  int dimension() const { return dimension_; }

  // Blocks in the order a, b, c, d, e. A movie the model does not know gets a
  // zero (c) block.
  Eigen::VectorXd build(MovieId movie, double rating,
                        Timestamp timestamp) const;

  // Feature matrix (one row per event).
  Eigen::MatrixXd rows(std::span<const RatingEvent> events) const;

 private:
  FeatureConfig config_;
  const TemporalFactorModel* model_;
  Binning binning_;
  int rank_ = 0;
  int dimension_ = 0;
};

// Per-coordinate centering and scaling, population std; constant columns
// keep scale 1.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  Eigen::VectorXd apply(const Eigen::VectorXd& row) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

// Throws InputError when there are no rows.
Standardization standardize_fit(const Eigen::MatrixXd& rows);

struct LogisticOptions {
  int max_outer = 200;
  int max_inner = 500;
  // Stop once every coordinate satisfies the L1 optimality condition to
  // within this absolute tolerance.
  double kkt_tolerance = 1e-9;
  double relative_tolerance = 1e-14;
};

// sum_s [log(1 + e^{<theta, x_s>}) - y_s <theta, x_s>] + lambda1 |theta|_1
double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& theta, double lambda1);

// Largest violation of the subgradient optimality condition at theta.
double kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& theta, double lambda1);

// Minimizes logistic_objective from theta = 0 by proximal Newton steps
// (coordinate descent on the L1-penalized quadratic model, then a
// backtracking line search on the true objective). No intercept. Labels must
// be 0 or 1 (InputError otherwise).
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double lambda1,
                             const LogisticOptions& options = {});

// Numerically stable e^{<theta,x>} / (1 + e^{<theta,x>}).
double logit_prob(const Eigen::VectorXd& theta, const Eigen::VectorXd& x);

struct LogitModel {
  UserId member = 0;
  HouseholdId household = 0;
  Eigen::VectorXd theta;
  Standardization standardization;
  FeatureConfig config;
  // All labels equal: the member rated every or none of the events.
  bool degenerate = false;
};

// One model per member (household order), all sharing the household's
// standardized training design. Throws InputError if the household has no
// training events.
std::vector<LogitModel> fit_household(std::span<const RatingEvent> train,
                                      const Household& household,
                                      const FeatureSpace& space,
                                      const LogisticOptions& options = {});

// P(y = 1 | O) for every model, in order.
std::vector<double> unified_probabilities(const std::vector<LogitModel>& models,
                                          const FeatureSpace& space,
                                          const TestEvent& event);

// argmax over members; ties toward the smaller user id. Compares
// <theta, x> rather than the saturating sigmoid.
UserId classify_unified(const std::vector<LogitModel>& models,
                        const FeatureSpace& space, const TestEvent& event);

// Text dump: per member theta, mean, scale and the feature config.
void write_logit_models(std::ostream& out,
                        const std::vector<LogitModel>& models);

}  // namespace raterid
