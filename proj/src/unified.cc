#include "raterid/unified.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "raterid/errors.h"
#include "raterid/log.h"
#include "raterid/text_io.h"

namespace raterid {

void FeatureConfig::validate() const {
  if (!(weekday || hour || movie_factors || bins || rating)) {
    throw ConfigError("at least one feature block must be enabled");
  }
  if (!(lambda1 >= 0.0)) throw ConfigError("lambda1 must be non-negative");
}

FeatureSpace::FeatureSpace(const FeatureConfig& config,
                           const TemporalFactorModel* model,
                           const Binning& binning)
    : config_(config), model_(model), binning_(binning) {
  config_.validate();
  if (config_.movie_factors) {
    if (model_ == nullptr) {
      throw ConfigError("movie factor features need a fitted model");
    }
    rank_ = model_->rank();
  }
  if (config_.weekday) dimension_ += kDaysPerWeek;
  if (config_.hour) dimension_ += kHoursPerDay;
  if (config_.movie_factors) dimension_ += rank_;
  if (config_.bins) dimension_ += binning_.bin_count;
  if (config_.rating) dimension_ += 1;
}

Eigen::VectorXd FeatureSpace::build(MovieId movie, double rating,
                                    Timestamp timestamp) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dimension_);
  Eigen::Index at = 0;
  if (config_.weekday) {
    x(at + weekday_of(timestamp)) = 1.0;
    at += kDaysPerWeek;
  }
  if (config_.hour) {
    x(at + hour_of(timestamp)) = 1.0;
    at += kHoursPerDay;
  }
  if (config_.movie_factors) {
    if (movie >= 0 && static_cast<std::size_t>(movie) < model_->movie_count()) {
      const int b = model_->bin_index(timestamp);
      x.segment(at, rank_) = model_->movie_factors[b].row(movie).transpose();
    } else {
      log::warn("movie " + std::to_string(movie) +
                " unknown to the factor model, zero factor features");
    }
    at += rank_;
  }
  if (config_.bins) {
    x(at + bin_of_clamped(timestamp, binning_) - 1) = 1.0;
    at += binning_.bin_count;
  }
  if (config_.rating) x(at) = 1.0 + 4.0 * rating / kMaxRating;
  return x;
}

Eigen::MatrixXd FeatureSpace::rows(std::span<const RatingEvent> events) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(events.size()), dimension_);
  for (std::size_t s = 0; s < events.size(); ++s) {
    const auto& e = events[s];
    x.row(static_cast<Eigen::Index>(s)) =
        build(e.movie, e.rating, e.timestamp).transpose();
  }
  return x;
}

// --- Standardization ----------------------------------------------------------

Eigen::VectorXd Standardization::apply(const Eigen::VectorXd& row) const {
  return (row - mean).cwiseQuotient(scale);
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd out = rows.rowwise() - mean.transpose();
  return out.array().rowwise() / scale.transpose().array();
}

Standardization standardize_fit(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw InputError("cannot standardize zero rows");
  Standardization stats;
  const double n = static_cast<double>(rows.rows());
  stats.mean = rows.colwise().mean().transpose();
  stats.scale.resize(rows.cols());
  for (Eigen::Index k = 0; k < rows.cols(); ++k) {
    const double var =
        (rows.col(k).array() - stats.mean(k)).square().sum() / n;
    const double sd = std::sqrt(var);
    // Tiny relative spread is rounding noise on a constant column.
    stats.scale(k) =
        sd > 1e-12 * std::max(1.0, std::abs(stats.mean(k))) ? sd : 1.0;
  }
  return stats;
}

// --- L1 logistic regression ---------------------------------------------------

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double loss_from_margins(const Eigen::VectorXd& z, const Eigen::VectorXd& y) {
  double sum = 0.0;
  for (Eigen::Index s = 0; s < z.size(); ++s) sum += softplus(z(s)) - y(s) * z(s);
  return sum;
}

Eigen::VectorXd gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& z) {
  Eigen::VectorXd residual(z.size());
  for (Eigen::Index s = 0; s < z.size(); ++s) residual(s) = sigmoid(z(s)) - y(s);
  return x.transpose() * residual;
}

double violation(const Eigen::VectorXd& g, const Eigen::VectorXd& theta,
                 double lambda1) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const double v = theta(k) != 0.0
                         ? std::abs(g(k) + std::copysign(lambda1, theta(k)))
                         : std::max(0.0, std::abs(g(k)) - lambda1);
    worst = std::max(worst, v);
  }
  return worst;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void check_problem(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   double lambda1) {
  if (x.rows() != y.size()) {
    throw InputError("feature rows and labels differ in length");
  }
  if (x.rows() == 0) throw InputError("logistic fit needs at least one row");
  for (Eigen::Index s = 0; s < y.size(); ++s) {
    if (y(s) != 0.0 && y(s) != 1.0) throw InputError("labels must be 0 or 1");
  }
  if (!(lambda1 >= 0.0)) throw InputError("lambda1 must be non-negative");
}

}  // namespace

double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& theta, double lambda1) {
  return loss_from_margins(x * theta, y) + lambda1 * theta.lpNorm<1>();
}

double kkt_violation(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& theta, double lambda1) {
  return violation(gradient(x, y, x * theta), theta, lambda1);
}

Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             double lambda1, const LogisticOptions& options) {
  check_problem(x, y, lambda1);
  const Eigen::Index p = x.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(x.rows());
  double objective = loss_from_margins(z, y);

  for (int outer = 0; outer < options.max_outer; ++outer) {
    const Eigen::VectorXd g = gradient(x, y, z);
    if (violation(g, theta, lambda1) <= options.kkt_tolerance) break;

    Eigen::VectorXd w(z.size());
    for (Eigen::Index s = 0; s < z.size(); ++s) {
      const double q = sigmoid(z(s));
      w(s) = q * (1.0 - q);
    }
    Eigen::MatrixXd h = x.transpose() * w.asDiagonal() * x;
    const double damping =
        1e-10 * std::max(1.0, p > 0 ? h.diagonal().maxCoeff() : 0.0);
    h.diagonal().array() += damping;

    // Coordinate descent on g'd + d'Hd/2 + lambda1 |theta + d|_1.
    Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd hd = Eigen::VectorXd::Zero(p);
    for (int inner = 0; inner < options.max_inner; ++inner) {
      double largest = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        const double current = theta(k) + d(k);
        const double next = soft_threshold(
            current - (g(k) + hd(k)) / h(k, k), lambda1 / h(k, k));
        const double delta = next - current;
        if (delta == 0.0) continue;
        d(k) += delta;
        hd += delta * h.col(k);
        largest = std::max(largest, std::abs(delta));
      }
      if (largest <= 1e-15 * (1.0 + (theta + d).lpNorm<Eigen::Infinity>())) {
        break;
      }
    }

    const double decrease =
        g.dot(d) + lambda1 * ((theta + d).lpNorm<1>() - theta.lpNorm<1>());
    if (!(decrease < 0.0)) break;

    const Eigen::VectorXd xd = x * d;
    double step = 1.0;
    bool accepted = false;
    double next_objective = objective;
    for (int halving = 0; halving < 60; ++halving) {
      const Eigen::VectorXd candidate = theta + step * d;
      next_objective = loss_from_margins(z + step * xd, y) +
                       lambda1 * candidate.lpNorm<1>();
      if (next_objective <= objective + 0.01 * step * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    theta += step * d;
    z = x * theta;
    const double change = objective - next_objective;
    objective = next_objective;
    if (change <= options.relative_tolerance * std::max(1.0, std::abs(objective))) {
      break;
    }
  }
  return theta;
}

double logit_prob(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
  if (theta.size() != x.size()) throw InputError("dimension mismatch");
  return sigmoid(theta.dot(x));
}

// --- Household models ---------------------------------------------------------

std::vector<LogitModel> fit_household(std::span<const RatingEvent> train,
                                      const Household& household,
                                      const FeatureSpace& space,
                                      const LogisticOptions& options) {
  std::vector<RatingEvent> events;
  for (const auto& e : train) {
    if (household.contains(e.user)) events.push_back(e);
  }
  if (events.empty()) {
    throw InputError("household " + std::to_string(household.id) +
                     " has no training events");
  }
  const Eigen::MatrixXd raw = space.rows(events);
  const Standardization stats = standardize_fit(raw);
  const Eigen::MatrixXd x = stats.apply(raw);

  std::vector<LogitModel> models;
  for (UserId member : household.members) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(events.size()));
    for (std::size_t s = 0; s < events.size(); ++s) {
      y(static_cast<Eigen::Index>(s)) = events[s].user == member ? 1.0 : 0.0;
    }
    LogitModel model;
    model.member = member;
    model.household = household.id;
    model.standardization = stats;
    model.config = space.config();
    model.degenerate = y.minCoeff() == y.maxCoeff();
    if (model.degenerate) {
      log::warn("household " + std::to_string(household.id) + " member " +
                std::to_string(member) + " has constant labels");
    }
    model.theta = fit_logistic(x, y, space.config().lambda1, options);
    models.push_back(std::move(model));
  }
  return models;
}

namespace {

std::vector<double> margins(const std::vector<LogitModel>& models,
                            const FeatureSpace& space, const TestEvent& event) {
  const Eigen::VectorXd raw =
      space.build(event.movie, event.rating, event.timestamp);
  std::vector<double> out;
  out.reserve(models.size());
  for (const auto& m : models) {
    out.push_back(m.theta.dot(m.standardization.apply(raw)));
  }
  return out;
}

}  // namespace

std::vector<double> unified_probabilities(const std::vector<LogitModel>& models,
                                          const FeatureSpace& space,
                                          const TestEvent& event) {
  auto out = margins(models, space, event);
  for (double& v : out) v = sigmoid(v);
  return out;
}

UserId classify_unified(const std::vector<LogitModel>& models,
                        const FeatureSpace& space, const TestEvent& event) {
  if (models.empty()) throw InputError("no member models");
  const auto scores = margins(models, space, event);
  std::size_t best = 0;
  for (std::size_t k = 1; k < models.size(); ++k) {
    if (scores[k] > scores[best] ||
        (scores[k] == scores[best] && models[k].member < models[best].member)) {
      best = k;
    }
  }
  return models[best].member;
}

void write_logit_models(std::ostream& out,
                        const std::vector<LogitModel>& models) {
  auto vector_line = [&](const char* tag, const Eigen::VectorXd& v) {
    out << tag;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      out << '\t' << text::format_exact(v(k));
    }
    out << '\n';
  };
  for (const auto& m : models) {
    const auto& c = m.config;
    out << "model\thousehold=" << m.household << "\tmember=" << m.member
        << "\tdegenerate=" << (m.degenerate ? 1 : 0) << '\n';
    out << "config\tweekday=" << c.weekday << "\thour=" << c.hour
        << "\tmovie_factors=" << c.movie_factors << "\tbins=" << c.bins
        << "\trating=" << c.rating
        << "\tlambda1=" << text::format_exact(c.lambda1) << '\n';
    vector_line("theta", m.theta);
    vector_line("mean", m.standardization.mean);
    vector_line("scale", m.standardization.scale);
  }
}

}  // namespace raterid
