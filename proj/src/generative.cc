#include "raterid/generative.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "raterid/errors.h"
#include "raterid/log.h"
#include "raterid/text_io.h"

namespace raterid {

namespace {

struct Moments {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_squares = 0.0;

  void add(double e) {
    ++count;
    sum += e;
    sum_squares += e * e;
  }
  // Population standard deviation.
  double std_dev() const {
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, sum_squares / n - mean * mean));
  }
};

}  // namespace

std::optional<double> SigmaModel::sigma_for(UserId user) const {
  switch (scope) {
    case SigmaScope::kInfinite:
      return std::nullopt;
    case SigmaScope::kGlobal:
      return sigma_all;
    case SigmaScope::kPerUser: {
      auto it = sigma_by_user.find(user);
      return it == sigma_by_user.end() ? sigma_all : it->second;
    }
  }
  return sigma_all;
}

SigmaModel estimate_sigma(std::span<const RatingEvent> train,
                          const TemporalFactorModel& model, SigmaScope scope,
                          double floor) {
  if (train.empty()) throw EstimationError("no training residuals");
  if (!(floor > 0.0)) throw ConfigError("sigma floor must be positive");
  Moments all;
  std::map<UserId, Moments> by_user;
  for (const auto& e : train) {
    const double residual =
        e.rating - predict(model, e.user, e.movie, e.timestamp);
    all.add(residual);
    by_user[e.user].add(residual);
  }
  SigmaModel sigma;
  sigma.scope = scope;
  sigma.floor = floor;
  sigma.sigma_all = std::max(floor, all.std_dev());
  if (scope == SigmaScope::kPerUser) {
    for (const auto& [user, moments] : by_user) {
      sigma.sigma_by_user[user] = moments.count < kMinResidualsPerUser
                                      ? sigma.sigma_all
                                      : std::max(floor, moments.std_dev());
    }
  }
  return sigma;
}

namespace {

double log_gaussian(double residual, double sigma) {
  return -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) -
         residual * residual / (2.0 * sigma * sigma);
}

}  // namespace

double joint_score(UserId member, const TestEvent& event,
                   const TemporalFactorModel& model,
                   const TemporalPriors& priors, PriorMode mode,
                   const SigmaModel& sigma) {
  const auto position = std::find(priors.members.begin(), priors.members.end(),
                                  member) -
                        priors.members.begin();
  if (position == static_cast<std::ptrdiff_t>(priors.members.size())) {
    throw InputError("user " + std::to_string(member) +
                     " is not a member of household " +
                     std::to_string(priors.household));
  }
  const double q = priors.conditional(mode, event.timestamp)[position];
  const auto s = sigma.sigma_for(member);
  if (!s) return q;
  const double residual =
      event.rating - predict(model, member, event.movie, event.timestamp);
  return std::exp(log_gaussian(residual, *s)) * q;
}

std::vector<double> log_joint_scores(const TestEvent& event,
                                     const TemporalFactorModel& model,
                                     const TemporalPriors& priors,
                                     PriorMode mode, const SigmaModel& sigma) {
  const auto q = priors.conditional(mode, event.timestamp);
  std::vector<double> scores(priors.size());
  for (std::size_t k = 0; k < priors.size(); ++k) {
    scores[k] = q[k] > 0.0 ? std::log(q[k])
                           : -std::numeric_limits<double>::infinity();
    const auto s = sigma.sigma_for(priors.members[k]);
    if (s && q[k] > 0.0) {
      const double residual =
          event.rating -
          predict(model, priors.members[k], event.movie, event.timestamp);
      scores[k] += log_gaussian(residual, *s);
    }
  }
  return scores;
}

std::vector<double> normalize_log_scores(std::span<const double> log_scores) {
  const double top = *std::max_element(log_scores.begin(), log_scores.end());
  std::vector<double> p(log_scores.size());
  if (!std::isfinite(top)) {
    log::warn("all joint scores are zero, using a uniform posterior");
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::exp(log_scores[k] - top);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> posterior(const TestEvent& event,
                              const TemporalFactorModel& model,
                              const TemporalPriors& priors, PriorMode mode,
                              const SigmaModel& sigma) {
  return normalize_log_scores(
      log_joint_scores(event, model, priors, mode, sigma));
}

UserId classify_generative(const TestEvent& event,
                           const TemporalFactorModel& model,
                           const TemporalPriors& priors, PriorMode mode,
                           const SigmaModel& sigma) {
  if (sigma.scope == SigmaScope::kInfinite) {
    // Compare q directly so ties are exactly those of the prior rule.
    const auto q = priors.conditional(mode, event.timestamp);
    return priors.members[argmax_member(q, priors.members)];
  }
  const auto scores = log_joint_scores(event, model, priors, mode, sigma);
  return priors.members[argmax_member(scores, priors.members)];
}

void write_residual_histogram(std::ostream& out,
                              std::span<const RatingEvent> train,
                              const TemporalFactorModel& model,
                              const HouseholdMap& households,
                              double bucket_width) {
  if (!(bucket_width > 0.0)) throw ConfigError("bucket width must be positive");
  using Buckets = std::map<long long, std::size_t>;
  Buckets all;
  std::map<UserId, Buckets> by_user;
  const auto lookup = household_of_users(households);
  for (const auto& e : train) {
    const double residual =
        e.rating - predict(model, e.user, e.movie, e.timestamp);
    const auto bucket =
        static_cast<long long>(std::floor(residual / bucket_width));
    ++all[bucket];
    if (lookup.count(e.user)) ++by_user[e.user][bucket];
  }
  out << "scope\tbucket_low\tbucket_high\tcount\n";
  auto emit = [&](const std::string& scope, const Buckets& buckets) {
    for (const auto& [bucket, count] : buckets) {
      out << scope << '\t'
          << text::format_exact(static_cast<double>(bucket) * bucket_width)
          << '\t'
          << text::format_exact(static_cast<double>(bucket + 1) * bucket_width)
          << '\t' << count << '\n';
    }
  };
  emit("all", all);
  for (const auto& [user, buckets] : by_user) {
    emit("user:" + std::to_string(user), buckets);
  }
}

}  // namespace raterid
