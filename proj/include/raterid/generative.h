#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "raterid/corpus.h"
#include "raterid/factorize.h"
#include "raterid/temporal.h"

namespace raterid {

enum class SigmaScope {
  kInfinite,  // drop the Gaussian factor; scores reduce to the priors
  kGlobal,    // one sigma for all users
  kPerUser,   // sigma_i, falling back to the global value for sparse users
};

inline constexpr double kSigmaFloor = 0.5;
inline constexpr std::size_t kMinResidualsPerUser = 5;

struct SigmaModel {
  SigmaScope scope = SigmaScope::kPerUser;
  double sigma_all = 1.0;
  std::map<UserId, double> sigma_by_user;
  double floor = kSigmaFloor;

  // nullopt for the infinite scope.
  std::optional<double> sigma_for(UserId user) const;
};

// Residual standard deviations of the model on its training set, population
// convention, every value floored. Throws EstimationError on empty train.
SigmaModel estimate_sigma(std::span<const RatingEvent> train,
                          const TemporalFactorModel& model, SigmaScope scope,
                          double floor = kSigmaFloor);

// P(i, M | .) = exp(-(M - Mhat)^2 / 2 sigma^2) / sqrt(2 pi sigma^2) * q(i | .)
// with q the prior selected by mode. The infinite scope returns q itself.
double joint_score(UserId member, const TestEvent& event,
                   const TemporalFactorModel& model,
                   const TemporalPriors& priors, PriorMode mode,
                   const SigmaModel& sigma);

// Natural log of joint_score for every member (positions of
// priors.members); -inf where q = 0.
std::vector<double> log_joint_scores(const TestEvent& event,
                                     const TemporalFactorModel& model,
                                     const TemporalPriors& priors,
                                     PriorMode mode, const SigmaModel& sigma);

// Normalizes log-domain scores into probabilities (log-sum-exp). All -inf
// gives the uniform distribution (logged).
std::vector<double> normalize_log_scores(std::span<const double> log_scores);

// Posterior over household members, in priors.members order.
std::vector<double> posterior(const TestEvent& event,
                              const TemporalFactorModel& model,
                              const TemporalPriors& priors, PriorMode mode,
                              const SigmaModel& sigma);

// argmax of the joint score; ties toward the smaller user id.
UserId classify_generative(const TestEvent& event,
                           const TemporalFactorModel& model,
                           const TemporalPriors& priors, PriorMode mode,
                           const SigmaModel& sigma);

// Histogram of training residuals M - Mhat in buckets of the given width:
// an "all" block, then one block per household member.
void write_residual_histogram(std::ostream& out,
                              std::span<const RatingEvent> train,
                              const TemporalFactorModel& model,
                              const HouseholdMap& households,
                              double bucket_width = 5.0);

}  // namespace raterid
