#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "raterid/corpus.h"

namespace raterid {

struct FactorParams {
  int rank = 10;
  double lambda = 1.0;
  double xi_u = 10.0;
  double xi_v = 40.0;
  double xi_z = 40.0;
  int bin_count = 12;
  int iterations = 50;
  std::uint64_t seed = 1;
  BinningKind binning_kind = BinningKind::kDate;

  // Throws ConfigError unless rank, iterations, bin_count >= 1 and all
  // regularization weights are non-negative.
  void validate() const;

  bool operator==(const FactorParams&) const = default;
};

using FactorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-bin user factors U(b) (m x r), movie factors V(b) (n x r) and user
// offsets Z(b) (length m). T = 1 is the time-independent model.
struct TemporalFactorModel {
  std::vector<FactorMatrix> user_factors;
  std::vector<FactorMatrix> movie_factors;
  std::vector<Eigen::VectorXd> user_bias;
  Binning binning;
  FactorParams params;

  std::size_t user_count() const;
  std::size_t movie_count() const;
  int rank() const { return params.rank; }
  int bin_count() const { return binning.bin_count; }

  // Zero-based bin of a timestamp (clamped into range).
  int bin_index(Timestamp timestamp) const;

  bool operator==(const TemporalFactorModel& other) const;
};

// g(A, x, alpha) = (A A^T + alpha I)^-1 A x for A of shape r x k.
// Uses a Cholesky factorization; when alpha == 0 and A A^T is singular (or
// numerically so) falls back to the minimum-norm pseudo-inverse solution.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                            double alpha);

// h(A, x, y, alpha, beta) = (A A^T + alpha I)^-1 (A x + beta y).
// With beta == 0 the result is bitwise identical to ridge_solve.
Eigen::VectorXd smoothed_ridge_solve(const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y, double alpha,
                                     double beta);

enum class Block { kUsers, kMovies, kBiases };

struct FitStep {
  int iteration = 0;  // 1-based
  int bin = 0;        // 0-based
  Block block = Block::kUsers;
};

// Invoked after every block update (all u_i(b), all v_j(b) or all z_i(b)).
using FitObserver =
    std::function<void(const TemporalFactorModel&, const FitStep&)>;

// Allocates a model and fills it as both algorithms initialize: entries of
// U ~ U[0,1]/sqrt(m), V ~ U[0,1]/sqrt(n), Z = 50. One generator seeded with
// params.seed is consumed bin by bin, all of U before V, rows in index order.
TemporalFactorModel initial_model(std::size_t user_count,
                                  std::size_t movie_count,
                                  const FactorParams& params,
                                  const Binning& binning);

// Time-independent alternating minimization (T = 1). Each of K iterations
// updates all u_i, then all v_j, then all z_i in closed form. Users or
// movies without ratings keep their current vectors.
TemporalFactorModel fit_lowrank(std::span<const RatingEvent> train,
                                std::size_t user_count, std::size_t movie_count,
                                FactorParams params,
                                const FitObserver& observer = {});

// Time-dependent alternating minimization. Bins are swept b = 1..T per
// iteration (Gauss-Seidel in b); the smoothing neighbours of bin b are the
// current values of bins b - 1 and b + 1. Boundary bins have a single
// neighbour and shift lambda + xi instead of lambda + 2 xi. The z-update
// carries no lambda. A vector whose bin holds no ratings is still pulled to
// its neighbours; it is left unchanged only when it has no neighbour term
// either (T = 1 or xi = 0).
TemporalFactorModel fit_lowrank_temporal(std::span<const RatingEvent> train,
                                         std::size_t user_count,
                                         std::size_t movie_count,
                                         const FactorParams& params,
                                         const FitObserver& observer = {});

// The regularized squared loss: half the residual sum of squares plus
// R_{lambda,xi_u}(U) + R_{lambda,xi_v}(V) + R_{0,xi_z}(Z), where
// R_{l,x}(W) = l/2 sum_b |W(b)|_F^2 + x/2 sum_b |W(b+1) - W(b)|_F^2.
double cost(const TemporalFactorModel& model,
            std::span<const RatingEvent> train);

// z_i(b) + <u_i(b), v_j(b)> with b the bin of the timestamp. Not clamped.
double predict(const TemporalFactorModel& model, UserId user, MovieId movie,
               Timestamp timestamp);

// Distances used by the residual rule for one household event.
struct ResidualGap {
  double first = 0.0;     // d of the first member
  double rest_min = 0.0;  // min d over the other members
  UserId rest_argmin = 0;  // ties toward the smaller user id
};

ResidualGap residual_gap(const TemporalFactorModel& model,
                         const Household& household, const TestEvent& event);

// Returns the first member iff alpha * d_first < min of the others' d,
// otherwise the closest other member. alpha = 1 is the plain argmin rule.
UserId classify_by_residual(const TemporalFactorModel& model,
                            const Household& household, const TestEvent& event,
                            double alpha);

// Decision of the residual rule from a precomputed gap.
UserId residual_decision(const ResidualGap& gap, const Household& household,
                         double alpha);

// Text serialization; layout documented in the README.
void save_model(std::ostream& out, const TemporalFactorModel& model);
TemporalFactorModel load_model(std::istream& in);

}  // namespace raterid
