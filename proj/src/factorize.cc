#include "raterid/factorize.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "raterid/errors.h"
#include "raterid/rng.h"
#include "raterid/text_io.h"

namespace raterid {

void FactorParams::validate() const {
  if (rank < 1) throw ConfigError("rank must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (bin_count < 1) throw ConfigError("bin count must be >= 1");
  if (!(lambda >= 0.0) || !(xi_u >= 0.0) || !(xi_v >= 0.0) ||
      !(xi_z >= 0.0)) {
    throw ConfigError("regularization weights must be non-negative");
  }
  if (binning_kind == BinningKind::kWeekday && bin_count != kDaysPerWeek) {
    throw ConfigError("weekday binning requires 7 bins");
  }
}

std::size_t TemporalFactorModel::user_count() const {
  return user_factors.empty() ? 0
                              : static_cast<std::size_t>(user_factors[0].rows());
}

std::size_t TemporalFactorModel::movie_count() const {
  return movie_factors.empty()
             ? 0
             : static_cast<std::size_t>(movie_factors[0].rows());
}

int TemporalFactorModel::bin_index(Timestamp timestamp) const {
  return bin_of_clamped(timestamp, binning) - 1;
}

bool TemporalFactorModel::operator==(const TemporalFactorModel& other) const {
  if (!(binning == other.binning) || !(params == other.params) ||
      user_factors.size() != other.user_factors.size() ||
      movie_factors.size() != other.movie_factors.size() ||
      user_bias.size() != other.user_bias.size()) {
    return false;
  }
  for (std::size_t b = 0; b < user_factors.size(); ++b) {
    if (user_factors[b].rows() != other.user_factors[b].rows() ||
        user_factors[b].cols() != other.user_factors[b].cols() ||
        user_factors[b] != other.user_factors[b]) {
      return false;
    }
    if (movie_factors[b].rows() != other.movie_factors[b].rows() ||
        movie_factors[b].cols() != other.movie_factors[b].cols() ||
        movie_factors[b] != other.movie_factors[b]) {
      return false;
    }
    if (user_bias[b].size() != other.user_bias[b].size() ||
        user_bias[b] != other.user_bias[b]) {
      return false;
    }
  }
  return true;
}

// --- Ridge primitives ---------------------------------------------------------

namespace {

// Relative pivot threshold below which an unshifted Gram matrix is treated as
// singular.
constexpr double kSingularPivot = 1e-12;

Eigen::VectorXd solve_gram(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs,
                           double alpha) {
  Eigen::MatrixXd gram = a * a.transpose();
  gram.diagonal().array() += alpha;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    if (alpha > 0.0) return llt.solve(rhs);
    const Eigen::MatrixXd l = llt.matrixL();
    const double pivot = l.diagonal().minCoeff();
    const double scale = gram.diagonal().maxCoeff();
    if (scale > 0.0 && pivot * pivot > kSingularPivot * scale) {
      return llt.solve(rhs);
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
  return cod.solve(rhs);
}

void check_shapes(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                  double alpha) {
  if (a.cols() != x.size()) {
    throw InputError("ridge_solve: A has " + std::to_string(a.cols()) +
                     " columns but x has " + std::to_string(x.size()) +
                     " entries");
  }
  if (!(alpha >= 0.0)) throw InputError("ridge_solve: alpha must be >= 0");
}

}  // namespace

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                            double alpha) {
  check_shapes(a, x, alpha);
  Eigen::VectorXd rhs = a * x;
  return solve_gram(a, rhs, alpha);
}

Eigen::VectorXd smoothed_ridge_solve(const Eigen::MatrixXd& a,
                                     const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y, double alpha,
                                     double beta) {
  check_shapes(a, x, alpha);
  if (y.size() != a.rows()) {
    throw InputError("smoothed_ridge_solve: y must have length r");
  }
  Eigen::VectorXd rhs = a * x;
  if (beta != 0.0) rhs += beta * y;
  return solve_gram(a, rhs, alpha);
}

// --- Fitting ----------------------------------------------------------------

TemporalFactorModel initial_model(std::size_t user_count,
                                  std::size_t movie_count,
                                  const FactorParams& params,
                                  const Binning& binning) {
  params.validate();
  TemporalFactorModel model;
  model.params = params;
  model.binning = binning;
  const int bins = binning.bin_count;
  const auto m = static_cast<Eigen::Index>(user_count);
  const auto n = static_cast<Eigen::Index>(movie_count);
  const auto r = static_cast<Eigen::Index>(params.rank);
  const double user_scale = 1.0 / std::sqrt(std::max<double>(1.0, m));
  const double movie_scale = 1.0 / std::sqrt(std::max<double>(1.0, n));
  Rng rng(params.seed);
  model.user_factors.assign(bins, FactorMatrix(m, r));
  model.movie_factors.assign(bins, FactorMatrix(n, r));
  model.user_bias.assign(bins, Eigen::VectorXd::Constant(m, 50.0));
  for (int b = 0; b < bins; ++b) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index k = 0; k < r; ++k) {
        model.user_factors[b](i, k) = rng.uniform() * user_scale;
      }
    }
  }
  for (int b = 0; b < bins; ++b) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < r; ++k) {
        model.movie_factors[b](j, k) = rng.uniform() * movie_scale;
      }
    }
  }
  return model;
}

namespace {

struct Entry {
  std::size_t other;  // movie for user lists, user for movie lists
  double rating;
};

// E_i(b) and F_j(b), in training order.
struct RatingIndex {
  std::vector<std::vector<std::vector<Entry>>> by_user;   // [b][i]
  std::vector<std::vector<std::vector<Entry>>> by_movie;  // [b][j]
};

RatingIndex build_index(std::span<const RatingEvent> train,
                        const TemporalFactorModel& model) {
  const std::size_t m = model.user_count();
  const std::size_t n = model.movie_count();
  const int bins = model.bin_count();
  RatingIndex index;
  index.by_user.assign(bins, std::vector<std::vector<Entry>>(m));
  index.by_movie.assign(bins, std::vector<std::vector<Entry>>(n));
  for (const auto& e : train) {
    if (e.user < 0 || static_cast<std::size_t>(e.user) >= m || e.movie < 0 ||
        static_cast<std::size_t>(e.movie) >= n) {
      throw RangeError("training event outside the model index space");
    }
    const int b = model.bin_index(e.timestamp);
    const auto i = static_cast<std::size_t>(e.user);
    const auto j = static_cast<std::size_t>(e.movie);
    index.by_user[b][i].push_back(Entry{j, e.rating});
    index.by_movie[b][j].push_back(Entry{i, e.rating});
  }
  return index;
}

double inner(const FactorMatrix& u, Eigen::Index i, const FactorMatrix& v,
             Eigen::Index j) {
  return u.row(i).dot(v.row(j));
}

void notify(const FitObserver& observer, const TemporalFactorModel& model,
            int iteration, int bin, Block block) {
  if (observer) observer(model, FitStep{iteration, bin, block});
}

void check_training_input(std::span<const RatingEvent> train) {
  if (train.empty()) throw InputError("training set is empty");
}

}  // namespace

TemporalFactorModel fit_lowrank(std::span<const RatingEvent> train,
                                std::size_t user_count, std::size_t movie_count,
                                FactorParams params,
                                const FitObserver& observer) {
  check_training_input(train);
  params.bin_count = 1;
  params.binning_kind = BinningKind::kDate;
  TemporalFactorModel model = initial_model(
      user_count, movie_count, params, Binning::from_events(train, 1));
  const RatingIndex index = build_index(train, model);
  const auto& by_user = index.by_user[0];
  const auto& by_movie = index.by_movie[0];
  FactorMatrix& u = model.user_factors[0];
  FactorMatrix& v = model.movie_factors[0];
  Eigen::VectorXd& z = model.user_bias[0];
  const Eigen::Index r = params.rank;

  for (int k = 1; k <= params.iterations; ++k) {
    for (std::size_t i = 0; i < by_user.size(); ++i) {
      const auto& list = by_user[i];
      if (list.empty()) continue;
      const auto count = static_cast<Eigen::Index>(list.size());
      Eigen::MatrixXd a(r, count);
      Eigen::VectorXd x(count);
      for (Eigen::Index e = 0; e < count; ++e) {
        a.col(e) = v.row(static_cast<Eigen::Index>(list[e].other)).transpose();
        x(e) = list[e].rating - z(static_cast<Eigen::Index>(i));
      }
      u.row(static_cast<Eigen::Index>(i)) =
          ridge_solve(a, x, params.lambda).transpose();
    }
    notify(observer, model, k, 0, Block::kUsers);

    for (std::size_t j = 0; j < by_movie.size(); ++j) {
      const auto& list = by_movie[j];
      if (list.empty()) continue;
      const auto count = static_cast<Eigen::Index>(list.size());
      Eigen::MatrixXd a(r, count);
      Eigen::VectorXd x(count);
      for (Eigen::Index e = 0; e < count; ++e) {
        const auto i = static_cast<Eigen::Index>(list[e].other);
        a.col(e) = u.row(i).transpose();
        x(e) = list[e].rating - z(i);
      }
      v.row(static_cast<Eigen::Index>(j)) =
          ridge_solve(a, x, params.lambda).transpose();
    }
    notify(observer, model, k, 0, Block::kMovies);

    for (std::size_t i = 0; i < by_user.size(); ++i) {
      const auto& list = by_user[i];
      if (list.empty()) continue;
      const auto count = static_cast<Eigen::Index>(list.size());
      const auto row = static_cast<Eigen::Index>(i);
      Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, count);
      Eigen::VectorXd x(count);
      for (Eigen::Index e = 0; e < count; ++e) {
        x(e) = list[e].rating -
               inner(u, row, v, static_cast<Eigen::Index>(list[e].other));
      }
      z(row) = ridge_solve(a, x, 0.0)(0);
    }
    notify(observer, model, k, 0, Block::kBiases);
  }
  return model;
}

TemporalFactorModel fit_lowrank_temporal(std::span<const RatingEvent> train,
                                         std::size_t user_count,
                                         std::size_t movie_count,
                                         const FactorParams& params,
                                         const FitObserver& observer) {
  check_training_input(train);
  const Binning binning = params.binning_kind == BinningKind::kWeekday
                              ? Binning::weekday()
                              : Binning::from_events(train, params.bin_count);
  TemporalFactorModel model =
      initial_model(user_count, movie_count, params, binning);
  const RatingIndex index = build_index(train, model);
  const int bins = model.bin_count();
  const Eigen::Index r = params.rank;
  auto& U = model.user_factors;
  auto& V = model.movie_factors;
  auto& Z = model.user_bias;

  for (int k = 1; k <= params.iterations; ++k) {
    for (int b = 0; b < bins; ++b) {
      const bool has_prev = b > 0;
      const bool has_next = b + 1 < bins;
      const double neighbours = (has_prev ? 1.0 : 0.0) + (has_next ? 1.0 : 0.0);

      // u_i(b)
      {
        const double beta = neighbours > 0.0 ? params.xi_u : 0.0;
        const double shift = params.lambda + neighbours * params.xi_u;
        const auto& lists = index.by_user[b];
        for (std::size_t i = 0; i < lists.size(); ++i) {
          const auto& list = lists[i];
          if (list.empty() && beta == 0.0) continue;
          const auto row = static_cast<Eigen::Index>(i);
          const auto count = static_cast<Eigen::Index>(list.size());
          Eigen::MatrixXd a(r, count);
          Eigen::VectorXd x(count);
          for (Eigen::Index e = 0; e < count; ++e) {
            a.col(e) =
                V[b].row(static_cast<Eigen::Index>(list[e].other)).transpose();
            x(e) = list[e].rating - Z[b](row);
          }
          Eigen::VectorXd y = Eigen::VectorXd::Zero(r);
          if (has_next) y += U[b + 1].row(row).transpose();
          if (has_prev) y += U[b - 1].row(row).transpose();
          U[b].row(row) = smoothed_ridge_solve(a, x, y, shift, beta).transpose();
        }
        notify(observer, model, k, b, Block::kUsers);
      }

      // v_j(b)
      {
        const double beta = neighbours > 0.0 ? params.xi_v : 0.0;
        const double shift = params.lambda + neighbours * params.xi_v;
        const auto& lists = index.by_movie[b];
        for (std::size_t j = 0; j < lists.size(); ++j) {
          const auto& list = lists[j];
          if (list.empty() && beta == 0.0) continue;
          const auto row = static_cast<Eigen::Index>(j);
          const auto count = static_cast<Eigen::Index>(list.size());
          Eigen::MatrixXd a(r, count);
          Eigen::VectorXd x(count);
          for (Eigen::Index e = 0; e < count; ++e) {
            const auto i = static_cast<Eigen::Index>(list[e].other);
            a.col(e) = U[b].row(i).transpose();
            x(e) = list[e].rating - Z[b](i);
          }
          Eigen::VectorXd y = Eigen::VectorXd::Zero(r);
          if (has_next) y += V[b + 1].row(row).transpose();
          if (has_prev) y += V[b - 1].row(row).transpose();
          V[b].row(row) = smoothed_ridge_solve(a, x, y, shift, beta).transpose();
        }
        notify(observer, model, k, b, Block::kMovies);
      }

      // z_i(b)
      {
        const double beta = neighbours > 0.0 ? params.xi_z : 0.0;
        const double shift = neighbours * params.xi_z;
        const auto& lists = index.by_user[b];
        for (std::size_t i = 0; i < lists.size(); ++i) {
          const auto& list = lists[i];
          if (list.empty() && beta == 0.0) continue;
          const auto row = static_cast<Eigen::Index>(i);
          const auto count = static_cast<Eigen::Index>(list.size());
          Eigen::MatrixXd a = Eigen::MatrixXd::Ones(1, count);
          Eigen::VectorXd x(count);
          for (Eigen::Index e = 0; e < count; ++e) {
            x(e) = list[e].rating -
                   inner(U[b], row, V[b],
                         static_cast<Eigen::Index>(list[e].other));
          }
          Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
          if (has_next) y(0) += Z[b + 1](row);
          if (has_prev) y(0) += Z[b - 1](row);
          Z[b](row) = smoothed_ridge_solve(a, x, y, shift, beta)(0);
        }
        notify(observer, model, k, b, Block::kBiases);
      }
    }
  }
  return model;
}

// --- Evaluation of the model ------------------------------------------------

double cost(const TemporalFactorModel& model,
            std::span<const RatingEvent> train) {
  const FactorParams& p = model.params;
  double data = 0.0;
  for (const auto& e : train) {
    const double residual =
        e.rating - predict(model, e.user, e.movie, e.timestamp);
    data += residual * residual;
  }
  double total = 0.5 * data;
  const int bins = model.bin_count();
  for (int b = 0; b < bins; ++b) {
    total += 0.5 * p.lambda * model.user_factors[b].squaredNorm();
    total += 0.5 * p.lambda * model.movie_factors[b].squaredNorm();
  }
  for (int b = 0; b + 1 < bins; ++b) {
    total += 0.5 * p.xi_u *
             (model.user_factors[b + 1] - model.user_factors[b]).squaredNorm();
    total += 0.5 * p.xi_v *
             (model.movie_factors[b + 1] - model.movie_factors[b]).squaredNorm();
    total += 0.5 * p.xi_z *
             (model.user_bias[b + 1] - model.user_bias[b]).squaredNorm();
  }
  return total;
}

double predict(const TemporalFactorModel& model, UserId user, MovieId movie,
               Timestamp timestamp) {
  if (user < 0 || static_cast<std::size_t>(user) >= model.user_count()) {
    throw std::out_of_range("predict: user " + std::to_string(user) +
                            " outside the model");
  }
  if (movie < 0 || static_cast<std::size_t>(movie) >= model.movie_count()) {
    throw std::out_of_range("predict: movie " + std::to_string(movie) +
                            " outside the model");
  }
  const int b = model.bin_index(timestamp);
  return model.user_bias[b](user) +
         inner(model.user_factors[b], user, model.movie_factors[b], movie);
}

ResidualGap residual_gap(const TemporalFactorModel& model,
                         const Household& household, const TestEvent& event) {
  if (household.size() < 2) {
    throw StructureError("residual rule needs at least two members");
  }
  ResidualGap gap;
  gap.first = std::abs(event.rating - predict(model, household.members[0],
                                              event.movie, event.timestamp));
  gap.rest_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < household.size(); ++k) {
    const UserId member = household.members[k];
    const double d = std::abs(
        event.rating - predict(model, member, event.movie, event.timestamp));
    if (d < gap.rest_min || (d == gap.rest_min && member < gap.rest_argmin)) {
      gap.rest_min = d;
      gap.rest_argmin = member;
    }
  }
  return gap;
}

UserId residual_decision(const ResidualGap& gap, const Household& household,
                         double alpha) {
  return alpha * gap.first < gap.rest_min ? household.members[0]
                                          : gap.rest_argmin;
}

UserId classify_by_residual(const TemporalFactorModel& model,
                            const Household& household, const TestEvent& event,
                            double alpha) {
  return residual_decision(residual_gap(model, household, event), household,
                           alpha);
}

// --- Serialization ----------------------------------------------------------

namespace {

constexpr const char* kModelMagic = "raterid-factor-model";
constexpr int kModelVersion = 1;

void write_row(std::ostream& out, const FactorMatrix& matrix, Eigen::Index i) {
  for (Eigen::Index k = 0; k < matrix.cols(); ++k) {
    if (k) out << ' ';
    out << text::format_exact(matrix(i, k));
  }
  out << '\n';
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("<model>", 0, std::string("truncated model: missing ") + what);
  }
  return line;
}

std::vector<std::string_view> expect_fields(const std::string& line,
                                            const char* tag,
                                            std::size_t count) {
  auto fields = text::split_fields(line, text::Delimiter::kSpace);
  if (fields.size() != count || fields[0] != tag) {
    throw ParseError("<model>", 0,
                     std::string("malformed '") + tag + "' line: " + line);
  }
  return fields;
}

// The views would dangle.
std::vector<std::string_view> expect_fields(std::string&&, const char*,
                                            std::size_t) = delete;

void expect_marker(std::istream& in, const char* tag) {
  const std::string line = next_line(in, tag);
  expect_fields(line, tag, 1);
}

double field_double(std::string_view field) {
  auto value = text::parse_double(field);
  if (!value) throw ParseError("<model>", 0, "bad number " + std::string(field));
  return *value;
}

std::int64_t field_int(std::string_view field) {
  auto value = text::parse_int(field);
  if (!value) throw ParseError("<model>", 0, "bad integer " + std::string(field));
  return *value;
}

void read_rows(std::istream& in, FactorMatrix& matrix, const char* what) {
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    auto line = next_line(in, what);
    auto fields = text::split_fields(line, text::Delimiter::kSpace);
    if (static_cast<Eigen::Index>(fields.size()) != matrix.cols()) {
      throw ParseError("<model>", 0, std::string("bad row width in ") + what);
    }
    for (Eigen::Index k = 0; k < matrix.cols(); ++k) {
      matrix(i, k) = field_double(fields[k]);
    }
  }
}

}  // namespace

void save_model(std::ostream& out, const TemporalFactorModel& model) {
  const FactorParams& p = model.params;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "dims " << model.user_count() << ' ' << model.movie_count() << ' '
      << p.rank << ' ' << model.bin_count() << '\n';
  out << "binning "
      << (model.binning.kind == BinningKind::kWeekday ? "weekday" : "date")
      << ' ' << model.binning.origin << ' ' << model.binning.span << '\n';
  out << "params " << p.rank << ' ' << text::format_exact(p.lambda) << ' '
      << text::format_exact(p.xi_u) << ' ' << text::format_exact(p.xi_v)
      << ' ' << text::format_exact(p.xi_z) << ' ' << p.bin_count << ' '
      << p.iterations << ' ' << p.seed << '\n';
  out << "U\n";
  for (const auto& u : model.user_factors) {
    for (Eigen::Index i = 0; i < u.rows(); ++i) write_row(out, u, i);
  }
  out << "V\n";
  for (const auto& v : model.movie_factors) {
    for (Eigen::Index j = 0; j < v.rows(); ++j) write_row(out, v, j);
  }
  out << "Z\n";
  for (const auto& z : model.user_bias) {
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      out << text::format_exact(z(i)) << '\n';
    }
  }
}

TemporalFactorModel load_model(std::istream& in) {
  // Field views point into these lines; keep them alive while parsing.
  const std::string header = next_line(in, "header");
  auto magic = expect_fields(header, kModelMagic, 2);
  if (field_int(magic[1]) != kModelVersion) {
    throw ParseError("<model>", 0, "unsupported model version");
  }
  const std::string dims_line = next_line(in, "dims");
  auto dims = expect_fields(dims_line, "dims", 5);
  const auto m = field_int(dims[1]);
  const auto n = field_int(dims[2]);
  const auto r = field_int(dims[3]);
  const auto bins = field_int(dims[4]);
  if (m < 0 || n < 0 || r < 1 || bins < 1) {
    throw ParseError("<model>", 0, "invalid model dimensions");
  }

  TemporalFactorModel model;
  const std::string binning_line = next_line(in, "binning");
  auto binning = expect_fields(binning_line, "binning", 4);
  if (binning[1] == "weekday") {
    model.binning = Binning::weekday();
  } else if (binning[1] == "date") {
    model.binning.kind = BinningKind::kDate;
    model.binning.bin_count = static_cast<int>(bins);
  } else {
    throw ParseError("<model>", 0, "unknown binning kind");
  }
  model.binning.origin = field_int(binning[2]);
  model.binning.span = field_int(binning[3]);

  const std::string params_line = next_line(in, "params");
  auto params = expect_fields(params_line, "params", 9);
  FactorParams& p = model.params;
  p.rank = static_cast<int>(field_int(params[1]));
  p.lambda = field_double(params[2]);
  p.xi_u = field_double(params[3]);
  p.xi_v = field_double(params[4]);
  p.xi_z = field_double(params[5]);
  p.bin_count = static_cast<int>(field_int(params[6]));
  p.iterations = static_cast<int>(field_int(params[7]));
  p.seed = static_cast<std::uint64_t>(field_int(params[8]));
  p.binning_kind = model.binning.kind;
  if (p.rank != r || model.binning.bin_count != bins) {
    throw ParseError("<model>", 0, "params disagree with dims");
  }

  expect_marker(in, "U");
  model.user_factors.assign(bins, FactorMatrix(m, r));
  for (auto& u : model.user_factors) read_rows(in, u, "U");
  expect_marker(in, "V");
  model.movie_factors.assign(bins, FactorMatrix(n, r));
  for (auto& v : model.movie_factors) read_rows(in, v, "V");
  expect_marker(in, "Z");
  model.user_bias.assign(bins, Eigen::VectorXd(m));
  for (auto& z : model.user_bias) {
    for (Eigen::Index i = 0; i < m; ++i) {
      z(i) = field_double(text::trim(next_line(in, "Z")));
    }
  }
  return model;
}

}  // namespace raterid
