#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "raterid/corpus.h"
#include "raterid/evaluate.h"
#include "raterid/factorize.h"
#include "raterid/generative.h"
#include "raterid/temporal.h"
#include "raterid/unified.h"

namespace raterid {

enum class ClassifierKind {
  kResidual,
  kPriorUniform,
  kPriorBin,
  kPriorDay,
  kGenUniform,
  kGenBin,
  kGenDay,
  kUnified,
};

// "residual", "prior-uniform", ..., "gen-day", "unified".
std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view name);  // ConfigError

std::string to_string(SigmaScope scope);               // infinite|global|per_user
SigmaScope parse_sigma_scope(std::string_view name);   // ConfigError

struct PipelineConfig {
  ClassifierKind classifier = ClassifierKind::kGenDay;
  FactorParams factors;
  FeatureConfig features;
  SigmaScope sigma_scope = SigmaScope::kPerUser;
  double epsilon = kDefaultSmoothing;
  double alpha = 1.0;
  // Sweep values for ROC: alpha for the residual rule, a posterior threshold
  // otherwise. Empty skips the ROC.
  std::vector<double> roc_grid;
  // Label used in reports; defaults to the classifier name.
  std::string label;

  std::string name() const;
  // True when the classifier reads the factor model.
  bool needs_model() const;
  void validate() const;  // ConfigError
};

// Per-event output of a classifier over a test set.
struct Attribution {
  std::vector<UserId> predicted;
  // Member-order probabilities per event; empty for the residual rule.
  std::vector<std::vector<double>> posteriors;
};

// Fitted state for one training set, shared by every classifier evaluated
// on it. Models and priors are fitted on first use and cached.
class SplitContext {
 public:
  explicit SplitContext(const Dataset& dataset);

  const Dataset& dataset() const { return dataset_; }

  // Fits (or reuses) the temporal factor model for these parameters.
  const TemporalFactorModel& model(const FactorParams& params);
  // Supplies an already fitted model (e.g. loaded from disk) for its params.
  void set_model(TemporalFactorModel model);

  // Binning used by the priors and feature (d) for these parameters; the
  // same one the factor model is fitted with.
  Binning binning(const FactorParams& params) const;

  const std::map<HouseholdId, TemporalPriors>& priors(
      const FactorParams& params, double epsilon);

  const SigmaModel& sigma(const FactorParams& params, SigmaScope scope);

 private:
  const Dataset& dataset_;
  std::vector<std::unique_ptr<TemporalFactorModel>> models_;
  std::vector<std::pair<std::pair<Binning, double>,
                        std::map<HouseholdId, TemporalPriors>>>
      priors_;
  std::vector<std::pair<std::pair<FactorParams, SigmaScope>, SigmaModel>>
      sigmas_;
};

// Runs the configured classifier over context.dataset().test.
Attribution classify_test(SplitContext& context, const PipelineConfig& config);

// ROC points for the configured classifier (empty when roc_grid is empty).
std::vector<RocPoint> roc_for(SplitContext& context,
                              const PipelineConfig& config,
                              const Attribution& attribution);

// classify_test + build_report + ROC. Test events must carry true_user.
AttributionReport evaluate_pipeline(SplitContext& context,
                                    const PipelineConfig& config);

// One pipeline's cross-validated metrics.
struct CvRocPoint {
  double parameter = 0.0;
  MeanStd tpr_first;
  MeanStd tpr_rest;
};

struct CvResult {
  std::string pipeline;
  std::vector<std::uint64_t> seeds;
  std::vector<Aggregate> splits;  // seed order
  std::vector<std::optional<double>> split_auc;
  MeanStd p, p2, p3, p4, auc;
  std::vector<CvRocPoint> roc;
};

// For each seed: cv_split(dataset, fraction, seed), fit on the reduced train,
// classify the held-out events, evaluate. Every pipeline sees the same
// splits. Metrics are reported as mean and sample std across splits.
std::vector<CvResult> run_cv(const Dataset& dataset,
                             std::span<const PipelineConfig> pipelines,
                             double fraction,
                             std::span<const std::uint64_t> seeds);

inline constexpr std::uint64_t kDefaultCvSeeds[] = {1, 2, 3, 4, 5};

// One row of a predictions file.
struct PredictionRow {
  TestEvent event;
  UserId predicted = 0;
  std::optional<double> alpha;  // residual rule sweeps
  std::vector<double> posterior;  // empty when not available
};

// Columns household, movie, timestamp, rating, true_user, predicted, alpha,
// posterior (comma-separated member probabilities); NA for missing values.
void write_predictions_header(std::ostream& out);
void write_predictions(std::ostream& out, std::span<const TestEvent> test,
                       const Attribution& attribution,
                       std::optional<double> alpha = std::nullopt);
std::vector<PredictionRow> read_predictions(std::istream& in,
                                            const std::string& source);

// "pipeline  metric  mean ± std" rows, then ROC tables.
void write_cv_report(std::ostream& out, std::span<const CvResult> results);

}  // namespace raterid
