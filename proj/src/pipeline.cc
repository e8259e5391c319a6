#include "raterid/pipeline.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "raterid/errors.h"
#include "raterid/log.h"
#include "raterid/text_io.h"

namespace raterid {

namespace {

struct KindName {
  ClassifierKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ClassifierKind::kResidual, "residual"},
    {ClassifierKind::kPriorUniform, "prior-uniform"},
    {ClassifierKind::kPriorBin, "prior-bin"},
    {ClassifierKind::kPriorDay, "prior-day"},
    {ClassifierKind::kGenUniform, "gen-uniform"},
    {ClassifierKind::kGenBin, "gen-bin"},
    {ClassifierKind::kGenDay, "gen-day"},
    {ClassifierKind::kUnified, "unified"},
};

bool is_prior(ClassifierKind kind) {
  return kind == ClassifierKind::kPriorUniform ||
         kind == ClassifierKind::kPriorBin || kind == ClassifierKind::kPriorDay;
}

bool is_generative(ClassifierKind kind) {
  return kind == ClassifierKind::kGenUniform ||
         kind == ClassifierKind::kGenBin || kind == ClassifierKind::kGenDay;
}

PriorMode mode_of(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kPriorBin:
    case ClassifierKind::kGenBin:
      return PriorMode::kBin;
    case ClassifierKind::kPriorDay:
    case ClassifierKind::kGenDay:
      return PriorMode::kDay;
    default:
      return PriorMode::kUniform;
  }
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  for (const auto& entry : kKindNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

ClassifierKind parse_classifier(std::string_view name) {
  for (const auto& entry : kKindNames) {
    if (name == entry.name) return entry.kind;
  }
  throw ConfigError("unknown classifier '" + std::string(name) + "'");
}

std::string to_string(SigmaScope scope) {
  switch (scope) {
    case SigmaScope::kInfinite:
      return "infinite";
    case SigmaScope::kGlobal:
      return "global";
    case SigmaScope::kPerUser:
      return "per_user";
  }
  return "unknown";
}

SigmaScope parse_sigma_scope(std::string_view name) {
  if (name == "infinite") return SigmaScope::kInfinite;
  if (name == "global") return SigmaScope::kGlobal;
  if (name == "per_user" || name == "per-user") return SigmaScope::kPerUser;
  throw ConfigError("unknown sigma scope '" + std::string(name) + "'");
}

std::string PipelineConfig::name() const {
  return label.empty() ? to_string(classifier) : label;
}

bool PipelineConfig::needs_model() const {
  if (classifier == ClassifierKind::kResidual) return true;
  if (is_generative(classifier)) return sigma_scope != SigmaScope::kInfinite;
  if (classifier == ClassifierKind::kUnified) return features.movie_factors;
  return false;
}

void PipelineConfig::validate() const {
  factors.validate();
  if (classifier == ClassifierKind::kUnified) features.validate();
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  for (double v : roc_grid) {
    if (!(v >= 0.0)) throw ConfigError("ROC grid values must be non-negative");
  }
}

// --- SplitContext ---------------------------------------------------------------

SplitContext::SplitContext(const Dataset& dataset) : dataset_(dataset) {}

const TemporalFactorModel& SplitContext::model(const FactorParams& params) {
  for (const auto& m : models_) {
    if (m->params == params) return *m;
  }
  log::info("fitting factor model");
  models_.push_back(std::make_unique<TemporalFactorModel>(fit_lowrank_temporal(
      dataset_.train, dataset_.user_count, dataset_.movie_count, params)));
  return *models_.back();
}

void SplitContext::set_model(TemporalFactorModel model) {
  if (model.user_count() < dataset_.user_count ||
      model.movie_count() < dataset_.movie_count) {
    throw InputError("factor model is smaller than the dataset's id space");
  }
  std::erase_if(models_, [&](const auto& m) { return m->params == model.params; });
  models_.push_back(std::make_unique<TemporalFactorModel>(std::move(model)));
}

Binning SplitContext::binning(const FactorParams& params) const {
  for (const auto& m : models_) {
    if (m->params == params) return m->binning;
  }
  return params.binning_kind == BinningKind::kWeekday
             ? Binning::weekday()
             : Binning::from_events(dataset_.train, params.bin_count);
}

const std::map<HouseholdId, TemporalPriors>& SplitContext::priors(
    const FactorParams& params, double epsilon) {
  const auto key = std::make_pair(binning(params), epsilon);
  for (const auto& [k, value] : priors_) {
    if (k == key) return value;
  }
  priors_.emplace_back(key, fit_priors_all(dataset_.train, dataset_.households,
                                           epsilon, key.first));
  return priors_.back().second;
}

const SigmaModel& SplitContext::sigma(const FactorParams& params,
                                      SigmaScope scope) {
  const auto key = std::make_pair(params, scope);
  for (const auto& [k, value] : sigmas_) {
    if (k == key) return value;
  }
  SigmaModel s;
  if (scope == SigmaScope::kInfinite) {
    s.scope = scope;
  } else {
    s = estimate_sigma(dataset_.train, model(params), scope);
  }
  sigmas_.emplace_back(key, std::move(s));
  return sigmas_.back().second;
}

// --- Classification ---------------------------------------------------------------

namespace {

std::vector<double> normalized(std::vector<double> scores) {
  double total = 0.0;
  for (double v : scores) total += v;
  if (!(total > 0.0)) {
    std::fill(scores.begin(), scores.end(),
              1.0 / static_cast<double>(scores.size()));
    return scores;
  }
  for (double& v : scores) v /= total;
  return scores;
}

const Household& household_for(const Dataset& dataset, const TestEvent& e) {
  auto it = dataset.households.find(e.household);
  if (it == dataset.households.end()) {
    throw InputError("test event of unknown household " +
                     std::to_string(e.household));
  }
  return it->second;
}

}  // namespace

Attribution classify_test(SplitContext& context, const PipelineConfig& config) {
  config.validate();
  const Dataset& data = context.dataset();
  const auto& test = data.test;
  Attribution out;
  out.predicted.reserve(test.size());

  if (config.classifier == ClassifierKind::kResidual) {
    const auto& model = context.model(config.factors);
    for (const auto& e : test) {
      out.predicted.push_back(classify_by_residual(
          model, household_for(data, e), e, config.alpha));
    }
    return out;
  }

  if (config.classifier == ClassifierKind::kUnified) {
    const TemporalFactorModel* model =
        config.features.movie_factors ? &context.model(config.factors) : nullptr;
    const FeatureSpace space(config.features, model,
                             context.binning(config.factors));
    std::map<HouseholdId, std::vector<LogitModel>> fitted;
    for (const auto& e : test) {
      auto it = fitted.find(e.household);
      if (it == fitted.end()) {
        it = fitted
                 .emplace(e.household,
                          fit_household(data.train, household_for(data, e),
                                        space))
                 .first;
      }
      out.predicted.push_back(classify_unified(it->second, space, e));
      out.posteriors.push_back(
          normalized(unified_probabilities(it->second, space, e)));
    }
    return out;
  }

  const auto& priors = context.priors(config.factors, config.epsilon);
  const PriorMode mode = mode_of(config.classifier);
  if (is_prior(config.classifier)) {
    for (const auto& e : test) {
      const TemporalPriors& q = priors.at(household_for(data, e).id);
      out.predicted.push_back(classify_prior(q, mode, e));
      out.posteriors.push_back(q.conditional(mode, e.timestamp));
    }
    return out;
  }

  const SigmaModel& sigma = context.sigma(config.factors, config.sigma_scope);
  static const TemporalFactorModel kNoModel;
  const TemporalFactorModel& model = config.sigma_scope == SigmaScope::kInfinite
                                         ? kNoModel
                                         : context.model(config.factors);
  for (const auto& e : test) {
    const TemporalPriors& q = priors.at(household_for(data, e).id);
    out.predicted.push_back(classify_generative(e, model, q, mode, sigma));
    out.posteriors.push_back(posterior(e, model, q, mode, sigma));
  }
  return out;
}

std::vector<RocPoint> roc_for(SplitContext& context,
                              const PipelineConfig& config,
                              const Attribution& attribution) {
  if (config.roc_grid.empty()) return {};
  const Dataset& data = context.dataset();
  if (config.classifier == ClassifierKind::kResidual) {
    return roc_sweep_residual(context.model(config.factors), data.test,
                              data.households, config.roc_grid);
  }
  return roc_sweep_threshold(data.test, attribution.posteriors,
                             data.households, config.roc_grid);
}

AttributionReport evaluate_pipeline(SplitContext& context,
                                    const PipelineConfig& config) {
  Attribution attribution = classify_test(context, config);
  auto roc = roc_for(context, config, attribution);
  const Dataset& data = context.dataset();
  AttributionReport report =
      build_report(config.name(), data.test, attribution.predicted,
                   std::move(attribution.posteriors), data.households);
  report.roc = std::move(roc);
  report.annotations.push_back(challenge_reference_annotation());
  return report;
}

// --- Cross-validation -------------------------------------------------------------

std::vector<CvResult> run_cv(const Dataset& dataset,
                             std::span<const PipelineConfig> pipelines,
                             double fraction,
                             std::span<const std::uint64_t> seeds) {
  for (const auto& config : pipelines) config.validate();
  std::vector<CvResult> results(pipelines.size());
  // [pipeline][grid point] -> per-split TPR values
  std::vector<std::vector<std::vector<std::optional<double>>>> roc_first(
      pipelines.size()),
      roc_rest(pipelines.size());
  for (std::size_t k = 0; k < pipelines.size(); ++k) {
    results[k].pipeline = pipelines[k].name();
    results[k].seeds.assign(seeds.begin(), seeds.end());
    roc_first[k].resize(pipelines[k].roc_grid.size());
    roc_rest[k].resize(pipelines[k].roc_grid.size());
  }

  for (std::uint64_t seed : seeds) {
    const Dataset split = cv_split(dataset, fraction, seed);
    SplitContext context(split);
    for (std::size_t k = 0; k < pipelines.size(); ++k) {
      log::info("cv seed " + std::to_string(seed) + ": " + pipelines[k].name());
      const AttributionReport report = evaluate_pipeline(context, pipelines[k]);
      results[k].splits.push_back(report.summary);
      results[k].split_auc.push_back(report.auc ? report.auc->mean
                                                : std::nullopt);
      for (std::size_t g = 0; g < report.roc.size(); ++g) {
        roc_first[k][g].push_back(report.roc[g].tpr_first);
        roc_rest[k][g].push_back(report.roc[g].tpr_rest);
      }
    }
  }

  for (std::size_t k = 0; k < pipelines.size(); ++k) {
    CvResult& r = results[k];
    auto collect = [&](auto member) {
      std::vector<std::optional<double>> values;
      for (const auto& a : r.splits) values.push_back(a.*member);
      return mean_std(values);
    };
    r.p = collect(&Aggregate::p);
    r.p2 = collect(&Aggregate::p2);
    r.p3 = collect(&Aggregate::p3);
    r.p4 = collect(&Aggregate::p4);
    r.auc = mean_std(r.split_auc);
    for (std::size_t g = 0; g < pipelines[k].roc_grid.size(); ++g) {
      r.roc.push_back({pipelines[k].roc_grid[g], mean_std(roc_first[k][g]),
                       mean_std(roc_rest[k][g])});
    }
  }
  return results;
}

// --- Predictions file ------------------------------------------------------------

void write_predictions_header(std::ostream& out) {
  out << "household\tmovie\ttimestamp\trating\ttrue_user\tpredicted\talpha\t"
         "posterior\n";
}

void write_predictions(std::ostream& out, std::span<const TestEvent> test,
                       const Attribution& attribution,
                       std::optional<double> alpha) {
  if (attribution.predicted.size() != test.size()) {
    throw InputError("prediction count differs from test events");
  }
  for (std::size_t k = 0; k < test.size(); ++k) {
    const auto& e = test[k];
    out << e.household << '\t' << e.movie << '\t' << e.timestamp << '\t'
        << text::format_exact(e.rating) << '\t'
        << (e.true_user ? std::to_string(*e.true_user) : "NA") << '\t'
        << attribution.predicted[k] << '\t'
        << (alpha ? text::format_exact(*alpha) : "NA") << '\t';
    if (attribution.posteriors.empty()) {
      out << "NA";
    } else {
      const auto& post = attribution.posteriors[k];
      for (std::size_t m = 0; m < post.size(); ++m) {
        out << (m ? "," : "") << text::format_exact(post[m]);
      }
    }
    out << '\n';
  }
}

std::vector<PredictionRow> read_predictions(std::istream& in,
                                            const std::string& source) {
  std::vector<PredictionRow> rows;
  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  auto int_field = [&](std::string_view f) {
    auto v = text::parse_int(f);
    if (!v) throw ParseError(source, line_number, "bad integer '" + std::string(f) + "'");
    return *v;
  };
  auto real_field = [&](std::string_view f) {
    auto v = text::parse_double(f);
    if (!v) throw ParseError(source, line_number, "bad number '" + std::string(f) + "'");
    return *v;
  };
  while (std::getline(in, line)) {
    ++line_number;
    if (text::is_blank_or_comment(line)) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("household", 0) == 0) continue;
    }
    const auto fields = text::split_fields(line, text::Delimiter::kTab);
    if (fields.size() != 8) {
      throw ParseError(source, line_number, "expected 8 tab-separated fields");
    }
    PredictionRow row;
    row.event.household = int_field(fields[0]);
    row.event.movie = int_field(fields[1]);
    row.event.timestamp = int_field(fields[2]);
    row.event.rating = real_field(fields[3]);
    if (fields[4] != "NA") row.event.true_user = int_field(fields[4]);
    row.predicted = int_field(fields[5]);
    if (fields[6] != "NA") row.alpha = real_field(fields[6]);
    if (fields[7] != "NA") {
      std::string_view rest = fields[7];
      while (true) {
        const auto comma = rest.find(',');
        row.posterior.push_back(real_field(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_cv_report(std::ostream& out, std::span<const CvResult> results) {
  out << "pipeline\tmetric\tvalue\tsplits\n";
  for (const auto& r : results) {
    const std::pair<const char*, const MeanStd*> metrics[] = {
        {"P", &r.p}, {"P2", &r.p2}, {"P3", &r.p3}, {"P4", &r.p4},
        {"auc", &r.auc}};
    for (const auto& [name, value] : metrics) {
      out << r.pipeline << '\t' << name << '\t' << format_mean_std(*value)
          << '\t' << value->count << '\n';
    }
  }
  for (const auto& r : results) {
    if (r.roc.empty()) continue;
    out << "## roc " << r.pipeline << '\n';
    out << "parameter\ttpr_first\ttpr_rest\n";
    for (const auto& point : r.roc) {
      out << text::format_fixed(point.parameter, 6) << '\t'
          << format_mean_std(point.tpr_first) << '\t'
          << format_mean_std(point.tpr_rest) << '\n';
    }
  }
}

}  // namespace raterid
