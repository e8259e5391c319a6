// raterid: attribute anonymous household ratings to household members.
//
//   raterid synth    --config synth.conf --out DIR
//   raterid fit      --train T --households H [--test X] --model OUT
//   raterid classify --train T --households H --test X --classifier NAME ...
//   raterid evaluate --predictions P --households H | --cv ...
//   raterid roc      --train T --households H --test X --classifier NAME ...
//   raterid baseline --size2 N --size3 N --size4 N | --households H
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "raterid/corpus.h"
#include "raterid/errors.h"
#include "raterid/evaluate.h"
#include "raterid/factorize.h"
#include "raterid/generative.h"
#include "raterid/log.h"
#include "raterid/pipeline.h"
#include "raterid/temporal.h"
#include "raterid/text_io.h"

namespace fs = std::filesystem;
using namespace raterid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

const CLI::Range kAtLeastOne(1, std::numeric_limits<int>::max());

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags shared by the commands that fit or load a factor model.
struct FactorFlags {
  FactorParams params;
  std::string binning = "date";

  void attach(CLI::App* cmd) {
    cmd->add_option("--rank", params.rank, "latent dimension r")
        ->check(kAtLeastOne)
        ->capture_default_str();
    cmd->add_option("--lambda", params.lambda, "ridge weight")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--xi-u", params.xi_u, "user factor smoothing")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--xi-v", params.xi_v, "movie factor smoothing")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--xi-z", params.xi_z, "offset smoothing")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--bins", params.bin_count, "number of time bins T")
        ->check(kAtLeastOne)
        ->capture_default_str();
    cmd->add_option("--iterations", params.iterations, "ALS iterations K")
        ->check(kAtLeastOne)
        ->capture_default_str();
    cmd->add_option("--seed", params.seed, "initialization seed")
        ->capture_default_str();
    cmd->add_option("--binning", binning, "date or weekday")
        ->check(CLI::IsMember({"date", "weekday"}))
        ->capture_default_str();
  }

  FactorParams resolve() const {
    FactorParams p = params;
    if (binning == "weekday") {
      p.binning_kind = BinningKind::kWeekday;
      p.bin_count = kDaysPerWeek;
    }
    p.validate();
    return p;
  }
};

// Flags selecting and configuring a classifier.
struct ClassifierFlags {
  std::vector<std::string> classifiers{"gen-day"};
  std::string sigma_scope = "per_user";
  double epsilon = kDefaultSmoothing;
  std::string features = "abcde";
  double lambda1 = 0.01;

  void attach(CLI::App* cmd, bool many) {
    auto* opt = cmd->add_option("--classifier", classifiers,
                                "residual, prior-uniform, prior-bin, prior-day, "
                                "gen-uniform, gen-bin, gen-day or unified");
    opt->delimiter(',')->capture_default_str();
    if (!many) opt->expected(1);
    cmd->add_option("--sigma-scope", sigma_scope, "infinite, global or per_user")
        ->check(CLI::IsMember({"infinite", "global", "per_user"}))
        ->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "prior smoothing")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--features", features,
                    "feature blocks for unified, a subset of abcde")
        ->capture_default_str();
    cmd->add_option("--lambda1", lambda1, "L1 weight for unified")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }

  std::vector<PipelineConfig> resolve(const FactorParams& factors) const {
    FeatureConfig fc;
    fc.weekday = fc.hour = fc.movie_factors = fc.bins = fc.rating = false;
    for (char c : features) {
      switch (c) {
        case 'a': fc.weekday = true; break;
        case 'b': fc.hour = true; break;
        case 'c': fc.movie_factors = true; break;
        case 'd': fc.bins = true; break;
        case 'e': fc.rating = true; break;
        default:
          throw UsageError(std::string("unknown feature block '") + c + "'");
      }
    }
    fc.lambda1 = lambda1;
    std::vector<PipelineConfig> out;
    for (const auto& name : classifiers) {
      PipelineConfig config;
      config.classifier = parse_classifier(name);
      config.factors = factors;
      config.features = fc;
      config.sigma_scope = parse_sigma_scope(sigma_scope);
      config.epsilon = epsilon;
      config.validate();
      out.push_back(config);
    }
    return out;
  }
};

// Writes through a temporary file so that a failed command leaves no
// partial artifact behind.
class Artifact {
 public:
  explicit Artifact(std::string path) : path_(std::move(path)) {
    if (path_.empty() || path_ == "-") return;
    tmp_ = path_ + ".tmp";
    file_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error("cannot write " + path_);
  }
  ~Artifact() {
    if (!tmp_.empty() && !committed_) {
      file_.close();
      std::error_code ignored;
      fs::remove(tmp_, ignored);
    }
  }

  std::ostream& out() { return tmp_.empty() ? std::cout : file_; }

  void commit() {
    if (tmp_.empty()) {
      std::cout.flush();
      if (!std::cout) throw Error("failed writing to stdout");
      return;
    }
    file_.close();
    if (!file_) throw Error("failed writing " + path_);
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream file_;
  bool committed_ = false;
};

TemporalFactorModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model " + path);
  return load_model(in);
}

Dataset read_dataset(const std::string& train, const std::string& households,
                     const std::string& test) {
  return load_dataset(train, households, fs::path(test));
}

// Binds a loaded model to a context; its parameters take precedence over
// the command-line factor flags.
void attach_model(SplitContext& context, std::vector<PipelineConfig>& configs,
                  const std::string& model_path) {
  bool needed = false;
  for (const auto& c : configs) needed = needed || c.needs_model();
  if (model_path.empty()) {
    if (needed) {
      throw UsageError(
          "the selected classifier needs a fitted factor model (--model)");
    }
    return;
  }
  TemporalFactorModel model = read_model(model_path);
  for (auto& c : configs) c.factors = model.params;
  context.set_model(std::move(model));
}

// --- synth ------------------------------------------------------------------

int run_synth(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
  SynthConfig config = parse_synth_config(fs::path(config_path));
  if (seed) config.seed = *seed;
  const Dataset data = synth_generate(config, config.seed);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  Artifact train((dir / "train.tsv").string());
  write_ratings(train.out(), data.train);
  Artifact households((dir / "households.tsv").string());
  write_households(households.out(), data.households);
  Artifact test((dir / "test.tsv").string());
  write_test(test.out(), data.test);
  train.commit();
  households.commit();
  test.commit();
  std::cerr << "synth: " << data.train.size() << " training events, "
            << data.households.size() << " households, " << data.test.size()
            << " test events\n";
  return kExitOk;
}

// --- fit --------------------------------------------------------------------

int run_fit(const std::string& train_path, const std::string& households_path,
            const std::string& test_path, const std::string& model_path,
            const FactorParams& params) {
  const Dataset data = read_dataset(train_path, households_path, test_path);
  std::cout << "iteration\tcost\n";
  const int last_bin =
      (params.binning_kind == BinningKind::kWeekday ? kDaysPerWeek
                                                    : params.bin_count) -
      1;
  const auto model = fit_lowrank_temporal(
      data.train, data.user_count, data.movie_count, params,
      [&](const TemporalFactorModel& m, const FitStep& step) {
        if (step.block == Block::kBiases && step.bin == last_bin) {
          std::cout << step.iteration << '\t'
                    << text::format_exact(cost(m, data.train)) << '\n';
        }
      });
  Artifact out(model_path);
  save_model(out.out(), model);
  out.commit();
  return kExitOk;
}

// --- classify ---------------------------------------------------------------

int run_classify(const std::string& train_path,
                 const std::string& households_path,
                 const std::string& test_path, const std::string& model_path,
                 const std::string& output, const FactorParams& factors,
                 const ClassifierFlags& flags,
                 const std::vector<double>& alphas) {
  const Dataset data = read_dataset(train_path, households_path, test_path);
  auto configs = flags.resolve(factors);
  SplitContext context(data);
  attach_model(context, configs, model_path);
  PipelineConfig config = configs.front();

  Artifact out(output);
  write_predictions_header(out.out());
  if (config.classifier == ClassifierKind::kResidual) {
    for (double alpha : alphas) {
      config.alpha = alpha;
      write_predictions(out.out(), data.test, classify_test(context, config),
                        alpha);
    }
  } else {
    write_predictions(out.out(), data.test, classify_test(context, config));
  }
  out.commit();
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

std::vector<PredictionRow> read_prediction_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_predictions(in, path);
}

int run_evaluate_predictions(const std::string& predictions_path,
                             const std::string& households_path,
                             const std::string& truth_path,
                             std::optional<double> alpha,
                             const std::string& output) {
  auto rows = read_prediction_file(predictions_path);
  const HouseholdMap households = parse_households(fs::path(households_path));
  if (!truth_path.empty()) {
    const auto truth = parse_test(fs::path(truth_path));
    // Predictions hold one block of rows per alpha, each aligned with truth.
    if (truth.empty() || rows.size() % truth.size() != 0) {
      throw InputError("predictions do not align with the truth file");
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& t = truth[k % truth.size()];
      auto& e = rows[k].event;
      if (e.household != t.household || e.movie != t.movie ||
          e.timestamp != t.timestamp) {
        throw InputError("prediction row " + std::to_string(k + 1) +
                         " does not match the truth file");
      }
      e.true_user = t.true_user;
    }
  }

  // Group rows by alpha; the report covers the selected set.
  std::map<std::optional<double>, std::vector<const PredictionRow*>> sets;
  for (const auto& row : rows) sets[row.alpha].push_back(&row);
  if (sets.empty()) throw InputError("no predictions in " + predictions_path);
  auto chosen = sets.begin();
  if (alpha) {
    chosen = sets.find(*alpha);
    if (chosen == sets.end()) {
      throw UsageError("no predictions for alpha " + text::format_exact(*alpha));
    }
  }
  auto unpack = [](const std::vector<const PredictionRow*>& set,
                   std::vector<TestEvent>& events,
                   std::vector<UserId>& predicted,
                   std::vector<std::vector<double>>& posteriors) {
    for (const auto* row : set) {
      events.push_back(row->event);
      predicted.push_back(row->predicted);
      if (!row->posterior.empty()) posteriors.push_back(row->posterior);
    }
    if (posteriors.size() != events.size()) posteriors.clear();
  };

  std::vector<TestEvent> events;
  std::vector<UserId> predicted;
  std::vector<std::vector<double>> posteriors;
  unpack(chosen->second, events, predicted, posteriors);
  AttributionReport report =
      build_report("predictions", events, predicted, std::move(posteriors),
                   households);
  if (sets.size() > 1) {
    for (const auto& [a, set] : sets) {
      std::vector<TestEvent> ev;
      std::vector<UserId> pr;
      std::vector<std::vector<double>> po;
      unpack(set, ev, pr, po);
      report.roc.push_back(roc_point(ev, pr, households, a.value_or(0.0)));
    }
  }
  report.annotations.push_back(challenge_reference_annotation());

  Artifact out(output);
  write_report(out.out(), report);
  out.commit();
  std::cerr << summary_line(report) << '\n';
  return kExitOk;
}

int run_evaluate_cv(const std::string& train_path,
                    const std::string& households_path,
                    const FactorParams& factors, const ClassifierFlags& flags,
                    const std::vector<std::uint64_t>& seeds, double fraction,
                    const std::vector<double>& grid, const std::string& output) {
  const Dataset data = read_dataset(train_path, households_path, "");
  auto configs = flags.resolve(factors);
  for (auto& c : configs) c.roc_grid = grid;
  const auto results = run_cv(data, configs, fraction, seeds);
  Artifact out(output);
  write_cv_report(out.out(), results);
  out.commit();
  for (const auto& r : results) {
    std::cerr << r.pipeline << " P=" << format_mean_std(r.p) << '\n';
  }
  return kExitOk;
}

void export_histograms(const std::string& dir, const std::string& train_path,
                       const std::string& households_path,
                       const std::string& model_path) {
  const Dataset data = read_dataset(train_path, households_path, "");
  fs::create_directories(dir);
  Artifact weekday((fs::path(dir) / "weekday_histogram.tsv").string());
  write_weekday_histogram(weekday.out(), data.train, data.households);
  Artifact tv((fs::path(dir) / "tv_histogram.tsv").string());
  write_tv_histogram(tv.out(), data.train, data.households);
  weekday.commit();
  tv.commit();
  if (!model_path.empty()) {
    const auto model = read_model(model_path);
    Artifact residual((fs::path(dir) / "residual_histogram.tsv").string());
    write_residual_histogram(residual.out(), data.train, model,
                             data.households);
    residual.commit();
  }
}

// --- roc --------------------------------------------------------------------

std::vector<double> default_grid(ClassifierKind kind, std::size_t points,
                                 double max_alpha) {
  return kind == ClassifierKind::kResidual
             ? linear_grid(0.0, max_alpha, points)
             : linear_grid(0.0, 1.0, points);
}

int run_roc(const std::string& train_path, const std::string& households_path,
            const std::string& test_path, const std::string& model_path,
            const FactorParams& factors, const ClassifierFlags& flags,
            std::vector<double> grid, std::size_t points, double max_alpha,
            const std::vector<std::uint64_t>& seeds, double fraction,
            const std::string& output) {
  const bool cv = !seeds.empty();
  const Dataset data =
      read_dataset(train_path, households_path, cv ? "" : test_path);
  auto configs = flags.resolve(factors);
  for (auto& c : configs) {
    c.roc_grid = grid.empty() ? default_grid(c.classifier, points, max_alpha)
                              : grid;
  }
  Artifact out(output);
  if (cv) {
    const auto results = run_cv(data, configs, fraction, seeds);
    for (const auto& r : results) {
      out.out() << "## roc " << r.pipeline << '\n'
                << "parameter\ttpr_first\ttpr_rest\ttpr_first_std\t"
                   "tpr_rest_std\n";
      for (const auto& p : r.roc) {
        out.out() << text::format_fixed(p.parameter, 6) << '\t'
                  << text::format_fixed(p.tpr_first.mean, 6) << '\t'
                  << text::format_fixed(p.tpr_rest.mean, 6) << '\t'
                  << text::format_fixed(p.tpr_first.std_dev, 6) << '\t'
                  << text::format_fixed(p.tpr_rest.std_dev, 6) << '\n';
      }
    }
  } else {
    if (test_path.empty()) throw UsageError("roc needs --test or --cv-seeds");
    SplitContext context(data);
    attach_model(context, configs, model_path);
    for (const auto& config : configs) {
      const auto attribution = classify_test(context, config);
      out.out() << "## roc " << config.name() << '\n'
                << "parameter\ttpr_first\ttpr_rest\n";
      for (const auto& p : roc_for(context, config, attribution)) {
        out.out() << text::format_fixed(p.parameter, 6) << '\t'
                  << (p.tpr_first ? text::format_fixed(*p.tpr_first, 6) : "NA")
                  << '\t'
                  << (p.tpr_rest ? text::format_fixed(*p.tpr_rest, 6) : "NA")
                  << '\n';
      }
    }
  }
  out.commit();
  return kExitOk;
}

// --- baseline ---------------------------------------------------------------

int run_baseline(std::size_t size2, std::size_t size3, std::size_t size4,
                 const std::string& households_path) {
  std::map<std::size_t, std::size_t> counts;
  if (!households_path.empty()) {
    for (const auto& [id, h] : parse_households(fs::path(households_path))) {
      ++counts[h.size()];
    }
  } else {
    counts = {{2, size2}, {3, size3}, {4, size4}};
  }
  std::cout << "random_baseline\t" << text::format_fixed(random_baseline(counts), 6)
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute household ratings to household members"};
  app.require_subcommand(1);
  app.set_config("--run-config", "", "read flags from an INI/TOML file");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string synth_config, synth_out = ".";
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", synth_config, "generator key=value file")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "output directory")->capture_default_str();
  synth->add_option("--seed", synth_seed, "override the config seed");

  // Shared paths.
  std::string train, households, test, model, output, predictions, truth;
  auto data_options = [&](CLI::App* cmd, bool need_test) {
    cmd->add_option("--train", train, "training ratings")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--households", households, "household membership")
        ->required()
        ->check(CLI::ExistingFile);
    auto* t = cmd->add_option("--test", test, "household test events")
                  ->check(CLI::ExistingFile);
    if (need_test) t->required();
  };

  // fit
  auto* fit = app.add_subcommand("fit", "fit the temporal factor model");
  FactorFlags fit_flags;
  data_options(fit, false);
  fit->add_option("--model", model, "output model file")->required();
  fit_flags.attach(fit);

  // classify
  auto* classify = app.add_subcommand("classify", "attribute test events");
  FactorFlags classify_factors;
  ClassifierFlags classify_flags;
  std::vector<double> alphas{1.0};
  data_options(classify, true);
  classify->add_option("--model", model, "fitted factor model")
      ->check(CLI::ExistingFile);
  classify->add_option("--output", output, "predictions file (default stdout)");
  classify->add_option("--alpha", alphas, "residual rule alpha grid")
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  classify_factors.attach(classify);
  classify_flags.attach(classify, false);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score predictions or run CV");
  FactorFlags eval_factors;
  ClassifierFlags eval_flags;
  bool eval_cv = false;
  std::vector<std::uint64_t> eval_seeds(std::begin(kDefaultCvSeeds),
                                        std::end(kDefaultCvSeeds));
  double eval_fraction = kDefaultHoldoutFraction;
  std::optional<double> eval_alpha;
  std::string histogram_dir;
  std::vector<double> eval_grid;
  evaluate->add_option("--predictions", predictions, "classify output")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--truth", truth, "test file carrying true users")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--train", train, "training ratings")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--households", households, "household membership")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--model", model, "fitted model (residual histogram)")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--output", output, "report file (default stdout)");
  evaluate->add_option("--alpha", eval_alpha, "alpha set to report");
  evaluate->add_flag("--cv", eval_cv, "cross-validate the classifiers");
  evaluate->add_option("--seeds", eval_seeds, "CV split seeds")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--fraction", eval_fraction, "CV holdout fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  evaluate->add_option("--roc-grid", eval_grid, "CV ROC sweep values")
      ->delimiter(',');
  evaluate->add_option("--export-histograms", histogram_dir,
                       "write weekday, TV and residual histograms here");
  eval_factors.attach(evaluate);
  eval_flags.attach(evaluate, true);

  // roc
  auto* roc = app.add_subcommand("roc", "sweep alpha or a posterior threshold");
  FactorFlags roc_factors;
  ClassifierFlags roc_flags;
  std::vector<double> roc_grid;
  std::size_t roc_points = 50;
  double roc_max_alpha = 5.0;
  std::vector<std::uint64_t> roc_seeds;
  double roc_fraction = kDefaultHoldoutFraction;
  data_options(roc, false);
  roc->add_option("--model", model, "fitted factor model")
      ->check(CLI::ExistingFile);
  roc->add_option("--output", output, "ROC table (default stdout)");
  roc->add_option("--grid", roc_grid, "explicit sweep values")->delimiter(',');
  roc->add_option("--points", roc_points, "grid size")
      ->check(kAtLeastOne)
      ->capture_default_str();
  roc->add_option("--max-alpha", roc_max_alpha, "alpha grid upper end")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  roc->add_option("--cv-seeds", roc_seeds, "cross-validate with these seeds")
      ->delimiter(',');
  roc->add_option("--fraction", roc_fraction, "CV holdout fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  roc_factors.attach(roc);
  roc_flags.attach(roc, true);

  // baseline
  auto* baseline = app.add_subcommand("baseline", "random-guess misclassification");
  std::size_t size2 = 0, size3 = 0, size4 = 0;
  std::string baseline_households;
  baseline->add_option("--size2", size2, "households of size 2");
  baseline->add_option("--size3", size3, "households of size 3");
  baseline->add_option("--size4", size4, "households of size 4");
  baseline->add_option("--households", baseline_households,
                       "count sizes from a household file")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  log::set_level(verbose ? log::Level::kInfo : log::Level::kWarning);

  try {
    if (*synth) return run_synth(synth_config, synth_out, synth_seed);
    if (*fit) {
      return run_fit(train, households, test, model, fit_flags.resolve());
    }
    if (*classify) {
      return run_classify(train, households, test, model, output,
                          classify_factors.resolve(), classify_flags, alphas);
    }
    if (*evaluate) {
      if (!histogram_dir.empty()) {
        if (train.empty()) throw UsageError("--export-histograms needs --train");
        export_histograms(histogram_dir, train, households, model);
      }
      if (eval_cv) {
        if (train.empty()) throw UsageError("--cv needs --train");
        return run_evaluate_cv(train, households, eval_factors.resolve(),
                               eval_flags, eval_seeds, eval_fraction,
                               eval_grid, output);
      }
      if (predictions.empty()) {
        if (!histogram_dir.empty()) return kExitOk;
        throw UsageError("evaluate needs --predictions or --cv");
      }
      return run_evaluate_predictions(predictions, households, truth,
                                      eval_alpha, output);
    }
    if (*roc) {
      return run_roc(train, households, test, model, roc_factors.resolve(),
                     roc_flags, roc_grid, roc_points, roc_max_alpha, roc_seeds,
                     roc_fraction, output);
    }
    if (*baseline) {
      return run_baseline(size2, size3, size4, baseline_households);
    }
  } catch (const UsageError& e) {
    std::cerr << "raterid: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "raterid: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "raterid: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
