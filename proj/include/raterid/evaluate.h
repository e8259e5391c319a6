#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raterid/corpus.h"
#include "raterid/factorize.h"

namespace raterid {

// Per-member counts for one household: TP_i and T_i.
struct MemberTally {
  UserId member = 0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

struct HouseholdTally {
  HouseholdId household = 0;
  std::vector<MemberTally> members;  // household order

  std::size_t correct() const;
  std::size_t total() const;
};

using Tallies = std::map<HouseholdId, HouseholdTally>;

// Counts predictions against truth. predictions[k] belongs to test[k]; every
// test event must carry true_user (InputError otherwise). Every household
// appears, including those without test events.
Tallies tally(std::span<const TestEvent> test, std::span<const UserId> predicted,
              const HouseholdMap& households);

// TP_i / T_i; nullopt when T_i = 0.
std::optional<double> tpr(const HouseholdTally& tally, UserId member);

// 1 - sum TP_i / sum T_i; nullopt without test events.
std::optional<double> misclassification(const HouseholdTally& tally);

// Unweighted household means of P(Alg, H), overall and by household size.
struct Aggregate {
  std::optional<double> p;
  std::optional<double> p2;
  std::optional<double> p3;
  std::optional<double> p4;
  std::size_t households = 0;  // households with a defined P(Alg, H)
};

Aggregate aggregate(const Tallies& tallies);

// Expected P of a uniform random guess: sum_s count_s (1 - 1/s) / sum_s
// count_s. counts maps household size to number of households. Throws
// InputError when the total is zero or a size is below 1.
double random_baseline(const std::map<std::size_t, std::size_t>& counts);
double random_baseline(std::size_t size2, std::size_t size3,
                       std::size_t size4);

// --- ROC --------------------------------------------------------------------

// One operating point: household means of TPR of the first member and of
// the pooled remaining members (fraction of their events attributed to any
// non-first member). Households lacking the respective events are skipped.
struct RocPoint {
  double parameter = 0.0;
  std::optional<double> tpr_first;
  std::optional<double> tpr_rest;
};

RocPoint roc_point(std::span<const TestEvent> test,
                   std::span<const UserId> predicted,
                   const HouseholdMap& households, double parameter);

// Residual rule swept over alpha.
std::vector<RocPoint> roc_sweep_residual(const TemporalFactorModel& model,
                                         std::span<const TestEvent> test,
                                         const HouseholdMap& households,
                                         std::span<const double> alphas);

// Probabilistic rule swept over a threshold tau: predict the first member iff
// its posterior >= tau, otherwise the most probable other member.
// posteriors[k] is in household member order for test[k].
std::vector<RocPoint> roc_sweep_threshold(
    std::span<const TestEvent> test,
    std::span<const std::vector<double>> posteriors,
    const HouseholdMap& households, std::span<const double> thresholds);

// Evenly spaced grid of `points` values on [low, high].
std::vector<double> linear_grid(double low, double high, std::size_t points);

// --- AUC --------------------------------------------------------------------

// 1 - a / b, a = pairs (j, j') with score_j > score_j', j' positive and j
// negative; b = positives * negatives. Tied scores do not count toward a.
// nullopt when b = 0.
std::optional<double> auc(std::span<const double> scores,
                          std::span<const bool> positive);

struct MemberAuc {
  HouseholdId household = 0;
  UserId member = 0;
  std::optional<double> value;
};

struct AucSummary {
  std::vector<MemberAuc> values;
  std::optional<double> mean;  // over defined values
};

// Per (member, household) AUC of the member's posterior over the household's
// test events.
AucSummary auc_by_member(std::span<const TestEvent> test,
                         std::span<const std::vector<double>> posteriors,
                         const HouseholdMap& households);

// --- Reports ----------------------------------------------------------------

struct AttributionReport {
  std::string classifier;
  std::vector<TestEvent> events;
  std::vector<UserId> predicted;
  std::vector<std::vector<double>> posteriors;  // empty or one per event
  HouseholdMap households;
  Tallies tallies;
  Aggregate summary;
  std::vector<RocPoint> roc;
  std::optional<AucSummary> auc;
  std::vector<std::string> annotations;
};

// Tallies, aggregates and (when posteriors are given) AUC.
AttributionReport build_report(std::string classifier,
                               std::span<const TestEvent> test,
                               std::span<const UserId> predicted,
                               std::vector<std::vector<double>> posteriors,
                               const HouseholdMap& households);

// Sections per_event, per_household, aggregate, roc, auc, separated by
// "## <name>" lines, followed by the summary line. NA marks undefined values.
void write_report(std::ostream& out, const AttributionReport& report);

// "summary classifier=... P=... P2=... P3=... P4=... auc=... households=..."
std::string summary_line(const AttributionReport& report);

// --- mean +- std --------------------------------------------------------------

struct MeanStd {
  double mean = 0.0;
  double std_dev = 0.0;  // sample (n - 1) convention; 0 for one value
  std::size_t count = 0;
};

// Values that are nullopt are skipped. All missing gives count = 0.
MeanStd mean_std(std::span<const std::optional<double>> values);

// "0.0966 ± 0.0072"; NA when count = 0.
std::string format_mean_std(const MeanStd& value, int decimals = 4);

// Parses "<mean> ± <std>" (also "+-" and "+/-"). Throws InputError.
MeanStd parse_mean_std(const std::string& text);

// Best results reported for the original challenge, for annotating reports:
// "reference challenge P=0.0406 P2=0.0413 P3=0.0268 P4=0.0463".
std::string challenge_reference_annotation();

// key=value pairs of an annotation or summary line, split on blanks; words
// without '=' are ignored.
std::map<std::string, std::string> parse_annotation(const std::string& line);

}  // namespace raterid
