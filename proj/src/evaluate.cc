#include "raterid/evaluate.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "raterid/errors.h"
#include "raterid/text_io.h"

namespace raterid {

std::size_t HouseholdTally::correct() const {
  std::size_t sum = 0;
  for (const auto& m : members) sum += m.correct;
  return sum;
}

std::size_t HouseholdTally::total() const {
  std::size_t sum = 0;
  for (const auto& m : members) sum += m.total;
  return sum;
}

namespace {

void check_lengths(std::size_t events, std::size_t other, const char* what) {
  if (events != other) {
    throw InputError(std::string(what) + " count differs from test events");
  }
}

const Household& household_of(const TestEvent& e,
                              const HouseholdMap& households) {
  auto it = households.find(e.household);
  if (it == households.end()) {
    throw InputError("unknown household " + std::to_string(e.household));
  }
  return it->second;
}

UserId truth_of(const TestEvent& e) {
  if (!e.true_user) {
    throw InputError("test event without ground truth (household " +
                     std::to_string(e.household) + ", movie " +
                     std::to_string(e.movie) + ")");
  }
  return *e.true_user;
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

Tallies tally(std::span<const TestEvent> test, std::span<const UserId> predicted,
              const HouseholdMap& households) {
  check_lengths(test.size(), predicted.size(), "prediction");
  Tallies tallies;
  for (const auto& [id, household] : households) {
    HouseholdTally t;
    t.household = id;
    for (UserId member : household.members) t.members.push_back({member, 0, 0});
    tallies.emplace(id, std::move(t));
  }
  for (std::size_t k = 0; k < test.size(); ++k) {
    const Household& household = household_of(test[k], households);
    const UserId truth = truth_of(test[k]);
    const int position = household.position(truth);
    if (position < 0) {
      throw InputError("true user " + std::to_string(truth) +
                       " is not in household " + std::to_string(household.id));
    }
    MemberTally& m = tallies.at(household.id).members[position];
    ++m.total;
    if (predicted[k] == truth) ++m.correct;
  }
  return tallies;
}

std::optional<double> tpr(const HouseholdTally& tally, UserId member) {
  for (const auto& m : tally.members) {
    if (m.member != member) continue;
    if (m.total == 0) return std::nullopt;
    return static_cast<double>(m.correct) / static_cast<double>(m.total);
  }
  throw InputError("user " + std::to_string(member) + " not in household " +
                   std::to_string(tally.household));
}

std::optional<double> misclassification(const HouseholdTally& tally) {
  const std::size_t total = tally.total();
  if (total == 0) return std::nullopt;
  return 1.0 - static_cast<double>(tally.correct()) / static_cast<double>(total);
}

Aggregate aggregate(const Tallies& tallies) {
  std::vector<double> all;
  std::map<std::size_t, std::vector<double>> by_size;
  for (const auto& [id, t] : tallies) {
    const auto p = misclassification(t);
    if (!p) continue;
    all.push_back(*p);
    by_size[t.members.size()].push_back(*p);
  }
  Aggregate out;
  out.households = all.size();
  out.p = mean_of(all);
  out.p2 = mean_of(by_size[2]);
  out.p3 = mean_of(by_size[3]);
  out.p4 = mean_of(by_size[4]);
  return out;
}

double random_baseline(const std::map<std::size_t, std::size_t>& counts) {
  double numerator = 0.0;
  double households = 0.0;
  for (const auto& [size, count] : counts) {
    if (size < 1) throw InputError("household size must be positive");
    const double c = static_cast<double>(count);
    numerator += c * (1.0 - 1.0 / static_cast<double>(size));
    households += c;
  }
  if (households == 0.0) throw InputError("no households in the size mix");
  return numerator / households;
}

double random_baseline(std::size_t size2, std::size_t size3,
                       std::size_t size4) {
  return random_baseline({{2, size2}, {3, size3}, {4, size4}});
}

// --- ROC ----------------------------------------------------------------------

RocPoint roc_point(std::span<const TestEvent> test,
                   std::span<const UserId> predicted,
                   const HouseholdMap& households, double parameter) {
  check_lengths(test.size(), predicted.size(), "prediction");
  struct Counts {
    std::size_t first_total = 0, first_hit = 0, rest_total = 0, rest_hit = 0;
  };
  std::map<HouseholdId, Counts> counts;
  for (std::size_t k = 0; k < test.size(); ++k) {
    const Household& household = household_of(test[k], households);
    const UserId first = household.members.front();
    Counts& c = counts[household.id];
    if (truth_of(test[k]) == first) {
      ++c.first_total;
      if (predicted[k] == first) ++c.first_hit;
    } else {
      ++c.rest_total;
      if (predicted[k] != first) ++c.rest_hit;
    }
  }
  std::vector<double> first_rates, rest_rates;
  for (const auto& [id, c] : counts) {
    if (c.first_total > 0) {
      first_rates.push_back(static_cast<double>(c.first_hit) /
                            static_cast<double>(c.first_total));
    }
    if (c.rest_total > 0) {
      rest_rates.push_back(static_cast<double>(c.rest_hit) /
                           static_cast<double>(c.rest_total));
    }
  }
  return {parameter, mean_of(first_rates), mean_of(rest_rates)};
}

std::vector<RocPoint> roc_sweep_residual(const TemporalFactorModel& model,
                                         std::span<const TestEvent> test,
                                         const HouseholdMap& households,
                                         std::span<const double> alphas) {
  std::vector<ResidualGap> gaps;
  gaps.reserve(test.size());
  for (const auto& e : test) {
    gaps.push_back(residual_gap(model, household_of(e, households), e));
  }
  std::vector<RocPoint> points;
  std::vector<UserId> predicted(test.size());
  for (double alpha : alphas) {
    for (std::size_t k = 0; k < test.size(); ++k) {
      predicted[k] = residual_decision(
          gaps[k], household_of(test[k], households), alpha);
    }
    points.push_back(roc_point(test, predicted, households, alpha));
  }
  return points;
}

std::vector<RocPoint> roc_sweep_threshold(
    std::span<const TestEvent> test,
    std::span<const std::vector<double>> posteriors,
    const HouseholdMap& households, std::span<const double> thresholds) {
  check_lengths(test.size(), posteriors.size(), "posterior");
  std::vector<RocPoint> points;
  std::vector<UserId> predicted(test.size());
  for (double tau : thresholds) {
    for (std::size_t k = 0; k < test.size(); ++k) {
      const Household& household = household_of(test[k], households);
      const auto& post = posteriors[k];
      check_lengths(household.size(), post.size(), "posterior member");
      if (post[0] >= tau) {
        predicted[k] = household.members[0];
        continue;
      }
      std::size_t best = 1;
      for (std::size_t m = 2; m < post.size(); ++m) {
        if (post[m] > post[best] ||
            (post[m] == post[best] &&
             household.members[m] < household.members[best])) {
          best = m;
        }
      }
      predicted[k] = household.members[best];
    }
    points.push_back(roc_point(test, predicted, households, tau));
  }
  return points;
}

std::vector<double> linear_grid(double low, double high, std::size_t points) {
  std::vector<double> grid;
  if (points == 0) return grid;
  if (points == 1) return {low};
  for (std::size_t k = 0; k < points; ++k) {
    grid.push_back(low + (high - low) * static_cast<double>(k) /
                             static_cast<double>(points - 1));
  }
  grid.back() = high;
  return grid;
}

// --- AUC ----------------------------------------------------------------------

std::optional<double> auc(std::span<const double> scores,
                          std::span<const bool> positive) {
  check_lengths(scores.size(), positive.size(), "label");
  std::vector<double> negatives;
  std::size_t positives = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (positive[k]) {
      ++positives;
    } else {
      negatives.push_back(scores[k]);
    }
  }
  if (positives == 0 || negatives.empty()) return std::nullopt;
  std::sort(negatives.begin(), negatives.end());
  // a: for each positive, the negatives scoring strictly higher.
  std::size_t a = 0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (!positive[k]) continue;
    a += static_cast<std::size_t>(
        negatives.end() -
        std::upper_bound(negatives.begin(), negatives.end(), scores[k]));
  }
  const double b = static_cast<double>(positives) *
                   static_cast<double>(negatives.size());
  return 1.0 - static_cast<double>(a) / b;
}

AucSummary auc_by_member(std::span<const TestEvent> test,
                         std::span<const std::vector<double>> posteriors,
                         const HouseholdMap& households) {
  check_lengths(test.size(), posteriors.size(), "posterior");
  std::map<HouseholdId, std::vector<std::size_t>> events_of;
  for (std::size_t k = 0; k < test.size(); ++k) {
    events_of[household_of(test[k], households).id].push_back(k);
  }
  AucSummary summary;
  std::vector<double> defined;
  for (const auto& [id, household] : households) {
    const auto it = events_of.find(id);
    for (std::size_t m = 0; m < household.size(); ++m) {
      MemberAuc entry{id, household.members[m], std::nullopt};
      if (it != events_of.end()) {
        const std::size_t n = it->second.size();
        std::vector<double> scores;
        // std::vector<bool> cannot back a span.
        auto positive = std::make_unique<bool[]>(n);
        for (std::size_t s = 0; s < n; ++s) {
          const std::size_t k = it->second[s];
          check_lengths(household.size(), posteriors[k].size(),
                        "posterior member");
          scores.push_back(posteriors[k][m]);
          positive[s] = truth_of(test[k]) == household.members[m];
        }
        entry.value = auc(scores, std::span<const bool>(positive.get(), n));
      }
      if (entry.value) defined.push_back(*entry.value);
      summary.values.push_back(entry);
    }
  }
  summary.mean = mean_of(defined);
  return summary;
}

// --- Reports ------------------------------------------------------------------

AttributionReport build_report(std::string classifier,
                               std::span<const TestEvent> test,
                               std::span<const UserId> predicted,
                               std::vector<std::vector<double>> posteriors,
                               const HouseholdMap& households) {
  AttributionReport report;
  report.classifier = std::move(classifier);
  report.events.assign(test.begin(), test.end());
  report.predicted.assign(predicted.begin(), predicted.end());
  report.households = households;
  report.tallies = tally(test, predicted, households);
  report.summary = aggregate(report.tallies);
  if (!posteriors.empty()) {
    report.auc = auc_by_member(test, posteriors, households);
  }
  report.posteriors = std::move(posteriors);
  return report;
}

namespace {

std::string fmt(const std::optional<double>& v) {
  return v ? text::format_fixed(*v, 6) : "NA";
}

}  // namespace

void write_report(std::ostream& out, const AttributionReport& report) {
  out << "## per_event\n";
  out << "household\tmovie\ttimestamp\trating\ttrue_user\tpredicted\tposterior\n";
  for (std::size_t k = 0; k < report.events.size(); ++k) {
    const auto& e = report.events[k];
    out << e.household << '\t' << e.movie << '\t' << e.timestamp << '\t'
        << text::format_exact(e.rating) << '\t'
        << (e.true_user ? std::to_string(*e.true_user) : "NA") << '\t'
        << report.predicted[k] << '\t';
    if (report.posteriors.empty()) {
      out << "NA";
    } else {
      const auto& post = report.posteriors[k];
      for (std::size_t m = 0; m < post.size(); ++m) {
        out << (m ? "," : "") << text::format_fixed(post[m], 6);
      }
    }
    out << '\n';
  }

  out << "## per_household\n";
  out << "household\tsize\tmember\tcorrect\ttotal\ttpr\tP\n";
  for (const auto& [id, t] : report.tallies) {
    const auto p = misclassification(t);
    for (const auto& m : t.members) {
      out << id << '\t' << t.members.size() << '\t' << m.member << '\t'
          << m.correct << '\t' << m.total << '\t' << fmt(tpr(t, m.member))
          << '\t' << fmt(p) << '\n';
    }
  }

  out << "## aggregate\n";
  out << "metric\tvalue\n";
  out << "P\t" << fmt(report.summary.p) << '\n';
  out << "P2\t" << fmt(report.summary.p2) << '\n';
  out << "P3\t" << fmt(report.summary.p3) << '\n';
  out << "P4\t" << fmt(report.summary.p4) << '\n';
  out << "households\t" << report.summary.households << '\n';

  out << "## roc\n";
  out << "parameter\ttpr_first\ttpr_rest\n";
  for (const auto& point : report.roc) {
    out << text::format_fixed(point.parameter, 6) << '\t'
        << fmt(point.tpr_first) << '\t' << fmt(point.tpr_rest) << '\n';
  }

  out << "## auc\n";
  out << "household\tmember\tauc\n";
  if (report.auc) {
    for (const auto& v : report.auc->values) {
      out << v.household << '\t' << v.member << '\t' << fmt(v.value) << '\n';
    }
    out << "mean\tNA\t" << fmt(report.auc->mean) << '\n';
  }

  for (const auto& note : report.annotations) out << "# " << note << '\n';
  out << summary_line(report) << '\n';
}

std::string summary_line(const AttributionReport& report) {
  std::ostringstream s;
  s << "summary classifier=" << report.classifier
    << " P=" << fmt(report.summary.p) << " P2=" << fmt(report.summary.p2)
    << " P3=" << fmt(report.summary.p3) << " P4=" << fmt(report.summary.p4)
    << " auc=" << (report.auc ? fmt(report.auc->mean) : "NA")
    << " households=" << report.summary.households
    << " events=" << report.events.size();
  return s.str();
}

// --- mean +- std ----------------------------------------------------------------

MeanStd mean_std(std::span<const std::optional<double>> values) {
  MeanStd out;
  // Shifted by the first value, so identical inputs give exactly that mean
  // and a zero spread.
  std::optional<double> shift;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) continue;
    if (!shift) shift = *v;
    sum += *v - *shift;
    ++out.count;
  }
  if (out.count == 0) return out;
  const double offset = sum / static_cast<double>(out.count);
  out.mean = *shift + offset;
  if (out.count > 1) {
    double squares = 0.0;
    for (const auto& v : values) {
      if (v) squares += (*v - *shift - offset) * (*v - *shift - offset);
    }
    out.std_dev = std::sqrt(squares / static_cast<double>(out.count - 1));
  }
  return out;
}

std::string format_mean_std(const MeanStd& value, int decimals) {
  if (value.count == 0) return "NA";
  return text::format_fixed(value.mean, decimals) + " ± " +
         text::format_fixed(value.std_dev, decimals);
}

MeanStd parse_mean_std(const std::string& input) {
  static const char* const kSeparators[] = {"±", "+/-", "+-"};
  for (const char* sep : kSeparators) {
    const auto at = input.find(sep);
    if (at == std::string::npos) continue;
    const auto mean = text::parse_double(text::trim(
        std::string_view(input).substr(0, at)));
    const auto sd = text::parse_double(text::trim(
        std::string_view(input).substr(at + std::string_view(sep).size())));
    if (!mean || !sd || *sd < 0.0) break;
    return {*mean, *sd, 0};
  }
  throw InputError("not a mean ± std value: '" + input + "'");
}

std::string challenge_reference_annotation() {
  return "reference challenge P=0.0406 P2=0.0413 P3=0.0268 P4=0.0463";
}

std::map<std::string, std::string> parse_annotation(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream words(line);
  std::string word;
  while (words >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos || eq == 0) continue;
    out[word.substr(0, eq)] = word.substr(eq + 1);
  }
  return out;
}

}  // namespace raterid
