#include "patent/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "patent/error.hpp"
#include "patent/random.hpp"

namespace patent::eval {

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

Split train_test_split(std::size_t n, const SplitSpec& spec, std::span<const int> labels) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(Errc::BadFraction, "test_fraction must lie strictly between 0 and 1");
  }
  if (n < 2) throw Error(Errc::BadArgument, "need at least two samples to split");
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
  const auto order = shuffled_indices(n, spec.seed);

  Split split;
  if (!spec.stratified) {
    split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  } else {
    if (labels.size() != n) throw Error(Errc::LengthMismatch, "stratified split needs one label per sample");
    const int max_label = *std::max_element(labels.begin(), labels.end());
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_label) + 1);
    for (const std::size_t i : order) {
      if (labels[i] < 0) throw Error(Errc::UnknownLabel, "negative label");
      by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    // Largest-remainder apportionment of n_test across classes.
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const double exact = static_cast<double>(by_class[c].size()) * static_cast<double>(n_test) / static_cast<double>(n);
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[c];
      remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n_test && r < remainders.size(); ++r) {
      ++quota[remainders[r].second];
      ++assigned;
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const auto& members = by_class[c];
      split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
      split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]), members.end());
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::BadK, "k must be >= 2");
  if (n < k) throw Error(Errc::BadK, "need at least k samples");
  const auto order = shuffled_indices(n, seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t pos = 0; pos < n; ++pos) folds[pos % k].push_back(order[pos]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

EvalReport evaluate(std::span<const int> gold, std::span<const int> predicted, int n_classes) {
  if (gold.size() != predicted.size()) throw Error(Errc::LengthMismatch, "gold and predicted differ in length");
  const auto k = static_cast<std::size_t>(n_classes);
  EvalReport report;
  report.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (const int label : {gold[i], predicted[i]}) {
      if (label < 0 || label >= n_classes) {
        throw Error(Errc::UnknownLabel, "label " + std::to_string(label) + " outside [0, " + std::to_string(n_classes) + ")");
      }
    }
    ++report.confusion[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(predicted[i])];
  }

  std::size_t correct = 0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double tp = static_cast<double>(report.confusion[c][c]);
    double gold_total = 0.0;
    double pred_total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      gold_total += static_cast<double>(report.confusion[c][j]);
      pred_total += static_cast<double>(report.confusion[j][c]);
    }
    ClassMetrics m;
    m.support = static_cast<std::size_t>(gold_total);
    m.precision = safe_ratio(tp, pred_total);
    m.recall = safe_ratio(tp, gold_total);
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    if (m.support == 0) m = ClassMetrics{};
    report.per_class.push_back(m);
    correct += report.confusion[c][c];
    if (m.support > 0) {
      ++present;
      report.macro_precision += m.precision;
      report.macro_recall += m.recall;
      report.macro_f1 += m.f1;
    }
  }
  if (present > 0) {
    report.macro_precision /= static_cast<double>(present);
    report.macro_recall /= static_cast<double>(present);
    report.macro_f1 /= static_cast<double>(present);
  }
  report.accuracy = gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size());
  return report;
}

EvalReport cross_validate(const Trainer& trainer, std::span<const std::string> texts, std::span<const int> labels,
                          std::size_t k, std::uint64_t seed, int n_classes) {
  if (texts.size() != labels.size()) throw Error(Errc::LengthMismatch, "texts and labels differ in length");
  const auto folds = kfold(texts.size(), k, seed);
  const auto n_cls = static_cast<std::size_t>(n_classes);

  EvalReport avg;
  avg.per_class.assign(n_cls, ClassMetrics{});
  avg.confusion.assign(n_cls, std::vector<std::size_t>(n_cls, 0));
  std::vector<std::size_t> class_folds(n_cls, 0);

  std::vector<bool> held_out(texts.size());
  for (const auto& fold : folds) {
    std::fill(held_out.begin(), held_out.end(), false);
    for (const std::size_t i : fold) held_out[i] = true;
    std::vector<std::string> train_texts;
    std::vector<int> train_labels;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (held_out[i]) continue;
      train_texts.push_back(texts[i]);
      train_labels.push_back(labels[i]);
    }
    const auto predictor = trainer(train_texts, train_labels);

    std::vector<int> gold;
    std::vector<int> pred;
    for (const std::size_t i : fold) {
      gold.push_back(labels[i]);
      pred.push_back(predictor(texts[i]));
    }
    const auto report = evaluate(gold, pred, n_classes);
    avg.fold_accuracy.push_back(report.accuracy);
    avg.fold_macro_f1.push_back(report.macro_f1);
    avg.macro_precision += report.macro_precision;
    avg.macro_recall += report.macro_recall;
    avg.macro_f1 += report.macro_f1;
    avg.accuracy += report.accuracy;
    for (std::size_t c = 0; c < n_cls; ++c) {
      const auto& m = report.per_class[c];
      avg.per_class[c].support += m.support;
      if (m.support > 0) {
        ++class_folds[c];
        avg.per_class[c].precision += m.precision;
        avg.per_class[c].recall += m.recall;
        avg.per_class[c].f1 += m.f1;
      }
      for (std::size_t j = 0; j < n_cls; ++j) avg.confusion[c][j] += report.confusion[c][j];
    }
  }
  const double kf = static_cast<double>(folds.size());
  avg.macro_precision /= kf;
  avg.macro_recall /= kf;
  avg.macro_f1 /= kf;
  avg.accuracy /= kf;
  for (std::size_t c = 0; c < n_cls; ++c) {
    if (class_folds[c] == 0) continue;
    const double d = static_cast<double>(class_folds[c]);
    avg.per_class[c].precision /= d;
    avg.per_class[c].recall /= d;
    avg.per_class[c].f1 /= d;
  }
  return avg;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    classes.push_back({{"label", c}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                       {"support", m.support}});
  }
  nlohmann::json j = {{"classes", classes},
                      {"macro", {{"precision", report.macro_precision}, {"recall", report.macro_recall},
                                 {"f1", report.macro_f1}}},
                      {"accuracy", report.accuracy},
                      {"confusion", report.confusion}};
  if (!report.fold_accuracy.empty()) {
    j["fold_accuracy"] = report.fold_accuracy;
    j["fold_macro_f1"] = report.fold_macro_f1;
  }
  return j;
}

std::string render_table(const EvalReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10s %10s\n", "class", "precision", "recall", "f1-score", "support");
  out << line;
  std::size_t total = 0;
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    std::snprintf(line, sizeof line, "%-10zu %10.2f %10.2f %10.2f %10zu\n", c, m.precision, m.recall, m.f1, m.support);
    out << line;
    total += m.support;
  }
  std::snprintf(line, sizeof line, "%-10s %10.2f %10.2f %10.2f %10zu\n", "macro avg", report.macro_precision,
                report.macro_recall, report.macro_f1, total);
  out << line;
  std::snprintf(line, sizeof line, "%-10s %10s %10s %10.2f %10zu\n", "accuracy", "", "", report.accuracy, total);
  out << line;
  out << "confusion (rows = gold, columns = predicted)\n";
  for (const auto& row : report.confusion) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
    out << '\n';
  }
  return out.str();
}

}  // namespace patent::eval
