#include "patent/models.hpp"

#include <cmath>
#include <numeric>

#include "patent/error.hpp"
#include "patent/objectives.hpp"

namespace patent::models {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::mnb: return "mnb";
    case ModelKind::logreg: return "logreg";
    case ModelKind::svm: return "svm";
    case ModelKind::nbsvm: return "nbsvm";
    case ModelKind::forest: return "forest";
  }
  return "svm";
}

ModelKind model_kind_from_string(std::string_view name) {
  if (name == "mnb") return ModelKind::mnb;
  if (name == "logreg" || name == "lr") return ModelKind::logreg;
  if (name == "svm" || name == "lsvc") return ModelKind::svm;
  if (name == "nbsvm") return ModelKind::nbsvm;
  if (name == "forest" || name == "rfc") return ModelKind::forest;
  throw Error(Errc::BadArgument, "unknown model kind '" + std::string(name) + "'");
}

bool is_linear(ModelKind kind) { return kind != ModelKind::forest; }

void TrainConfig::validate() const {
  if (epochs < 0) throw Error(Errc::BadArgument, "epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw Error(Errc::BadArgument, "learning_rate must be > 0");
  if (l2_lambda < 0.0) throw Error(Errc::BadArgument, "l2_lambda must be >= 0");
  if (!(svm_c > 0.0)) throw Error(Errc::BadArgument, "svm_c must be > 0");
  if (nbsvm_beta < 0.0 || nbsvm_beta > 1.0) throw Error(Errc::BadArgument, "nbsvm_beta must lie in [0, 1]");
  if (!(nbsvm_alpha > 0.0) || !(mnb_alpha > 0.0)) throw Error(Errc::NonPositiveAlpha, "smoothing must be > 0");
  if (n_trees < 1) throw Error(Errc::BadArgument, "n_trees must be >= 1");
  if (max_depth < 0) throw Error(Errc::BadArgument, "max_depth must be >= 0");
}

double LinearModel::effective_weight(std::size_t class_index, std::uint32_t term) const {
  const double w = weights[class_index][term];
  return nb_ratios.empty() ? w : w * nb_ratios[class_index][term];
}

double LinearModel::class_score(std::size_t class_index, const SparseVector& x) const {
  const auto& w = weights[class_index];
  double score = intercepts[class_index];
  if (nb_ratios.empty()) {
    for (const auto& e : x.entries()) score += w[e.index] * e.value;
  } else {
    const auto& r = nb_ratios[class_index];
    for (const auto& e : x.entries()) score += w[e.index] * (r[e.index] * e.value);
  }
  return score;
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

Prediction predict(const LinearModel& model, const SparseVector& x) {
  if (x.dimension() != model.dimension()) {
    throw Error(Errc::DimensionMismatch, "input dimension " + std::to_string(x.dimension()) +
                                             " does not match model dimension " +
                                             std::to_string(model.dimension()));
  }
  Prediction p;
  p.scores.reserve(model.n_classes());
  for (std::size_t c = 0; c < model.n_classes(); ++c) p.scores.push_back(model.class_score(c, x));
  p.label = model.classes[argmax(p.scores)];
  return p;
}

std::vector<std::size_t> class_counts(std::span<const int> labels, int n_classes) {
  if (n_classes < 2) throw Error(Errc::BadArgument, "need at least two classes");
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (const int label : labels) {
    if (label < 0 || label >= n_classes) {
      throw Error(Errc::UnknownLabel, "label " + std::to_string(label) + " outside [0, " +
                                          std::to_string(n_classes) + ")");
    }
    ++counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw Error(Errc::EmptyClass, "class " + std::to_string(c) + " has no samples");
  }
  return counts;
}

namespace {

void check_rows(const DocTermMatrix& x, std::span<const int> labels) {
  if (x.rows.size() != labels.size()) {
    throw Error(Errc::LengthMismatch, "feature rows and labels differ in length");
  }
  for (const auto& row : x.rows) {
    if (row.dimension() != x.dimension) throw Error(Errc::DimensionMismatch, "row dimension differs from matrix");
  }
}

std::vector<int> class_list(int n_classes) {
  std::vector<int> classes(static_cast<std::size_t>(n_classes));
  std::iota(classes.begin(), classes.end(), 0);
  return classes;
}

std::vector<double> one_vs_rest_targets(std::span<const int> labels, int target) {
  std::vector<double> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == target ? 1.0 : -1.0;
  return y;
}

LinearFit train_one_vs_rest(Loss loss, ModelKind kind, const DocTermMatrix& x, std::span<const int> labels,
                            int n_classes, double lambda, const TrainConfig& config) {
  config.validate();
  check_rows(x, labels);
  class_counts(labels, n_classes);
  LinearFit fit;
  fit.model.kind = kind;
  fit.model.feature_mode = features::FeatureMode::tfidf;
  fit.model.classes = class_list(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    const auto y = one_vs_rest_targets(labels, c);
    auto binary = sgd_binary(loss, x, y, lambda, config, Rng::derive(config.seed, static_cast<std::uint64_t>(c)));
    fit.model.weights.push_back(std::move(binary.w));
    fit.model.intercepts.push_back(binary.b);
    fit.diagnostics.final_loss.push_back(binary.final_objective);
    fit.diagnostics.converged = fit.diagnostics.converged && binary.converged;
  }
  return fit;
}

}  // namespace

LinearFit train_mnb(const DocTermMatrix& counts, std::span<const int> labels, int n_classes, double alpha) {
  if (!(alpha > 0.0)) throw Error(Errc::NonPositiveAlpha, "alpha must be > 0");
  check_rows(counts, labels);
  const auto per_class = class_counts(labels, n_classes);
  const std::size_t dim = counts.dimension;

  LinearFit fit;
  auto& m = fit.model;
  m.kind = ModelKind::mnb;
  m.feature_mode = features::FeatureMode::tfidf;
  m.classes = class_list(n_classes);
  std::vector<std::vector<double>> totals(static_cast<std::size_t>(n_classes), std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < counts.rows.size(); ++i) {
    auto& t = totals[static_cast<std::size_t>(labels[i])];
    for (const auto& e : counts.rows[i].entries()) t[e.index] += e.value;
  }
  const double n = static_cast<double>(labels.size());
  for (std::size_t c = 0; c < totals.size(); ++c) {
    const double mass = std::accumulate(totals[c].begin(), totals[c].end(), 0.0);
    const double denom = std::log(static_cast<double>(dim) * alpha + mass);
    std::vector<double> w(dim);
    for (std::size_t t = 0; t < dim; ++t) w[t] = std::log(alpha + totals[c][t]) - denom;
    m.weights.push_back(std::move(w));
    m.intercepts.push_back(std::log(static_cast<double>(per_class[c]) / n));
  }
  return fit;
}

LinearFit train_logreg(const DocTermMatrix& x, std::span<const int> labels, int n_classes,
                       const TrainConfig& config) {
  return train_one_vs_rest(Loss::logistic, ModelKind::logreg, x, labels, n_classes, config.l2_lambda, config);
}

LinearFit train_linear_svm(const DocTermMatrix& x, std::span<const int> labels, int n_classes,
                           const TrainConfig& config) {
  const double lambda = 1.0 / (config.svm_c * static_cast<double>(std::max<std::size_t>(1, labels.size())));
  return train_one_vs_rest(Loss::hinge, ModelKind::svm, x, labels, n_classes, lambda, config);
}

NbRatioComponent log_count_ratio(const DocTermMatrix& x_binary, std::span<const int> labels, int target_class,
                                 double alpha) {
  if (!(alpha > 0.0)) throw Error(Errc::NonPositiveAlpha, "alpha must be > 0");
  check_rows(x_binary, labels);
  const std::size_t dim = x_binary.dimension;
  std::vector<double> p(dim, alpha);
  std::vector<double> q(dim, alpha);
  std::size_t n_in = 0;
  for (std::size_t i = 0; i < x_binary.rows.size(); ++i) {
    const bool in_class = labels[i] == target_class;
    n_in += in_class ? 1 : 0;
    auto& acc = in_class ? p : q;
    for (const auto& e : x_binary.rows[i].entries()) acc[e.index] += e.value;
  }
  const std::size_t n_out = labels.size() - n_in;
  if (n_in == 0 || n_out == 0) {
    throw Error(Errc::EmptyClass, "class " + std::to_string(target_class) + " or its complement has no samples");
  }
  const double p_norm = std::accumulate(p.begin(), p.end(), 0.0);
  const double q_norm = std::accumulate(q.begin(), q.end(), 0.0);
  NbRatioComponent out;
  out.r.resize(dim);
  // Written as a difference of logs so that swapping the two sides negates r bit for bit.
  for (std::size_t t = 0; t < dim; ++t) out.r[t] = std::log(p[t] / p_norm) - std::log(q[t] / q_norm);
  out.b = std::log(static_cast<double>(n_in)) - std::log(static_cast<double>(n_out));
  return out;
}

NbRatio log_count_ratios(const DocTermMatrix& x_binary, std::span<const int> labels, int n_classes, double alpha) {
  NbRatio ratio;
  ratio.alpha = alpha;
  for (int c = 0; c < n_classes; ++c) {
    auto component = log_count_ratio(x_binary, labels, c, alpha);
    ratio.r.push_back(std::move(component.r));
    ratio.b.push_back(component.b);
  }
  return ratio;
}

SparseVector scale_features(const SparseVector& x, std::span<const double> r) {
  std::vector<double> values;
  values.reserve(x.nnz());
  for (const auto& e : x.entries()) values.push_back(r[e.index] * e.value);
  return x.with_values(values);
}

LinearFit train_nbsvm(const DocTermMatrix& x_binary, std::span<const int> labels, int n_classes,
                      const TrainConfig& config) {
  config.validate();
  check_rows(x_binary, labels);
  class_counts(labels, n_classes);
  const auto ratio = log_count_ratios(x_binary, labels, n_classes, config.nbsvm_alpha);
  const double lambda = 1.0 / (config.svm_c * static_cast<double>(labels.size()));
  const std::size_t dim = x_binary.dimension;

  LinearFit fit;
  auto& m = fit.model;
  m.kind = ModelKind::nbsvm;
  m.feature_mode = features::FeatureMode::nb_scaled;
  m.classes = class_list(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    const auto& r = ratio.r[static_cast<std::size_t>(c)];
    DocTermMatrix scaled{dim, {}};
    scaled.rows.reserve(x_binary.rows.size());
    for (const auto& row : x_binary.rows) scaled.rows.push_back(scale_features(row, r));
    const auto y = one_vs_rest_targets(labels, c);
    auto binary = sgd_binary(Loss::hinge, scaled, y, lambda, config, Rng::derive(config.seed, static_cast<std::uint64_t>(c)));

    double l1 = 0.0;
    for (const double w : binary.w) l1 += std::abs(w);
    const double mean_magnitude = dim == 0 ? 0.0 : l1 / static_cast<double>(dim);
    std::vector<double> interpolated(dim);
    for (std::size_t t = 0; t < dim; ++t) {
      interpolated[t] = (1.0 - config.nbsvm_beta) * mean_magnitude + config.nbsvm_beta * binary.w[t];
    }
    m.weights.push_back(std::move(interpolated));
    m.intercepts.push_back(binary.b);
    m.nb_ratios.push_back(r);
    fit.diagnostics.final_loss.push_back(binary.final_objective);
    fit.diagnostics.converged = fit.diagnostics.converged && binary.converged;
  }
  return fit;
}

}  // namespace patent::models
