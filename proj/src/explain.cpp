#include "patent/explain.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "patent/error.hpp"
#include "patent/random.hpp"
#include "patent/text.hpp"

namespace patent::explain {

std::string_view to_string(Method method) { return method == Method::linear ? "linear" : "surrogate"; }

namespace {

void sort_by_magnitude(std::vector<TokenWeight>& weights) {
  std::stable_sort(weights.begin(), weights.end(),
                   [](const TokenWeight& a, const TokenWeight& b) { return std::abs(a.weight) > std::abs(b.weight); });
}

}  // namespace

Explanation linear_contributions(const models::TextClassifier& model, std::string_view text, int target_label) {
  const auto* linear = model.linear();
  if (linear == nullptr) throw Error(Errc::BadArgument, "linear attribution needs a linear model");
  const auto x = model.featurizer.transform(text);
  if (x.dimension() != linear->dimension()) throw Error(Errc::DimensionMismatch, "text vector does not match model");
  const auto it = std::find(linear->classes.begin(), linear->classes.end(), target_label);
  if (it == linear->classes.end()) throw Error(Errc::UnknownLabel, "model has no class " + std::to_string(target_label));
  const auto c = static_cast<std::size_t>(it - linear->classes.begin());

  Explanation out;
  out.target_label = target_label;
  out.method = Method::linear;
  out.intercept = linear->intercepts[c];
  out.score = linear->class_score(c, x);
  const auto& w = linear->weights[c];
  for (const auto& e : x.entries()) {
    const double contribution =
        linear->nb_ratios.empty() ? w[e.index] * e.value : w[e.index] * (linear->nb_ratios[c][e.index] * e.value);
    out.token_weights.push_back({model.featurizer.vocabulary().term(e.index), contribution});
  }
  sort_by_magnitude(out.token_weights);
  out.k = out.token_weights.size();
  return out;
}

Explanation linear_attribution(const models::TextClassifier& model, std::string_view text, std::size_t k) {
  const auto label = model.predict(text).label;
  auto out = linear_contributions(model, text, label);
  if (out.token_weights.size() > k) out.token_weights.resize(k);
  out.k = k;
  return out;
}

Explanation surrogate_explain(const ScoreFunction& predictor, std::string_view raw_text, int target_label,
                              const SurrogateOptions& options) {
  if (options.n_samples < 10) throw Error(Errc::BadArgument, "surrogate needs at least 10 samples");
  if (target_label < 0) throw Error(Errc::UnknownLabel, "negative target label");
  const auto tokens = text::tokenize(text::normalize(raw_text));
  if (tokens.empty()) throw Error(Errc::DegenerateText, "text has no tokens to explain");

  // Features are distinct tokens in first-appearance order; masking a
  // feature removes every occurrence of it.
  std::vector<std::string> vocab;
  std::unordered_map<std::string, std::size_t> feature_of;
  std::vector<std::size_t> position_feature;
  for (const auto& t : tokens) {
    auto [it, inserted] = feature_of.emplace(t, vocab.size());
    if (inserted) vocab.push_back(t);
    position_feature.push_back(it->second);
  }
  const std::size_t d = vocab.size();

  std::vector<std::vector<bool>> masks;
  if (d <= options.exhaustive_limit) {
    const std::size_t total = std::size_t{1} << d;
    // All-ones first, then the remaining masks in descending bit order.
    for (std::size_t m = total; m-- > 0;) {
      std::vector<bool> mask(d);
      for (std::size_t j = 0; j < d; ++j) mask[j] = ((m >> j) & 1u) != 0;
      masks.push_back(std::move(mask));
    }
  } else {
    Rng rng(options.seed);
    masks.emplace_back(d, true);
    while (masks.size() < options.n_samples) {
      std::vector<bool> mask(d);
      for (std::size_t j = 0; j < d; ++j) mask[j] = rng.uniform() < 0.5;
      masks.push_back(std::move(mask));
    }
  }

  const std::size_t n = masks.size();
  Eigen::MatrixXd design(n, d + 1);
  Eigen::VectorXd target(n);
  Eigen::VectorXd weight(n);
  const auto label = static_cast<std::size_t>(target_label);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mask = masks[i];
    std::string masked;
    for (std::size_t p = 0; p < tokens.size(); ++p) {
      if (!mask[position_feature[p]]) continue;
      if (!masked.empty()) masked.push_back(' ');
      masked += tokens[p];
    }
    const auto scores = predictor(masked);
    if (label >= scores.size()) throw Error(Errc::UnknownLabel, "predictor returned no score for the target label");
    target(static_cast<Eigen::Index>(i)) = scores[label];

    std::size_t kept = 0;
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = mask[j] ? 1.0 : 0.0;
      kept += mask[j] ? 1 : 0;
    }
    // Cosine distance to the all-ones mask: 1 - sqrt(kept / d).
    const double distance = 100.0 * (1.0 - std::sqrt(static_cast<double>(kept) / static_cast<double>(d)));
    weight(static_cast<Eigen::Index>(i)) =
        std::exp(-(distance * distance) / (options.kernel_width * options.kernel_width));
  }

  // Mean-one weights keep the ridge penalty comparable between 4 exhaustive
  // masks and 1000 sampled ones.
  weight *= static_cast<double>(n) / weight.sum();
  Eigen::MatrixXd gram = design.transpose() * weight.asDiagonal() * design;
  for (Eigen::Index j = 1; j < gram.rows(); ++j) gram(j, j) += options.ridge;
  const Eigen::VectorXd rhs = design.transpose() * weight.asDiagonal() * target;
  const Eigen::VectorXd coef = gram.ldlt().solve(rhs);

  Explanation out;
  out.target_label = target_label;
  out.method = Method::surrogate;
  out.k = options.k;
  out.intercept = coef(0);
  out.score = coef.sum();
  for (std::size_t j = 0; j < d; ++j) out.token_weights.push_back({vocab[j], coef(static_cast<Eigen::Index>(j + 1))});
  sort_by_magnitude(out.token_weights);
  if (out.token_weights.size() > options.k) out.token_weights.resize(options.k);
  return out;
}

nlohmann::json to_json(const Explanation& explanation) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& tw : explanation.token_weights) tokens.push_back({{"token", tw.token}, {"weight", tw.weight}});
  return {{"label", explanation.target_label}, {"method", std::string(to_string(explanation.method))},
          {"tokens", std::move(tokens)}};
}

}  // namespace patent::explain
