#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "patent/classifier.hpp"

namespace patent::explain {

enum class Method { linear, surrogate };

std::string_view to_string(Method method);

struct TokenWeight {
  std::string token;
  double weight = 0.0;
};

struct Explanation {
  int target_label = 0;
  Method method = Method::linear;
  std::size_t k = 10;
  /// Sorted by |weight| descending; ties keep term order.
  std::vector<TokenWeight> token_weights;
  /// Linear: the class decision score and intercept. Surrogate: the fitted
  /// surrogate's intercept and its prediction for the unmasked text.
  double score = 0.0;
  double intercept = 0.0;
};

/// Every in-vocabulary term of `text` with its contribution
/// w'_c[t] * feature(t) to the class score (NBSVM ratio scaling included),
/// sorted by magnitude. intercept + sum of all contributions equals the score.
Explanation linear_contributions(const models::TextClassifier& model, std::string_view text, int target_label);

/// Top-k prefix of linear_contributions for the predicted label.
Explanation linear_attribution(const models::TextClassifier& model, std::string_view text, std::size_t k);

using ScoreFunction = std::function<std::vector<double>(const std::string&)>;

struct SurrogateOptions {
  std::size_t n_samples = 1000;
  /// Kernel width on cosine distance scaled by 100.
  double kernel_width = 25.0;
  /// L2 penalty on the token coefficients, relative to mean-one sample weights.
  double ridge = 0.01;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  /// Texts with at most this many distinct tokens are explained from all
  /// 2^d masks instead of random samples.
  std::size_t exhaustive_limit = 12;
};

/// Local surrogate: masks distinct tokens of the normalized text (each kept
/// with probability 0.5; the unmasked text is always the first sample),
/// queries `predictor`, and fits a ridge regression of the target-class
/// score on token-presence indicators with weights exp(-D^2 / width^2),
/// D = 100 * cosine distance of the mask from the all-ones mask.
Explanation surrogate_explain(const ScoreFunction& predictor, std::string_view text, int target_label,
                              const SurrogateOptions& options);

nlohmann::json to_json(const Explanation& explanation);

}  // namespace patent::explain
