#include "patent/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patent/models.hpp"

namespace patent::models {

double loss_value(Loss loss, double margin) {
  if (loss == Loss::hinge) return std::max(0.0, 1.0 - margin);
  return margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

double loss_derivative(Loss loss, double margin) {
  if (loss == Loss::hinge) return margin < 1.0 ? -1.0 : 0.0;
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

double binary_objective(Loss loss, std::span<const double> w, double b, const features::DocTermMatrix& x,
                        std::span<const double> y, double lambda) {
  double data = 0.0;
  for (std::size_t i = 0; i < x.rows.size(); ++i) {
    data += loss_value(loss, y[i] * (x.rows[i].dot(w) + b));
  }
  const double reg = 0.5 * lambda * std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  return reg + (x.rows.empty() ? 0.0 : data / static_cast<double>(x.rows.size()));
}

void binary_gradient(Loss loss, std::span<const double> w, double b, const features::DocTermMatrix& x,
                     std::span<const double> y, double lambda, std::span<double> grad_w, double& grad_b) {
  for (std::size_t t = 0; t < w.size(); ++t) grad_w[t] = lambda * w[t];
  grad_b = 0.0;
  const double inv_n = x.rows.empty() ? 0.0 : 1.0 / static_cast<double>(x.rows.size());
  for (std::size_t i = 0; i < x.rows.size(); ++i) {
    const double g = loss_derivative(loss, y[i] * (x.rows[i].dot(w) + b)) * y[i] * inv_n;
    if (g == 0.0) continue;
    for (const auto& e : x.rows[i].entries()) grad_w[e.index] += g * e.value;
    grad_b += g;
  }
}

BinaryFit sgd_binary(Loss loss, const features::DocTermMatrix& x, std::span<const double> y, double lambda,
                     const TrainConfig& config, Rng rng) {
  const std::size_t dim = x.dimension;
  const std::size_t n = x.rows.size();
  // w = scale * v, so the L2 shrink is O(1) per update instead of O(dim).
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double b = 0.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto materialize = [&] {
    std::vector<double> w(dim);
    for (std::size_t t = 0; t < dim; ++t) w[t] = scale * v[t];
    return w;
  };

  BinaryFit fit;
  double previous = binary_objective(loss, materialize(), b, x, y, lambda);
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (const std::size_t i : order) {
      ++step;
      const double eta = config.learning_rate / std::sqrt(static_cast<double>(step));
      const auto& row = x.rows[i];
      const double margin = y[i] * (scale * row.dot(v) + b);
      const double g = loss_derivative(loss, margin);
      if (g != 0.0) {
        const double coef = -eta * g * y[i] / scale;
        for (const auto& e : row.entries()) v[e.index] += coef * e.value;
        b -= eta * g * y[i];
      }
      scale /= 1.0 + eta * lambda;
      if (scale < 1e-9) {
        for (auto& value : v) value *= scale;
        scale = 1.0;
      }
    }
    const double current = binary_objective(loss, materialize(), b, x, y, lambda);
    fit.converged = std::abs(previous - current) <= config.tolerance * std::max(1.0, std::abs(current));
    previous = current;
  }
  fit.w = materialize();
  fit.b = b;
  fit.final_objective = previous;
  if (config.epochs == 0) fit.converged = false;
  return fit;
}

}  // namespace patent::models
