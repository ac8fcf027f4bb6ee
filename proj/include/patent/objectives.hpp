#pragma once

#include <span>

#include "patent/features.hpp"
#include "patent/random.hpp"

namespace patent::models {

struct TrainConfig;

enum class Loss { logistic, hinge };

/// lambda/2 |w|^2 + mean_i loss(y_i (w . x_i + b)), with y_i in {-1, +1}.
/// The intercept is not regularized.
double binary_objective(Loss loss, std::span<const double> w, double b, const features::DocTermMatrix& x,
                        std::span<const double> y, double lambda);

/// Analytic (sub)gradient of binary_objective. For the hinge loss the
/// subgradient at a margin of exactly 1 is taken as zero.
void binary_gradient(Loss loss, std::span<const double> w, double b, const features::DocTermMatrix& x,
                     std::span<const double> y, double lambda, std::span<double> grad_w, double& grad_b);

/// Derivative of the loss with respect to the margin.
double loss_derivative(Loss loss, double margin);
double loss_value(Loss loss, double margin);

struct BinaryFit {
  std::vector<double> w;
  double b = 0.0;
  double final_objective = 0.0;
  bool converged = false;
};

/// Seeded stochastic (sub)gradient descent on binary_objective: per-epoch
/// shuffle, step learning_rate / sqrt(t), proximal L2 shrink after each
/// update. Bit-deterministic for fixed data order and generator state.
BinaryFit sgd_binary(Loss loss, const features::DocTermMatrix& x, std::span<const double> y, double lambda,
                     const TrainConfig& config, Rng rng);

}  // namespace patent::models
