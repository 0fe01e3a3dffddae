#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "gtflat/data_gen.hpp"
#include "gtflat/param_space.hpp"

namespace gtflat {

// Classifier parameter layout:
//   2 layers [W (C x d), b (C)]                      — multinomial logistic regression
//   4 layers [W1 (h x d), b1 (h), W2 (C x h), b2 (C)] — one tanh hidden layer
// The layer list itself determines which forward pass applies.

// Weights drawn N(0, 0.1^2), biases zero. hidden == 0 selects the plain
// logistic layout.
ParamVector init_model(std::size_t classes, std::size_t dim, std::size_t hidden,
                       std::mt19937_64& rng);

// Class scores (logits) for one dataset row.
std::vector<double> model_scores(const ParamVector& p, const Dataset& ds, std::size_t row);

// Mean softmax cross-entropy over the given rows; empty idx means all rows.
double model_loss(const ParamVector& p, const Dataset& ds, const std::vector<std::size_t>& idx);

// Gradient of the mean cross-entropy over the batch rows, same layout as p.
ParamVector model_gradient(const ParamVector& p, const Dataset& ds,
                           const std::vector<std::size_t>& batch);

}  // namespace gtflat
