#pragma once

#include <cstddef>
#include <vector>

namespace gtflat {

// One trainable tensor: its dimension list and row-major values.
struct Layer {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

// A model's trainable parameters as an ordered list of shaped layers.
// Construction checks that every layer's value count matches the product of
// its dimensions and that all values are finite. Shapes are frozen after
// construction; values stay mutable through values(i) for training kernels,
// which cannot invalidate total_len.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<Layer> layers);

  std::size_t layer_count() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }
  const std::vector<double>& values(std::size_t i) const { return layers_.at(i).values; }
  std::vector<double>& values(std::size_t i) { return layers_.at(i).values; }
  std::size_t total_len() const { return total_len_; }

  // Same layer count and identical per-layer shapes.
  bool same_shape(const ParamVector& other) const;

 private:
  std::vector<Layer> layers_;
  std::size_t total_len_ = 0;
};

// Aggregation weights over a set of models: entries non-negative, summing to
// 1 within 1e-9. Validated on construction.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> w);

  std::size_t size() const { return w_.size(); }
  double at(std::size_t i) const { return w_.at(i); }
  const std::vector<double>& get() const { return w_; }

 private:
  std::vector<double> w_;
};

// All scalars in layer order, each layer row-major.
std::vector<double> flatten(const ParamVector& p);

// Euclidean norm of the elementwise difference; requires same_shape.
double pairwise_distance(const ParamVector& a, const ParamVector& b);

// Sum_k w[k] * models[k], elementwise. Accumulated as models[0] plus weighted
// deltas, sequentially in model-index order, so that averaging identical
// models reproduces them bitwise; a weight of exactly 1 returns that model
// unchanged. Zero-weight models are skipped.
ParamVector weighted_average(const std::vector<ParamVector>& models, const WeightVector& w);

}  // namespace gtflat
