#include "gtflat/param_space.hpp"

#include <cmath>
#include <stdexcept>

namespace gtflat {

ParamVector::ParamVector(std::vector<Layer> layers) : layers_(std::move(layers)) {
  total_len_ = 0;
  for (const Layer& l : layers_) {
    if (l.shape.empty()) {
      throw std::invalid_argument("ParamVector: layer with empty shape");
    }
    std::size_t want = 1;
    for (std::size_t d : l.shape) {
      if (d == 0) throw std::invalid_argument("ParamVector: zero dimension in shape");
      want *= d;
    }
    if (l.values.size() != want) {
      throw std::invalid_argument("ParamVector: value count does not match shape product");
    }
    for (double v : l.values) {
      if (!std::isfinite(v)) throw std::invalid_argument("ParamVector: non-finite value");
    }
    total_len_ += want;
  }
}

bool ParamVector::same_shape(const ParamVector& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].shape != other.layers_[i].shape) return false;
  }
  return true;
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  double sum = 0.0;
  for (double x : w_) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::invalid_argument("WeightVector: entries must be finite and non-negative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("WeightVector: entries must sum to 1 within 1e-9");
  }
}

std::vector<double> flatten(const ParamVector& p) {
  std::vector<double> out;
  out.reserve(p.total_len());
  for (std::size_t i = 0; i < p.layer_count(); ++i) {
    const std::vector<double>& v = p.values(i);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

double pairwise_distance(const ParamVector& a, const ParamVector& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("pairwise_distance: shape mismatch");
  }
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < a.layer_count(); ++i) {
    const std::vector<double>& av = a.values(i);
    const std::vector<double>& bv = b.values(i);
    for (std::size_t s = 0; s < av.size(); ++s) {
      double diff = av[s] - bv[s];
      sum_sq += diff * diff;
    }
  }
  return std::sqrt(sum_sq);
}

ParamVector weighted_average(const std::vector<ParamVector>& models, const WeightVector& w) {
  if (models.empty()) throw std::invalid_argument("weighted_average: empty model list");
  if (w.size() != models.size()) {
    throw std::invalid_argument("weighted_average: weight/model count mismatch");
  }
  for (std::size_t k = 1; k < models.size(); ++k) {
    if (!models[k].same_shape(models[0])) {
      throw std::invalid_argument("weighted_average: shape mismatch between models");
    }
  }
  // A weight of exactly 1 means "copy that model" (one-hot case).
  for (std::size_t k = 0; k < models.size(); ++k) {
    if (w.at(k) == 1.0) return models[k];
  }
  // result = models[0] + sum_k w[k] * (models[k] - models[0]); identical
  // inputs make every delta exactly zero, so the base model survives bitwise.
  ParamVector result = models[0];
  for (std::size_t k = 0; k < models.size(); ++k) {
    double wk = w.at(k);
    if (wk == 0.0 || k == 0) continue;
    for (std::size_t i = 0; i < result.layer_count(); ++i) {
      std::vector<double>& rv = result.values(i);
      const std::vector<double>& mv = models[k].values(i);
      const std::vector<double>& base = models[0].values(i);
      for (std::size_t s = 0; s < rv.size(); ++s) {
        rv[s] += wk * (mv[s] - base[s]);
      }
    }
  }
  return result;
}

}  // namespace gtflat
