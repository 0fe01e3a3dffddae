#include "gtflat/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gtflat {

namespace {

bool is_logistic(const ParamVector& p) {
  if (p.layer_count() == 2) return true;
  if (p.layer_count() == 4) return false;
  throw std::invalid_argument("model: expected 2 layers (logistic) or 4 layers (tanh MLP)");
}

void check_row(const ParamVector& p, const Dataset& ds) {
  std::size_t in_dim = p.layer(0).shape.at(1);
  if (in_dim != ds.d) throw std::invalid_argument("model: feature dimension mismatch");
}

// z <- W x + b for one (rows x cols) weight layer.
void affine(const std::vector<double>& w, const std::vector<double>& b, std::size_t rows,
            std::size_t cols, const double* x, std::vector<double>& z) {
  z.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* wr = &w[r * cols];
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    z[r] = acc;
  }
}

std::vector<double> softmax(const std::vector<double>& z) {
  double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    p[c] = std::exp(z[c] - zmax);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

double log_sum_exp(const std::vector<double>& z) {
  double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - zmax);
  return zmax + std::log(sum);
}

}  // namespace

ParamVector init_model(std::size_t classes, std::size_t dim, std::size_t hidden,
                       std::mt19937_64& rng) {
  if (classes < 2) throw std::invalid_argument("init_model: need at least 2 classes");
  if (dim < 1) throw std::invalid_argument("init_model: dimension must be >= 1");
  std::normal_distribution<double> weight(0.0, 0.1);
  auto weight_layer = [&](std::size_t rows, std::size_t cols) {
    Layer l;
    l.shape = {rows, cols};
    l.values.resize(rows * cols);
    for (double& v : l.values) v = weight(rng);
    return l;
  };
  auto bias_layer = [](std::size_t rows) {
    Layer l;
    l.shape = {rows};
    l.values.assign(rows, 0.0);
    return l;
  };
  std::vector<Layer> layers;
  if (hidden == 0) {
    layers.push_back(weight_layer(classes, dim));
    layers.push_back(bias_layer(classes));
  } else {
    layers.push_back(weight_layer(hidden, dim));
    layers.push_back(bias_layer(hidden));
    layers.push_back(weight_layer(classes, hidden));
    layers.push_back(bias_layer(classes));
  }
  return ParamVector(std::move(layers));
}

std::vector<double> model_scores(const ParamVector& p, const Dataset& ds, std::size_t row) {
  if (row >= ds.n) throw std::invalid_argument("model_scores: row out of range");
  check_row(p, ds);
  const double* x = &ds.features[row * ds.d];
  std::vector<double> z;
  if (is_logistic(p)) {
    affine(p.values(0), p.values(1), p.layer(0).shape[0], ds.d, x, z);
    return z;
  }
  std::size_t h = p.layer(0).shape[0];
  std::vector<double> hidden;
  affine(p.values(0), p.values(1), h, ds.d, x, hidden);
  for (double& v : hidden) v = std::tanh(v);
  affine(p.values(2), p.values(3), p.layer(2).shape[0], h, hidden.data(), z);
  return z;
}

double model_loss(const ParamVector& p, const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> all;
  const std::vector<std::size_t>* rows = &idx;
  if (idx.empty()) {
    all.resize(ds.n);
    for (std::size_t r = 0; r < ds.n; ++r) all[r] = r;
    rows = &all;
  }
  double total = 0.0;
  for (std::size_t r : *rows) {
    std::vector<double> z = model_scores(p, ds, r);
    total += log_sum_exp(z) - z[ds.labels[r]];
  }
  return total / static_cast<double>(rows->size());
}

ParamVector model_gradient(const ParamVector& p, const Dataset& ds,
                           const std::vector<std::size_t>& batch) {
  if (batch.empty()) throw std::invalid_argument("model_gradient: empty batch");
  check_row(p, ds);
  // Zero-initialized gradient with the same layout.
  ParamVector grad = p;
  for (std::size_t l = 0; l < grad.layer_count(); ++l) {
    std::fill(grad.values(l).begin(), grad.values(l).end(), 0.0);
  }
  double inv_n = 1.0 / static_cast<double>(batch.size());

  if (is_logistic(p)) {
    std::size_t classes = p.layer(0).shape[0];
    std::vector<double> z;
    for (std::size_t r : batch) {
      if (r >= ds.n) throw std::invalid_argument("model_gradient: row out of range");
      const double* x = &ds.features[r * ds.d];
      affine(p.values(0), p.values(1), classes, ds.d, x, z);
      std::vector<double> prob = softmax(z);
      prob[ds.labels[r]] -= 1.0;  // dL/dz = softmax(z) - one_hot(y)
      for (std::size_t c = 0; c < classes; ++c) {
        double dz = prob[c] * inv_n;
        double* gw = &grad.values(0)[c * ds.d];
        for (std::size_t f = 0; f < ds.d; ++f) gw[f] += dz * x[f];
        grad.values(1)[c] += dz;
      }
    }
    return grad;
  }

  std::size_t h = p.layer(0).shape[0];
  std::size_t classes = p.layer(2).shape[0];
  std::vector<double> pre, hid, z, dhid;
  for (std::size_t r : batch) {
    if (r >= ds.n) throw std::invalid_argument("model_gradient: row out of range");
    const double* x = &ds.features[r * ds.d];
    affine(p.values(0), p.values(1), h, ds.d, x, pre);
    hid = pre;
    for (double& v : hid) v = std::tanh(v);
    affine(p.values(2), p.values(3), classes, h, hid.data(), z);
    std::vector<double> prob = softmax(z);
    prob[ds.labels[r]] -= 1.0;
    dhid.assign(h, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
      double dz = prob[c] * inv_n;
      double* gw2 = &grad.values(2)[c * h];
      const double* w2 = &p.values(2)[c * h];
      for (std::size_t i = 0; i < h; ++i) {
        gw2[i] += dz * hid[i];
        dhid[i] += dz * w2[i];
      }
      grad.values(3)[c] += dz;
    }
    for (std::size_t i = 0; i < h; ++i) {
      double dpre = dhid[i] * (1.0 - hid[i] * hid[i]);  // tanh'
      double* gw1 = &grad.values(0)[i * ds.d];
      for (std::size_t f = 0; f < ds.d; ++f) gw1[f] += dpre * x[f];
      grad.values(1)[i] += dpre;
    }
  }
  return grad;
}

}  // namespace gtflat
