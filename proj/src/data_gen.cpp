#include "gtflat/data_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace gtflat {

void validate_dataset(const Dataset& ds) {
  if (ds.n < 1) throw std::invalid_argument("Dataset: must hold at least one example");
  if (ds.d < 1) throw std::invalid_argument("Dataset: feature dimension must be >= 1");
  if (ds.classes < 1) throw std::invalid_argument("Dataset: class count must be >= 1");
  if (ds.features.size() != ds.n * ds.d) {
    throw std::invalid_argument("Dataset: feature buffer size does not match n*d");
  }
  if (ds.labels.size() != ds.n) {
    throw std::invalid_argument("Dataset: label count does not match n");
  }
  for (double v : ds.features) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite feature");
  }
  for (int y : ds.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= ds.classes) {
      throw std::invalid_argument("Dataset: label out of range");
    }
  }
}

Dataset make_synthetic(std::size_t classes, std::size_t dim, std::size_t per_class,
                       double separation, std::mt19937_64& rng) {
  if (classes < 2) throw std::invalid_argument("make_synthetic: need at least 2 classes");
  if (dim < 1) throw std::invalid_argument("make_synthetic: dimension must be >= 1");
  if (per_class < 1) throw std::invalid_argument("make_synthetic: per_class must be >= 1");
  if (separation < 0.0) throw std::invalid_argument("make_synthetic: separation must be >= 0");

  Dataset ds;
  ds.n = classes * per_class;
  ds.d = dim;
  ds.classes = classes;
  ds.features.resize(ds.n * ds.d);
  ds.labels.resize(ds.n);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::size_t row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t axis = c % dim;
    double sign = (c / dim) % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t s = 0; s < per_class; ++s, ++row) {
      double* x = &ds.features[row * dim];
      for (std::size_t f = 0; f < dim; ++f) x[f] = noise(rng);
      x[axis] += sign * separation;
      ds.labels[row] = static_cast<int>(c);
    }
  }
  return ds;
}

std::vector<double> dirichlet_sample(const std::vector<double>& alpha, std::mt19937_64& rng) {
  if (alpha.empty()) throw std::invalid_argument("dirichlet_sample: empty alpha vector");
  for (double a : alpha) {
    if (!(a > 0.0)) throw std::invalid_argument("dirichlet_sample: alpha entries must be > 0");
  }
  std::vector<double> g(alpha.size());
  // At very small alpha individual gamma draws can underflow to zero; an
  // all-zero draw cannot be normalized, so redraw (vanishing probability).
  for (int attempt = 0; attempt < 100; ++attempt) {
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      std::gamma_distribution<double> gamma(alpha[i], 1.0);
      g[i] = gamma(rng);
      sum += g[i];
    }
    if (sum > 0.0 && std::isfinite(sum)) {
      for (double& v : g) v /= sum;
      return g;
    }
  }
  throw std::runtime_error("dirichlet_sample: repeated all-zero gamma draws");
}

std::vector<std::vector<std::size_t>> dirichlet_partition(const Dataset& ds,
                                                          const PartitionSpec& spec,
                                                          std::mt19937_64& rng) {
  validate_dataset(ds);
  if (spec.m < 1) throw std::invalid_argument("dirichlet_partition: m must be >= 1");
  if (!(spec.alpha > 0.0)) throw std::invalid_argument("dirichlet_partition: alpha must be > 0");
  if (ds.n < spec.m * spec.min_per_client) {
    throw std::invalid_argument("dirichlet_partition: dataset too small for the per-client floor");
  }

  // Row indices of each class, in dataset order.
  std::vector<std::vector<std::size_t>> by_class(ds.classes);
  for (std::size_t r = 0; r < ds.n; ++r) by_class[ds.labels[r]].push_back(r);

  std::vector<std::vector<std::size_t>> clients(spec.m);
  std::vector<double> alpha_vec(spec.m, spec.alpha);
  for (std::size_t c = 0; c < ds.classes; ++c) {
    const std::vector<std::size_t>& rows = by_class[c];
    if (rows.empty()) continue;
    std::vector<double> p = dirichlet_sample(alpha_vec, rng);

    // Largest-remainder rounding of n_c * p into integer counts.
    std::size_t n_c = rows.size();
    std::vector<std::size_t> counts(spec.m);
    std::vector<std::pair<double, std::size_t>> remainders(spec.m);
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < spec.m; ++j) {
      double target = p[j] * static_cast<double>(n_c);
      counts[j] = static_cast<std::size_t>(std::floor(target));
      remainders[j] = {target - std::floor(target), j};
      assigned += counts[j];
    }
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;  // ties: lower client id first
              });
    for (std::size_t r = 0; assigned < n_c; ++r, ++assigned) counts[remainders[r].second] += 1;

    std::size_t next = 0;
    for (std::size_t j = 0; j < spec.m; ++j) {
      for (std::size_t t = 0; t < counts[j]; ++t) clients[j].push_back(rows[next++]);
    }
  }

  // Top up clients below the floor by stealing one index at a time from the
  // currently largest client.
  while (true) {
    std::size_t poorest = 0, richest = 0;
    for (std::size_t j = 1; j < spec.m; ++j) {
      if (clients[j].size() < clients[poorest].size()) poorest = j;
      if (clients[j].size() > clients[richest].size()) richest = j;
    }
    if (clients[poorest].size() >= spec.min_per_client) break;
    clients[poorest].push_back(clients[richest].back());
    clients[richest].pop_back();
  }
  return clients;
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw std::runtime_error("load_idx: truncated file: " + path);
  }
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw std::runtime_error("load_idx: cannot open " + images_path);
  if (read_be32(img, images_path) != 0x00000803u) {
    throw std::runtime_error("load_idx: bad magic in image file " + images_path);
  }
  std::uint32_t n = read_be32(img, images_path);
  std::uint32_t rows = read_be32(img, images_path);
  std::uint32_t cols = read_be32(img, images_path);
  if (n == 0 || rows == 0 || cols == 0) {
    throw std::runtime_error("load_idx: empty image tensor in " + images_path);
  }

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw std::runtime_error("load_idx: cannot open " + labels_path);
  if (read_be32(lab, labels_path) != 0x00000801u) {
    throw std::runtime_error("load_idx: bad magic in label file " + labels_path);
  }
  std::uint32_t n_labels = read_be32(lab, labels_path);
  if (n_labels != n) {
    throw std::runtime_error("load_idx: image/label count mismatch");
  }

  Dataset ds;
  ds.n = n;
  ds.d = static_cast<std::size_t>(rows) * cols;
  ds.features.resize(ds.n * ds.d);
  ds.labels.resize(ds.n);

  std::vector<unsigned char> pixel_row(ds.d);
  for (std::size_t r = 0; r < ds.n; ++r) {
    if (!img.read(reinterpret_cast<char*>(pixel_row.data()), static_cast<std::streamsize>(ds.d))) {
      throw std::runtime_error("load_idx: truncated file: " + images_path);
    }
    for (std::size_t f = 0; f < ds.d; ++f) {
      ds.features[r * ds.d + f] = static_cast<double>(pixel_row[f]) / 255.0;
    }
  }
  int max_label = 0;
  for (std::size_t r = 0; r < ds.n; ++r) {
    char byte;
    if (!lab.read(&byte, 1)) {
      throw std::runtime_error("load_idx: truncated file: " + labels_path);
    }
    ds.labels[r] = static_cast<int>(static_cast<unsigned char>(byte));
    max_label = std::max(max_label, ds.labels[r]);
  }
  ds.classes = static_cast<std::size_t>(max_label) + 1;
  validate_dataset(ds);
  return ds;
}

}  // namespace gtflat
