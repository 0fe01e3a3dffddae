#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

namespace gtflat {

// Labeled feature vectors, row-major.
struct Dataset {
  std::size_t n = 0;        // example count
  std::size_t d = 0;        // feature dimension
  std::size_t classes = 0;  // class count C; labels in [0, C)
  std::vector<double> features;  // n * d
  std::vector<int> labels;       // n
};

// Throws invalid_argument when any Dataset invariant is broken.
void validate_dataset(const Dataset& ds);

// Per-class isotropic Gaussian blobs with unit variance. Class c's mean is
// separation * u_c where u_c is a deterministic unit vector: axis c % d with
// sign (-1)^(c / d), giving distinct placements for up to 2*d classes.
// Rows are grouped by class in ascending class order.
Dataset make_synthetic(std::size_t classes, std::size_t dim, std::size_t per_class,
                       double separation, std::mt19937_64& rng);

// Standard gamma-ratio construction; result is non-negative and sums to 1.
std::vector<double> dirichlet_sample(const std::vector<double>& alpha, std::mt19937_64& rng);

struct PartitionSpec {
  std::size_t m = 1;               // client count
  double alpha = 0.5;              // Dirichlet concentration; smaller = more heterogeneous
  std::size_t min_per_client = 1;  // floor so every client stays selectable
};

// Splits row indices across m clients: per class, proportions drawn from
// Dir(alpha * 1_m) and applied with largest-remainder rounding; afterwards
// clients below the floor repeatedly steal one index from the largest
// client. The result is always an exact partition of {0..n-1}.
std::vector<std::vector<std::size_t>> dirichlet_partition(const Dataset& ds,
                                                          const PartitionSpec& spec,
                                                          std::mt19937_64& rng);

// Big-endian IDX image/label file pair (magic 0x00000803 for 3-D image
// tensors, 0x00000801 for label vectors); pixels scaled to [0, 1], images
// flattened to rows*cols features.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

}  // namespace gtflat
