#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "gtflat/data_gen.hpp"
#include "gtflat/metrics.hpp"
#include "gtflat/model.hpp"
#include "properties.hpp"

using namespace gtflat;

namespace {

// Minimal big-endian IDX writer for fixtures.
void write_be32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_idx_images(const std::string& path, std::uint32_t n, std::uint32_t rows,
                      std::uint32_t cols, const std::vector<unsigned char>& bytes,
                      std::uint32_t magic = 0x00000803) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  write_be32(out, magic);
  write_be32(out, n);
  write_be32(out, rows);
  write_be32(out, cols);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_idx_labels(const std::string& path, std::uint32_t n,
                      const std::vector<unsigned char>& bytes,
                      std::uint32_t magic = 0x00000801) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  write_be32(out, magic);
  write_be32(out, n);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

double label_entropy(const std::vector<int>& labels, std::size_t classes,
                     const std::vector<std::size_t>& idx) {
  std::vector<double> hist(classes, 0.0);
  for (std::size_t r : idx) hist[labels[r]] += 1.0;
  double total = static_cast<double>(idx.size());
  double h = 0.0;
  for (double c : hist) {
    if (c > 0.0) {
      double p = c / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

double tv_to_global(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<double> global(ds.classes, 0.0), local(ds.classes, 0.0);
  for (int y : ds.labels) global[y] += 1.0;
  for (std::size_t r : idx) local[ds.labels[r]] += 1.0;
  double tv = 0.0;
  for (std::size_t c = 0; c < ds.classes; ++c) {
    tv += std::abs(local[c] / static_cast<double>(idx.size()) -
                   global[c] / static_cast<double>(ds.n));
  }
  return 0.5 * tv;
}

}  // namespace

TEST_SUITE("data_gen") {
  TEST_CASE("make_synthetic shapes, grouping, and determinism") {
    std::mt19937_64 rng(1);
    Dataset ds = make_synthetic(3, 4, 10, 2.0, rng);
    CHECK(ds.n == 30);
    CHECK(ds.d == 4);
    CHECK(ds.classes == 3);
    CHECK(ds.features.size() == 120);
    for (std::size_t r = 0; r < ds.n; ++r) {
      CHECK(ds.labels[r] == static_cast<int>(r / 10));  // grouped by class, ascending
    }

    std::mt19937_64 rng_a(99), rng_b(99);
    Dataset a = make_synthetic(2, 3, 5, 1.0, rng_a);
    Dataset b = make_synthetic(2, 3, 5, 1.0, rng_b);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);

    CHECK_THROWS_AS(make_synthetic(1, 4, 10, 2.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic(3, 0, 10, 2.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_synthetic(3, 4, 0, 2.0, rng), std::invalid_argument);
  }

  TEST_CASE("well-separated classes are learnable to 0.99; merged classes are not") {
    auto train_acc = [](const Dataset& ds, int steps, double lr) {
      std::mt19937_64 init_rng(7);
      ParamVector p = init_model(ds.classes, ds.d, 0, init_rng);
      std::vector<std::size_t> all(ds.n);
      for (std::size_t r = 0; r < ds.n; ++r) all[r] = r;
      for (int s = 0; s < steps; ++s) {
        ParamVector g = model_gradient(p, ds, all);
        for (std::size_t l = 0; l < p.layer_count(); ++l) {
          for (std::size_t v = 0; v < p.values(l).size(); ++v) {
            p.values(l)[v] -= lr * g.values(l)[v];
          }
        }
      }
      return top1_accuracy(p, ds);
    };

    std::mt19937_64 rng(42);
    Dataset separated = make_synthetic(2, 2, 60, 10.0, rng);
    CHECK(train_acc(separated, 80, 0.5) >= 0.99);

    std::mt19937_64 rng2(42);
    Dataset merged = make_synthetic(2, 2, 60, 0.0, rng2);
    double acc = train_acc(merged, 80, 0.5);
    CHECK(acc < 0.75);  // identical class distributions: near chance (0.5)
  }

  TEST_CASE("dirichlet_sample simplex and degenerate cases") {
    std::mt19937_64 rng(5);
    CHECK(dirichlet_sample({3.7}, rng) == std::vector<double>{1.0});
    CHECK_THROWS_AS(dirichlet_sample({0.5, 0.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(dirichlet_sample({}, rng), std::invalid_argument);

    for (int t = 0; t < 200; ++t) {
      std::vector<double> alpha(3, 0.05);
      std::vector<double> p = dirichlet_sample(alpha, rng);
      double sum = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }

  TEST_CASE("dirichlet_sample concentration at large alpha") {
    std::mt19937_64 rng(11);
    std::vector<double> alpha(4, 1000.0);
    int inside = 0;
    const int samples = 10000;
    for (int s = 0; s < samples; ++s) {
      std::vector<double> p = dirichlet_sample(alpha, rng);
      bool ok = true;
      for (double v : p) {
        if (std::abs(v - 0.25) > 0.1) ok = false;
      }
      if (ok) ++inside;
    }
    CHECK(static_cast<double>(inside) / samples > 0.999);
  }

  TEST_CASE("dirichlet_sample empirical means match the moment formula") {
    std::mt19937_64 rng(13);
    for (double a : {0.5, 2.0}) {
      const std::size_t dim = 3;
      std::vector<double> alpha(dim, a);
      const int samples = 10000;
      std::vector<double> mean(dim, 0.0);
      for (int s = 0; s < samples; ++s) {
        std::vector<double> p = dirichlet_sample(alpha, rng);
        for (std::size_t i = 0; i < dim; ++i) mean[i] += p[i];
      }
      double want = 1.0 / static_cast<double>(dim);
      double var = want * (1.0 - want) / (a * dim + 1.0);
      double three_sigma = 3.0 * std::sqrt(var / samples);
      for (std::size_t i = 0; i < dim; ++i) {
        mean[i] /= samples;
        CHECK(std::abs(mean[i] - want) <= three_sigma);
      }
    }
  }

  TEST_CASE("dirichlet_partition basics") {
    std::mt19937_64 rng(17);
    Dataset ds = make_synthetic(3, 2, 20, 1.0, rng);

    PartitionSpec single;
    single.m = 1;
    std::mt19937_64 prng(1);
    auto parts = dirichlet_partition(ds, single, prng);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].size() == ds.n);

    PartitionSpec infeasible;
    infeasible.m = 30;
    infeasible.min_per_client = 3;  // 90 > 60 rows
    std::mt19937_64 prng2(2);
    CHECK_THROWS_AS(dirichlet_partition(ds, infeasible, prng2), std::invalid_argument);

    PartitionSpec floor;
    floor.m = 12;
    floor.alpha = 0.05;  // extreme skew would starve clients without the floor
    floor.min_per_client = 2;
    for (int seed = 0; seed < 20; ++seed) {
      std::mt19937_64 r(seed);
      auto p = dirichlet_partition(ds, floor, r);
      for (const auto& client : p) CHECK(client.size() >= 2);
    }
  }

  TEST_CASE("small alpha concentrates labels: median client entropy under half global") {
    std::mt19937_64 data_rng(23);
    Dataset ds = make_synthetic(5, 2, 100, 1.0, data_rng);
    double global_entropy = std::log(5.0);  // balanced by construction

    PartitionSpec spec;
    spec.m = 10;
    spec.alpha = 0.05;
    std::vector<double> entropies;
    for (int seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(1000 + seed);
      for (const auto& client : dirichlet_partition(ds, spec, rng)) {
        entropies.push_back(label_entropy(ds.labels, ds.classes, client));
      }
    }
    std::sort(entropies.begin(), entropies.end());
    double median = entropies[entropies.size() / 2];
    CHECK(median < 0.5 * global_entropy);
  }

  TEST_CASE("large alpha approximates iid: client histograms near global") {
    std::mt19937_64 data_rng(29);
    Dataset ds = make_synthetic(5, 2, 100, 1.0, data_rng);
    PartitionSpec spec;
    spec.m = 10;
    spec.alpha = 1000.0;
    int close = 0, total = 0;
    for (int seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(2000 + seed);
      for (const auto& client : dirichlet_partition(ds, spec, rng)) {
        if (tv_to_global(ds, client) < 0.1) ++close;
        ++total;
      }
    }
    CHECK(static_cast<double>(close) / total > 0.99);
  }

  TEST_CASE("heterogeneity decreases monotonically in alpha") {
    std::mt19937_64 data_rng(31);
    Dataset ds = make_synthetic(5, 2, 100, 1.0, data_rng);
    auto mean_tv = [&](double alpha) {
      PartitionSpec spec;
      spec.m = 10;
      spec.alpha = alpha;
      double sum = 0.0;
      int count = 0;
      for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(3000 + seed);
        for (const auto& client : dirichlet_partition(ds, spec, rng)) {
          sum += tv_to_global(ds, client);
          ++count;
        }
      }
      return sum / count;
    };
    double tv_low = mean_tv(0.05);
    double tv_mid = mean_tv(1.0);
    double tv_high = mean_tv(100.0);
    CHECK(tv_low > tv_mid);
    CHECK(tv_mid > tv_high);
  }

  TEST_CASE("load_idx round-trips a handcrafted fixture") {
    const std::string img = "idx_fixture_images.bin";
    const std::string lab = "idx_fixture_labels.bin";
    write_idx_images(img, 2, 2, 2, {0x00, 0x33, 0x66, 0x99, 0xCC, 0xE5, 0xF2, 0xFF});
    write_idx_labels(lab, 2, {0x01, 0x00});

    Dataset ds = load_idx(img, lab);
    CHECK(ds.n == 2);
    CHECK(ds.d == 4);
    CHECK(ds.classes == 2);
    CHECK(ds.features[0] == 0.0);
    CHECK(ds.features[1] == doctest::Approx(0x33 / 255.0).epsilon(1e-15));
    CHECK(ds.features[7] == 1.0);
    CHECK(ds.labels == std::vector<int>{1, 0});
  }

  TEST_CASE("load_idx rejects malformed files") {
    const std::string img = "idx_bad_images.bin";
    const std::string lab = "idx_bad_labels.bin";

    // Label file carrying the image magic.
    write_idx_images(img, 2, 2, 2, {0, 0, 0, 0, 0, 0, 0, 0});
    write_idx_labels(lab, 2, {0, 1}, 0x00000803);
    CHECK_THROWS_AS(load_idx(img, lab), std::runtime_error);

    // Image/label count mismatch.
    write_idx_images(img, 3, 2, 2, std::vector<unsigned char>(12, 0));
    write_idx_labels(lab, 2, {0, 1});
    CHECK_THROWS_AS(load_idx(img, lab), std::runtime_error);

    // Truncated image payload.
    write_idx_images(img, 2, 2, 2, {0x00, 0x33, 0x66});
    write_idx_labels(lab, 2, {0, 1});
    CHECK_THROWS_AS(load_idx(img, lab), std::runtime_error);

    // Missing file.
    CHECK_THROWS_AS(load_idx("no_such_file.bin", lab), std::runtime_error);
  }
}
