#pragma once

#include <string>

#include "gtflat/data_gen.hpp"
#include "gtflat/fl_core.hpp"

namespace gtflat::cli {

struct SyntheticSpec {
  std::size_t classes = 5;
  std::size_t dim = 10;
  std::size_t train_per_class = 80;
  std::size_t test_per_class = 40;
  double separation = 2.0;
};

struct IdxSpec {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
};

// Full experiment description parsed from a JSON config file. Unknown keys
// anywhere in the file are errors (typos must not silently change runs).
struct ExperimentConfig {
  TrainConfig train;        // aggregator is ignored here; cmd_run runs both
  PartitionSpec partition;  // client count mirrors train.clients
  std::size_t repeats = 5;
  std::string output_dir = "out";
  bool synthetic = true;
  SyntheticSpec synth;
  IdxSpec idx;
};

ExperimentConfig load_config(const std::string& path);

// Runs both aggregators for each of `repeats` seeds on shared partitions;
// writes run_<agg>_<seed>.csv, updates_round1_<agg>_<seed>.txt, and
// summary.csv into output_dir. Returns 0, or 1 with a diagnostic on stderr.
int cmd_run(const std::string& config_path);

// Checks the built-in three-model fixture: profile weights, the full payoff
// table, and the equilibrium weights after the 50-generation solve (the last
// within +/- tol). Returns 0 when all checks pass, 2 otherwise.
int cmd_verify_example1(double tol);

// Reads an updates file (header "k d", then k lines of d reals), solves the
// aggregation game, prints the weights as one CSV line. Returns 0, or 1 on a
// parse error.
int cmd_weights(const std::string& updates_path);

// Round-trippable 17-significant-digit formatting used in all CSV output.
std::string fmt_double(double v);

}  // namespace gtflat::cli
