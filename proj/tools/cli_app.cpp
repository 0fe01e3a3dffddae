#include "cli_app.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "gtflat/dynamics.hpp"
#include "gtflat/metrics.hpp"
#include "gtflat/rng.hpp"

namespace gtflat::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& msg) {
  throw std::runtime_error("config: " + msg);
}

void check_keys(const json& o, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) {
      if (it.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) bad_config("unknown key '" + it.key() + "' in " + where);
  }
}

const json& require_object(const json& o, const char* key) {
  const json& v = o.at(key);
  if (!v.is_object()) bad_config(std::string("'") + key + "' must be an object");
  return v;
}

std::size_t get_uint(const json& o, const char* key, std::size_t dflt) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_number_integer()) bad_config(std::string("'") + key + "' must be an integer");
  if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
    bad_config(std::string("'") + key + "' must be non-negative");
  }
  return v.get<std::size_t>();
}

std::uint64_t get_u64(const json& o, const char* key, std::uint64_t dflt) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_number_integer()) bad_config(std::string("'") + key + "' must be an integer");
  if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
    bad_config(std::string("'") + key + "' must be non-negative");
  }
  return v.get<std::uint64_t>();
}

double get_num(const json& o, const char* key, double dflt) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_number()) bad_config(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& o, const char* key, bool dflt) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_boolean()) bad_config(std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& o, const char* key, const std::string& dflt) {
  if (!o.contains(key)) return dflt;
  const json& v = o.at(key);
  if (!v.is_string()) bad_config(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::string require_str(const json& o, const char* key) {
  if (!o.contains(key)) bad_config(std::string("missing required key '") + key + "'");
  return get_str(o, key, "");
}

DynamicsConfig parse_dynamics(const json& o) {
  check_keys(o, {"generations", "tau", "fitness_shift", "stationarity_tol", "mode", "early_exit"},
             "dynamics");
  DynamicsConfig cfg;
  cfg.generations = static_cast<int>(get_uint(o, "generations", 50));
  cfg.tau = get_num(o, "tau", 1.0);
  if (o.contains("fitness_shift")) {
    const json& v = o.at("fitness_shift");
    if (v.is_string()) {
      if (v.get<std::string>() != "auto") bad_config("'fitness_shift' must be a number or \"auto\"");
    } else if (v.is_number()) {
      cfg.fitness_shift = v.get<double>();
    } else {
      bad_config("'fitness_shift' must be a number or \"auto\"");
    }
  }
  cfg.stationarity_tol = get_num(o, "stationarity_tol", 1e-8);
  std::string mode = get_str(o, "mode", "discrete");
  if (mode == "discrete") {
    cfg.mode = DynamicsMode::discrete;
  } else if (mode == "euler") {
    cfg.mode = DynamicsMode::euler;
  } else {
    bad_config("'mode' must be \"discrete\" or \"euler\"");
  }
  cfg.early_exit = get_bool(o, "early_exit", false);
  validate_dynamics_config(cfg);
  return cfg;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  if (!root.is_object()) bad_config("top level must be an object");
  check_keys(root, {"output_dir", "repeats", "seed", "train", "dynamics", "data", "partition"},
             "the top level");

  ExperimentConfig cfg;
  cfg.output_dir = get_str(root, "output_dir", "out");
  if (cfg.output_dir.empty()) bad_config("'output_dir' must be non-empty");
  cfg.repeats = get_uint(root, "repeats", 5);
  if (cfg.repeats < 1) bad_config("'repeats' must be >= 1");
  cfg.train.seed = get_u64(root, "seed", 42);

  if (root.contains("train")) {
    const json& t = require_object(root, "train");
    check_keys(t,
               {"rounds", "clients", "active_ratio", "local_epochs", "lr", "batch_size", "prox_mu",
                "hidden"},
               "train");
    cfg.train.rounds = get_uint(t, "rounds", cfg.train.rounds);
    cfg.train.clients = get_uint(t, "clients", cfg.train.clients);
    cfg.train.active_ratio = get_num(t, "active_ratio", cfg.train.active_ratio);
    cfg.train.local_epochs = get_uint(t, "local_epochs", cfg.train.local_epochs);
    cfg.train.lr = get_num(t, "lr", cfg.train.lr);
    cfg.train.batch_size = get_uint(t, "batch_size", cfg.train.batch_size);
    cfg.train.prox_mu = get_num(t, "prox_mu", cfg.train.prox_mu);
    cfg.train.hidden = get_uint(t, "hidden", cfg.train.hidden);
  }
  if (root.contains("dynamics")) {
    cfg.train.dynamics = parse_dynamics(require_object(root, "dynamics"));
  }
  if (root.contains("data")) {
    const json& d = require_object(root, "data");
    std::string kind = get_str(d, "kind", "synthetic");
    if (kind == "synthetic") {
      check_keys(d, {"kind", "classes", "dim", "train_per_class", "test_per_class", "separation"},
                 "data");
      cfg.synthetic = true;
      cfg.synth.classes = get_uint(d, "classes", cfg.synth.classes);
      cfg.synth.dim = get_uint(d, "dim", cfg.synth.dim);
      cfg.synth.train_per_class = get_uint(d, "train_per_class", cfg.synth.train_per_class);
      cfg.synth.test_per_class = get_uint(d, "test_per_class", cfg.synth.test_per_class);
      cfg.synth.separation = get_num(d, "separation", cfg.synth.separation);
    } else if (kind == "idx") {
      check_keys(d, {"kind", "train_images", "train_labels", "test_images", "test_labels"}, "data");
      cfg.synthetic = false;
      cfg.idx.train_images = require_str(d, "train_images");
      cfg.idx.train_labels = require_str(d, "train_labels");
      cfg.idx.test_images = require_str(d, "test_images");
      cfg.idx.test_labels = require_str(d, "test_labels");
    } else {
      bad_config("'data.kind' must be \"synthetic\" or \"idx\"");
    }
  }
  if (root.contains("partition")) {
    const json& p = require_object(root, "partition");
    check_keys(p, {"alpha", "min_per_client"}, "partition");
    cfg.partition.alpha = get_num(p, "alpha", cfg.partition.alpha);
    cfg.partition.min_per_client = get_uint(p, "min_per_client", cfg.partition.min_per_client);
  }
  cfg.partition.m = cfg.train.clients;
  validate_train_config(cfg.train);
  if (!(cfg.partition.alpha > 0.0)) bad_config("'partition.alpha' must be > 0");
  return cfg;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string fmt_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string join_ids(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += '|';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += '|';
    out += fmt_double(v[i]);
  }
  return out;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.n = rows.size();
  out.d = ds.d;
  out.classes = ds.classes;
  out.features.reserve(out.n * out.d);
  out.labels.reserve(out.n);
  for (std::size_t r : rows) {
    out.features.insert(out.features.end(), ds.features.begin() + r * ds.d,
                        ds.features.begin() + (r + 1) * ds.d);
    out.labels.push_back(ds.labels[r]);
  }
  return out;
}

const char* agg_name(Aggregator a) { return a == Aggregator::fedavg ? "fedavg" : "gtflat"; }

void write_run_csv(const std::string& path, const std::vector<RoundRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "round,active_ids,omega,test_accuracy,test_loss,wall_time_s\n";
  for (const RoundRecord& r : records) {
    out << r.round << ',' << join_ids(r.active_ids) << ',' << join_doubles(r.omega) << ','
        << fmt_double(r.test_accuracy) << ',' << fmt_double(r.test_loss) << ','
        << fmt_fixed6(r.wall_time) << '\n';
  }
}

void write_updates_file(const std::string& path, const std::vector<std::vector<double>>& updates) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << updates.size() << ' ' << (updates.empty() ? 0 : updates[0].size()) << '\n';
  for (const std::vector<double>& row : updates) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << fmt_double(row[i]);
    }
    out << '\n';
  }
}

struct AggOutcome {
  std::vector<AccuracySeries> series;  // one per seed
  std::vector<double> finals;
};

void write_summary(const std::string& path, const std::vector<std::uint64_t>& seeds,
                   const AggOutcome& fed, const AggOutcome& gt) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "aggregator,seeds,final_accuracy,mean_final_accuracy,std_final_accuracy,"
         "effective_round,erir_pct,mean_erir_pct\n";

  std::string seed_list;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) seed_list += '|';
    seed_list += std::to_string(seeds[i]);
  }

  auto mean_std = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    double std_dev = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair<double, double>(mean, std_dev);
  };

  for (const AggOutcome* agg : {&fed, &gt}) {
    const char* name = (agg == &fed) ? "fedavg" : "gtflat";
    std::string eff_list, erir_list;
    std::vector<double> erirs;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (i) {
        eff_list += '|';
        erir_list += '|';
      }
      // Round-efficiency target: the baseline's accuracy at its final round.
      std::size_t final_round = fed.series[i].size();
      double target = fed.series[i].back();
      std::optional<std::size_t> eff = effective_round(agg->series[i], target, 0.005);
      if (eff) eff_list += std::to_string(*eff);
      std::optional<double> e = erir(agg->series[i], fed.series[i], final_round, 0.005);
      if (e) {
        erir_list += fmt_double(*e);
        erirs.push_back(*e);
      }
    }
    auto [mean_acc, std_acc] = mean_std(agg->finals);
    out << name << ',' << seed_list << ',' << join_doubles(agg->finals) << ','
        << fmt_double(mean_acc) << ',' << fmt_double(std_acc) << ',' << eff_list << ','
        << erir_list << ',';
    if (!erirs.empty()) {
      double mean_erir = 0.0;
      for (double e : erirs) mean_erir += e;
      out << fmt_double(mean_erir / static_cast<double>(erirs.size()));
    }
    out << '\n';
  }
}

void run_experiment(const ExperimentConfig& cfg) {
  Dataset train_ds, test_ds;
  if (cfg.synthetic) {
    std::mt19937_64 data_rng = rng::stream(cfg.train.seed, rng::kData);
    train_ds = make_synthetic(cfg.synth.classes, cfg.synth.dim, cfg.synth.train_per_class,
                              cfg.synth.separation, data_rng);
    std::mt19937_64 test_rng = rng::stream(cfg.train.seed, rng::kTestData);
    test_ds = make_synthetic(cfg.synth.classes, cfg.synth.dim, cfg.synth.test_per_class,
                             cfg.synth.separation, test_rng);
  } else {
    train_ds = load_idx(cfg.idx.train_images, cfg.idx.train_labels);
    test_ds = load_idx(cfg.idx.test_images, cfg.idx.test_labels);
    // Label files may not exercise every class; align the class counts.
    train_ds.classes = test_ds.classes = std::max(train_ds.classes, test_ds.classes);
  }

  std::filesystem::create_directories(cfg.output_dir);
  std::vector<std::uint64_t> seeds;
  AggOutcome fed, gt;
  for (std::size_t i = 0; i < cfg.repeats; ++i) {
    std::uint64_t seed_i = cfg.train.seed + i;
    seeds.push_back(seed_i);

    std::mt19937_64 part_rng = rng::stream(seed_i, rng::kPartition);
    std::vector<std::vector<std::size_t>> parts = dirichlet_partition(train_ds, cfg.partition, part_rng);
    std::vector<ClientState> clients(parts.size());
    for (std::size_t j = 0; j < parts.size(); ++j) {
      clients[j].id = j;
      clients[j].data = subset(train_ds, parts[j]);
    }

    for (Aggregator agg : {Aggregator::fedavg, Aggregator::gtflat}) {
      TrainConfig tc = cfg.train;
      tc.seed = seed_i;
      tc.aggregator = agg;
      TrainingRun run = run_training(tc, clients, test_ds);

      write_run_csv(cfg.output_dir + "/run_" + agg_name(agg) + "_" + std::to_string(seed_i) + ".csv",
                    run.records);
      write_updates_file(cfg.output_dir + "/updates_round1_" + agg_name(agg) + "_" +
                             std::to_string(seed_i) + ".txt",
                         run.first_round_updates);

      AccuracySeries series;
      series.reserve(run.records.size());
      for (const RoundRecord& r : run.records) series.push_back(r.test_accuracy);
      AggOutcome& outcome = (agg == Aggregator::fedavg) ? fed : gt;
      outcome.finals.push_back(series.back());
      outcome.series.push_back(std::move(series));

      std::cout << "run aggregator=" << agg_name(agg) << " seed=" << seed_i
                << " final_accuracy=" << fmt_double(outcome.finals.back()) << "\n";
    }
  }
  write_summary(cfg.output_dir + "/summary.csv", seeds, fed, gt);
}

}  // namespace

int cmd_run(const std::string& config_path) {
  try {
    run_experiment(load_config(config_path));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify_example1(double tol) {
  // Three-model fixture: pairwise distances 0.53 (0-1), 0.55 (0-2), 0.37 (1-2).
  EvalMatrix phi(3, {0.0, -0.53, -0.55,
                     -0.53, 0.0, -0.37,
                     -0.55, -0.37, 0.0});
  bool all_ok = true;
  auto report = [&](const char* name, bool ok, const std::string& detail) {
    std::cout << "check " << name << ": " << (ok ? "ok" : "FAIL") << detail << "\n";
    if (!ok) all_ok = false;
  };

  // (a) profile (1,0,1): two votes for model 1, one for model 0.
  WeightVector w = weights_from_profile(StrategyProfile({1, 0, 1}));
  bool a_ok = w.get() == std::vector<double>{1.0 / 3.0, 2.0 / 3.0, 0.0};
  report("a (profile weights)", a_ok, a_ok ? "" : " expected (1/3, 2/3, 0)");

  // (b) the full payoff table; expected tuples derived by exact arithmetic
  // from the fixture distances (thirds).
  std::map<std::vector<std::size_t>, std::vector<double>> expected = {
      {{1, 0, 0}, {-0.53 / 3, -1.06 / 3, -1.47 / 3}},
      {{1, 0, 1}, {-1.06 / 3, -0.53 / 3, -1.29 / 3}},
      {{1, 2, 0}, {-1.08 / 3, -0.90 / 3, -0.92 / 3}},
      {{1, 2, 1}, {-1.61 / 3, -0.37 / 3, -0.74 / 3}},
      {{2, 0, 0}, {-0.55 / 3, -1.43 / 3, -1.10 / 3}},
      {{2, 0, 1}, {-1.08 / 3, -0.90 / 3, -0.92 / 3}},
      {{2, 2, 0}, {-1.10 / 3, -1.27 / 3, -0.55 / 3}},
      {{2, 2, 1}, {-1.63 / 3, -0.74 / 3, -0.37 / 3}},
  };
  auto table = enumerate_payoff_table(phi);
  bool b_ok = table.size() == expected.size();
  std::string b_detail;
  for (const auto& [profile, want] : expected) {
    auto it = table.find(profile);
    if (it == table.end()) {
      b_ok = false;
      b_detail = " missing profile";
      break;
    }
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (std::abs(it->second[i] - want[i]) > 0.005) {
        b_ok = false;
        b_detail = " payoff outside +/-0.005";
      }
    }
  }
  report("b (payoff table)", b_ok, b_detail);

  // (c) 50-generation solve from the uniform state.
  DynamicsConfig dyn;
  SolveResult res = solve_matrix(phi, dyn);
  std::vector<double> target = {0.08, 0.46, 0.46};
  bool box_ok = true;
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::abs(res.weights.at(i) - target[i]) > tol) box_ok = false;
  }
  bool msne_ok = tol > 0.0 && verify_msne(res.state, phi, tol);
  std::string c_detail = " weights=(" + fmt_double(res.weights.at(0)) + ", " +
                         fmt_double(res.weights.at(1)) + ", " + fmt_double(res.weights.at(2)) + ")";
  report("c (equilibrium weights)", box_ok && msne_ok, c_detail);

  return all_ok ? 0 : 2;
}

int cmd_weights(const std::string& updates_path) {
  try {
    std::ifstream in(updates_path);
    if (!in) throw std::runtime_error("cannot open " + updates_path);
    long long k = 0, d = 0;
    if (!(in >> k >> d) || k < 1 || d < 1) {
      throw std::runtime_error("updates file: header must be 'k d' with k >= 1, d >= 1");
    }
    std::vector<ParamVector> updates;
    updates.reserve(static_cast<std::size_t>(k));
    for (long long r = 0; r < k; ++r) {
      Layer l;
      l.shape = {static_cast<std::size_t>(d)};
      l.values.resize(static_cast<std::size_t>(d));
      for (long long c = 0; c < d; ++c) {
        if (!(in >> l.values[static_cast<std::size_t>(c)])) {
          throw std::runtime_error("updates file: expected " + std::to_string(k) + " rows of " +
                                   std::to_string(d) + " reals");
        }
      }
      updates.push_back(ParamVector({std::move(l)}));
    }
    std::string extra;
    if (in >> extra) throw std::runtime_error("updates file: trailing content after the k rows");

    SolveResult res = solve(updates, DynamicsConfig{});
    std::string line;
    for (std::size_t i = 0; i < res.weights.size(); ++i) {
      if (i) line += ',';
      line += fmt_double(res.weights.at(i));
    }
    std::cout << line << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gtflat::cli
