#include <string>

#include "CLI11.hpp"

#include "cli_app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"federated-learning simulator with game-theoretic adaptive aggregation"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "path to the JSON experiment config")->required();

  double tol = 0.05;
  CLI::App* verify =
      app.add_subcommand("verify-example1", "check the built-in three-model fixture");
  verify->add_option("--tol", tol, "tolerance for the equilibrium-weight check");

  std::string updates_path;
  CLI::App* weights =
      app.add_subcommand("weights", "compute adaptive weights for an updates file");
  weights->add_option("updates", updates_path,
                      "updates file: header 'k d', then k lines of d reals")
      ->required();

  CLI11_PARSE(app, argc, argv);
  if (run->parsed()) return gtflat::cli::cmd_run(config_path);
  if (verify->parsed()) return gtflat::cli::cmd_verify_example1(tol);
  return gtflat::cli::cmd_weights(updates_path);
}
