// frsd: run experiment suites, tune step sizes, analyze graphs, generate graphs.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error, 4 oracle
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "frsd/digraph.hpp"
#include "frsd/theory.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;
constexpr int kOracleError = 4;

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::size_t> cadence;
  std::size_t threads = 1;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--out-dir", o.out_dir, "Output directory (overrides output_dir)");
  cmd->add_option("--cadence", o.cadence, "Record metrics every N iterations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "Parallel run slots")->check(CLI::PositiveNumber);
}

frsd::tools::ExperimentSuite load(const std::string& path, const Overrides& o) {
  frsd::tools::ExperimentSuite suite = frsd::tools::parse_config_file(path);
  if (o.out_dir) suite.output_dir = *o.out_dir;
  if (o.cadence) suite.cadence = *o.cadence;
  return suite;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized optimization over directed graphs"};
  app.require_subcommand(1);

  Overrides run_opts;
  std::string run_config;
  CLI::App* run_cmd = app.add_subcommand("run", "Run every algorithm of a suite on every seed");
  run_cmd->add_option("config", run_config, "Suite configuration (JSON)")->required();
  add_overrides(run_cmd, run_opts);

  Overrides tune_opts;
  std::string tune_config;
  std::string tune_method;
  CLI::App* tune_cmd = app.add_subcommand("tune", "Grid-search step sizes for one algorithm");
  tune_cmd->add_option("config", tune_config, "Suite configuration (JSON)")->required();
  tune_cmd->add_option("--algorithm", tune_method, "Algorithm entry name")->required();
  add_overrides(tune_cmd, tune_opts);

  std::string graph_path;
  double alpha = 0.0;
  double beta = 0.0;
  double lipschitz = 1.0;
  double mu = 0.01;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Spectral report for a graph file");
  analyze_cmd->add_option("graph", graph_path, "Graph file")->required();
  analyze_cmd->add_option("--alpha", alpha, "Step size")->required();
  analyze_cmd->add_option("--beta", beta, "Dual step size")->required();
  analyze_cmd->add_option("--lipschitz", lipschitz, "Smoothness constant L")->capture_default_str();
  analyze_cmd->add_option("--mu", mu, "Strong convexity modulus")->capture_default_str();

  std::size_t gen_n = 0;
  double gen_phi = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("gen-graph", "Generate a strongly connected digraph");
  gen_cmd->add_option("--n", gen_n, "Number of nodes")->required();
  gen_cmd->add_option("--phi", gen_phi, "Connectivity ratio |E| / (n (n - 1))")->required();
  gen_cmd->add_option("--seed", gen_seed, "Seed")->required();
  gen_cmd->add_option("--out", gen_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) {
      const auto suite = load(run_config, run_opts);
      const auto summary = frsd::tools::run_suite(suite, run_opts.threads);
      std::printf("%zu runs written to %s\n", summary.runs.size(),
                  suite.output_dir.string().c_str());
    } else if (*tune_cmd) {
      const auto suite = load(tune_config, tune_opts);
      if (!suite.tuning) throw frsd::tools::SchemaError("/tuning", "required for tune");
      const auto result = frsd::tools::tune_grid(suite, tune_method, suite.tuning->alphas,
                                                 suite.tuning->betas, suite.tuning->budget,
                                                 tune_opts.threads);
      const std::string text = frsd::tools::to_json(result).dump(2);
      std::filesystem::create_directories(suite.output_dir);
      std::ofstream(suite.output_dir / ("tune_" + result.name + ".json")) << text << '\n';
      std::cout << text << '\n';
    } else if (*analyze_cmd) {
      const frsd::DiGraph g = frsd::read_graph_file(graph_path);
      std::cout << frsd::to_json(frsd::analyze(g, alpha, beta, lipschitz, mu)) << '\n';
    } else if (*gen_cmd) {
      frsd::write_graph_file(gen_out, frsd::generate_strongly_connected(gen_n, gen_phi, gen_seed));
    }
  } catch (const frsd::tools::SchemaError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const frsd::UnknownAlgorithm& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const frsd::OracleDidNotConverge& e) {
    std::fprintf(stderr, "oracle error: %s\n", e.what());
    return kOracleError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return 0;
}
