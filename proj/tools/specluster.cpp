// Command-line front end: generate, rsc, scan, experiment, theory.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specluster/blockmodel.hpp"
#include "specluster/clustering.hpp"
#include "specluster/errors.hpp"
#include "specluster/graph.hpp"
#include "specluster/harness.hpp"
#include "specluster/metrics.hpp"
#include "specluster/selection.hpp"
#include "specluster/theory.hpp"

using namespace specluster;

namespace {

// Writes to `path`, or stdout when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized spectral clustering under the stochastic block model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::uint64_t seed = 0;
  std::string out_path;
  int K = 2;
  double tau = 0.0;
  std::string grid_spec, model_kind = "sbm", norm_kind = "spectral", truth_path, labels_out;
  std::string input;
  bool timing = false;

  auto* gen = app.add_subcommand("generate", "sample a graph from a model config");
  gen->add_option("model", input, "model config file")->required()->check(CLI::ExistingFile);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path, "edge list path (default stdout)");
  gen->add_option("--labels-out", labels_out, "write the block membership here");

  auto* rsc_cmd = app.add_subcommand("rsc", "cluster a graph at one tau");
  rsc_cmd->add_option("graph", input, "edge list")->required()->check(CLI::ExistingFile);
  rsc_cmd->add_option("--k", K)->required()->check(CLI::PositiveNumber);
  rsc_cmd->add_option("--tau", tau)->check(CLI::NonNegativeNumber);
  rsc_cmd->add_option("--seed", seed);
  rsc_cmd->add_option("--truth", truth_path, "truth partition; prints error metrics")
      ->check(CLI::ExistingFile);
  rsc_cmd->add_option("--out", out_path, "partition path (default stdout)");

  auto* scan_cmd = app.add_subcommand("scan", "cluster over a tau grid and score each point");
  scan_cmd->add_option("graph", input, "edge list")->required()->check(CLI::ExistingFile);
  scan_cmd->add_option("--k", K)->required()->check(CLI::PositiveNumber);
  scan_cmd->add_option("--tau-grid", grid_spec, "min:max:points (geometric)");
  scan_cmd->add_option("--seed", seed);
  scan_cmd->add_option("--model", model_kind)->check(CLI::IsMember({"sbm", "dsbm"}));
  scan_cmd->add_option("--norm", norm_kind)->check(CLI::IsMember({"spectral", "frobenius"}));
  scan_cmd->add_option("--truth", truth_path)->check(CLI::ExistingFile);
  scan_cmd->add_option("--out", out_path, "CSV path (default stdout)");
  scan_cmd->add_flag("--timing", timing, "record wall time per grid point");

  auto* exp_cmd = app.add_subcommand("experiment", "run a simulation study from a config");
  exp_cmd->add_option("config", input)->required()->check(CLI::ExistingFile);
  std::optional<std::uint64_t> exp_seed;
  exp_cmd->add_option("--seed", exp_seed, "overrides the config seed");
  exp_cmd->add_option("--tau-grid", grid_spec);
  exp_cmd->add_option("--model", model_kind)->check(CLI::IsMember({"sbm", "dsbm"}));
  exp_cmd->add_option("--norm", norm_kind)->check(CLI::IsMember({"spectral", "frobenius"}));
  exp_cmd->add_option("--out", out_path, "CSV path (default: config output, else stdout)");
  exp_cmd->add_flag("--timing", timing);

  auto* theory_cmd = app.add_subcommand("theory", "theoretical quantities of a model at tau");
  theory_cmd->add_option("model", input, "model config file")->required()->check(CLI::ExistingFile);
  theory_cmd->add_option("--tau", tau)->required()->check(CLI::NonNegativeNumber);
  theory_cmd->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      AnyModel model = load_model_config(input);
      Graph g = sample(model, seed);
      emit(out_path, [&](std::ostream& os) { write_edge_list(os, g); });
      if (!labels_out.empty()) write_partition(labels_out, base_model(model).partition());
    } else if (*rsc_cmd) {
      LoadedGraph loaded = load_edge_list(input);
      RscResult res = rsc(loaded.graph, K, tau, seed);
      emit(out_path, [&](std::ostream& os) { write_partition(os, res.partition); });
      if (!truth_path.empty()) {
        Partition truth = read_partition(truth_path);
        ErrorReport report = clustering_error(res.partition, truth);
        std::ostream& os = out_path.empty() ? std::cerr : std::cout;
        os << "clustering_error " << report.error << "\nmisclassified_fraction "
           << report.misclassified_fraction << "\nnmi " << nmi(res.partition, truth) << '\n';
      }
    } else if (*scan_cmd) {
      LoadedGraph loaded = load_edge_list(input);
      std::optional<Partition> truth;
      if (!truth_path.empty()) truth = read_partition(truth_path);
      ScanOptions opts;
      opts.model = parse_model_kind(model_kind);
      opts.norm = parse_norm_kind(norm_kind);
      if (truth) opts.criteria.push_back(Criterion::oracle);
      auto grid = grid_spec.empty() ? default_grid(loaded.graph) : parse_grid(grid_spec);
      TauScan result = scan(loaded.graph, K, grid, seed, opts, truth ? &*truth : nullptr);
      std::string canonical = input + ";K=" + std::to_string(K) + ";grid=" + grid_spec +
                              ";model=" + model_kind + ";norm=" + norm_kind + ";truth=" + truth_path;
      emit(out_path, [&](std::ostream& os) {
        write_provenance(os, fnv1a(canonical), seed);
        write_scan_csv(os, result, timing);
      });
    } else if (*exp_cmd) {
      ExperimentConfig cfg = load_experiment_config(input);
      if (exp_seed) cfg.seed = *exp_seed;
      if (!grid_spec.empty()) cfg.tau_grid = grid_spec;
      if (exp_cmd->count("--model")) cfg.model = parse_model_kind(model_kind);
      if (exp_cmd->count("--norm")) cfg.norm = parse_norm_kind(norm_kind);
      if (!out_path.empty()) cfg.output = out_path;
      ExperimentResult result = run_experiment(cfg);
      emit(cfg.output.string(),
           [&](std::ostream& os) { write_experiment_csv(os, result, timing); });
    } else if (*theory_cmd) {
      AnyModel model = load_model_config(input);
      TheoryReport report = theory_report(base_model(model), tau);
      emit(out_path, [&](std::ostream& os) { write_report(os, report); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
