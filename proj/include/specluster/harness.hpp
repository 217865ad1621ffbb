#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "specluster/blockmodel.hpp"
#include "specluster/selection.hpp"

namespace specluster {

inline constexpr std::string_view kVersion = "0.1.0";

/// Equal-size blocks with B = fac * M, M having beta * w_k on the diagonal and
/// 1 elsewhere; fac is fixed by the target mean expected degree.
struct ExperimentConfig {
  std::size_t n = 0;
  int K = 0;
  std::vector<double> inside_weights;  ///< w, one per block
  double out_in_ratio = 1.0;           ///< beta
  double mean_degree = 0.0;            ///< lambda
  std::string tau_grid;                ///< "min:max:points"; empty means the default grid
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  ModelKind model = ModelKind::sbm;
  NormKind norm = NormKind::spectral;
  std::filesystem::path output;

  void validate() const;
  /// Stable "key=value;..." rendering used for the provenance hash.
  std::string canonical() const;
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Throws when some entry of B would exceed 1.
BlockModel build_experiment_model(const ExperimentConfig& cfg);

struct ReplicateResult {
  std::size_t replicate = 0;
  TauScan scan;
  std::string error;  ///< set when the replicate failed and was skipped
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ReplicateResult> replicates;

  /// Mean NMI at the tau chosen by c over successful replicates.
  double mean_chosen_nmi(Criterion c) const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads = 0);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// '#' lines: tool version, config hash and seed.
void write_provenance(std::ostream& out, std::uint64_t config_hash, std::uint64_t seed);

/// One row per (replicate, tau), then '#' summary lines with the mean chosen-tau
/// NMI per criterion.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result, bool timing = false);

}  // namespace specluster
