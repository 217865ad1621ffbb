#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "specluster/clustering.hpp"
#include "specluster/graph.hpp"
#include "specluster/partition.hpp"
#include "specluster/spectral.hpp"

namespace specluster {

enum class ModelKind { sbm, dsbm };
enum class NormKind { spectral, frobenius };
enum class Criterion { dkest, gn, oracle };

ModelKind parse_model_kind(std::string_view s);
NormKind parse_norm_kind(std::string_view s);
std::string_view to_string(ModelKind k);
std::string_view to_string(NormKind k);
std::string_view to_string(Criterion c);

struct BlockEstimate {
  Eigen::MatrixXd proportions;  ///< counts / (n_k1 n_k2)
  Eigen::MatrixXd counts;       ///< ordered-pair edge counts; diagonal blocks count each edge twice
};

/// Throws when the partition leaves a cluster empty or a node unlabeled.
BlockEstimate estimate_block_matrix(const Graph& g, const Partition& part);

/// theta_i = d_i / sum_k' counts(z_i, k'); zero for nodes of edgeless clusters.
std::vector<double> estimate_theta(const Graph& g, const Partition& part,
                                   const BlockEstimate& est);

/// Dense P-hat = Theta Z counts Z' Theta with entries clamped to 1.
Eigen::MatrixXd dsbm_edge_probabilities(const Graph& g, const Partition& part,
                                        std::size_t cap = 5000);

/// The fitted population Laplacian as an implicit operator.
struct EstimatedLaplacian {
  LinearOperator op;
  double mu_K = 0.0;          ///< K-th largest eigenvalue; see estimated_laplacian
  std::size_t clamped = 0;    ///< ordered pairs (diagonal included) with P-hat clamped to 1
};

/// sbm: population Laplacian of (part, B-hat proportions).
/// dsbm: (D + tau I)^{-1/2} (P-hat + tau/n 11') (D + tau I)^{-1/2}, D the sample degrees.
/// Throws DegenerateModelError when mu_K < 1e-12.
EstimatedLaplacian estimated_laplacian(const Graph& g, const Partition& part, double tau,
                                       ModelKind kind);

struct DkestParts {
  double numerator = 0.0;
  double mu_K = 0.0;
  double statistic = 0.0;
  std::size_t clamped = 0;
};

DkestParts dkest(const Graph& g, const Partition& part, double tau, ModelKind model,
                 NormKind norm);
double dkest_statistic(const Graph& g, const Partition& part, double tau, ModelKind model,
                       NormKind norm);

std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

/// "min:max:points", geometric.
std::vector<double> parse_grid(std::string_view spec);

/// 20 geometric points from max(1, mean degree / 10) to 10 n, preceded by 0
/// when the graph has no isolated nodes.
std::vector<double> default_grid(const Graph& g, std::size_t points = 20);

struct ScanOptions {
  std::vector<Criterion> criteria{Criterion::dkest, Criterion::gn};
  ModelKind model = ModelKind::sbm;
  NormKind norm = NormKind::spectral;
  RscOptions rsc;
  std::size_t threads = 0;  ///< grid points in parallel; 0 = worker_count()
};

struct TauRecord {
  double tau = 0.0;
  double dkest = 0.0;  ///< +inf when the estimate is degenerate
  double gn_modularity = 0.0;
  double nmi = 0.0;  ///< NaN without truth
  double misclassified_fraction = 0.0;
  double seconds = 0.0;
  Partition partition;
  std::string error;  ///< non-empty when clustering failed at this tau
};

struct TauScan {
  std::vector<double> grid;
  std::vector<TauRecord> records;
  std::vector<Criterion> criteria;

  /// Index of the grid point selected by c, first on ties; nullopt when no
  /// record has a usable value.
  std::optional<std::size_t> chosen_index(Criterion c) const;
  std::optional<double> chosen_tau(Criterion c) const;
};

/// rsc at every grid point with the same seed, then each requested criterion.
/// The oracle criterion needs truth.
TauScan scan(const Graph& g, int K, const std::vector<double>& grid, std::uint64_t seed,
             const ScanOptions& opts = {}, const Partition* truth = nullptr);

/// Columns tau,dkest,gn_modularity,nmi,misclassified_fraction,seconds and a
/// closing '#' line with the chosen tau per criterion. seconds is written as 0
/// unless timing is set, keeping output reproducible.
void write_scan_csv(std::ostream& out, const TauScan& scan, bool timing = false);

}  // namespace specluster
