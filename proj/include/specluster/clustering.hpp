#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "specluster/blockmodel.hpp"
#include "specluster/graph.hpp"
#include "specluster/partition.hpp"
#include "specluster/spectral.hpp"

namespace specluster {

struct KMeansOptions {
  int restarts = 20;
  int max_iter = 100;
  std::size_t threads = 1;  ///< restarts run on this many workers
};

struct KMeansResult {
  Partition partition;
  Eigen::MatrixXd centers;  ///< K x d
  double objective = 0.0;
  /// Objective after each Lloyd step of the winning restart.
  std::vector<double> trace;
};

/// Sum over clusters of squared distances to the cluster mean.
double kmeans_objective(const Eigen::MatrixXd& points, const Partition& part);

/// Best of `restarts` Lloyd runs seeded by k-means++. Every cluster of the
/// result is non-empty. Throws when there are fewer points than clusters.
KMeansResult kmeans(const Eigen::MatrixXd& points, int K, std::uint64_t seed,
                    const KMeansOptions& opts = {});

struct RscOptions {
  KMeansOptions kmeans;
  EigenOptions eigen;
  LaplacianKind kind = LaplacianKind::regularized;
};

struct RscResult {
  Partition partition;
  EigenBasis basis;
  double objective = 0.0;
};

/// Top-K eigenvectors of L_tau, then k-means on their rows.
RscResult rsc(const Graph& g, int K, double tau, std::uint64_t seed, const RscOptions& opts = {});

/// Largest delta over cluster pairs of
///   sqrt(K) ||X - M|| (1/sqrt(n_k) + 1/sqrt(n_k')) / ||m_k - m_k'||
/// where M repeats each cluster's center row. `centers` is either that n x d
/// matrix or the K x d table of centers. Infinity when two centers coincide.
double center_separation_margin(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                                const Partition& membership);

/// Same quantity for a population model with ||X - M|| = perturbation and the
/// exact center distances sqrt(1/n_k + 1/n_k').
double center_separation_margin(double perturbation, const BlockModel& model);

}  // namespace specluster
