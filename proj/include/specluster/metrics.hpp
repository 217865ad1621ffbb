#pragma once

#include <vector>

#include "specluster/graph.hpp"
#include "specluster/partition.hpp"

namespace specluster {

struct ErrorReport {
  /// min over matchings of the worst per-cluster (missing + intruding) / n_k.
  /// At most 2 for equal cluster sizes; intruders can push it higher otherwise.
  double error = 0.0;
  /// permutation[k] = estimated cluster matched to truth cluster k (after padding).
  std::vector<int> permutation;
  /// Share of truth-labeled nodes off their cluster under the best
  /// agreement-maximizing matching.
  double misclassified_fraction = 0.0;
};

/// Truth may leave nodes unlabeled: they belong to no C_k but still count as
/// intruders when they land in a matched estimate cluster. The side with
/// fewer clusters is padded with empty ones; empty truth clusters are skipped.
ErrorReport clustering_error(const Partition& est, const Partition& truth);

/// The error at a given matching.
double clustering_error_at(const Partition& est, const Partition& truth,
                           const std::vector<int>& permutation);

double misclassified_fraction(const Partition& est, const Partition& truth);

/// Mutual information over the arithmetic mean of the two entropies, natural
/// log, over nodes labeled on both sides. 1 when both sides are a single cluster.
double nmi(const Partition& est, const Partition& truth);

/// sum_k e_k/m - (d_k / 2m)^2. Throws on a graph without edges.
double gn_modularity(const Graph& g, const Partition& part);

}  // namespace specluster
