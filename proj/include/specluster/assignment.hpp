#pragma once

#include <vector>

#include <Eigen/Dense>

namespace specluster {

/// Square cost matrices; the result maps row k to column perm[k].

/// Minimizes max_k cost(k, perm[k]). Exhaustive for up to 8 rows, otherwise a
/// threshold search with bipartite matching.
std::vector<int> bottleneck_assignment(const Eigen::MatrixXd& cost);
std::vector<int> bottleneck_assignment_exhaustive(const Eigen::MatrixXd& cost);
std::vector<int> bottleneck_assignment_matching(const Eigen::MatrixXd& cost);

/// Minimizes sum_k cost(k, perm[k]).
std::vector<int> min_sum_assignment(const Eigen::MatrixXd& cost);
std::vector<int> min_sum_assignment_exhaustive(const Eigen::MatrixXd& cost);
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

}  // namespace specluster
