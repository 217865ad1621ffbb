#include "specluster/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "specluster/errors.hpp"

namespace specluster {

namespace {

constexpr int kExhaustiveLimit = 8;

void check_square(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw SizeError("assignment cost matrix must be square");
}

template <typename Score>
std::vector<int> exhaustive(const Eigen::MatrixXd& cost, Score score) {
  check_square(cost);
  std::vector<int> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = std::numeric_limits<double>::infinity();
  do {
    double s = score(perm);
    if (s < best_score) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Kuhn's augmenting-path matching on the edges allowed[row][col].
bool augment(int row, const std::vector<std::vector<char>>& allowed, std::vector<int>& col_owner,
             std::vector<char>& seen) {
  for (std::size_t c = 0; c < allowed[row].size(); ++c) {
    if (!allowed[row][c] || seen[c]) continue;
    seen[c] = 1;
    if (col_owner[c] < 0 || augment(col_owner[c], allowed, col_owner, seen)) {
      col_owner[c] = row;
      return true;
    }
  }
  return false;
}

bool perfect_matching(const Eigen::MatrixXd& cost, double threshold, std::vector<int>& perm) {
  const auto K = static_cast<std::size_t>(cost.rows());
  std::vector<std::vector<char>> allowed(K, std::vector<char>(K, 0));
  for (std::size_t r = 0; r < K; ++r)
    for (std::size_t c = 0; c < K; ++c)
      allowed[r][c] = cost(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) <= threshold;
  std::vector<int> col_owner(K, -1);
  for (std::size_t r = 0; r < K; ++r) {
    std::vector<char> seen(K, 0);
    if (!augment(static_cast<int>(r), allowed, col_owner, seen)) return false;
  }
  perm.assign(K, -1);
  for (std::size_t c = 0; c < K; ++c) perm[col_owner[c]] = static_cast<int>(c);
  return true;
}

}  // namespace

std::vector<int> bottleneck_assignment_exhaustive(const Eigen::MatrixXd& cost) {
  return exhaustive(cost, [&](const std::vector<int>& perm) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < perm.size(); ++k)
      worst = std::max(worst, cost(static_cast<Eigen::Index>(k), perm[k]));
    return worst;
  });
}

std::vector<int> bottleneck_assignment_matching(const Eigen::MatrixXd& cost) {
  check_square(cost);
  if (cost.size() == 0) return {};
  std::vector<double> levels(cost.data(), cost.data() + cost.size());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::size_t lo = 0, hi = levels.size() - 1;
  std::vector<int> perm;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (perfect_matching(cost, levels[mid], perm))
      hi = mid;
    else
      lo = mid + 1;
  }
  perfect_matching(cost, levels[lo], perm);
  return perm;
}

std::vector<int> bottleneck_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() <= kExhaustiveLimit) return bottleneck_assignment_exhaustive(cost);
  return bottleneck_assignment_matching(cost);
}

std::vector<int> min_sum_assignment_exhaustive(const Eigen::MatrixXd& cost) {
  return exhaustive(cost, [&](const std::vector<int>& perm) {
    double total = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k) total += cost(static_cast<Eigen::Index>(k), perm[k]);
    return total;
  });
}

// Potentials-based O(K^3) Hungarian method, 1-indexed internally.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  check_square(cost);
  const int K = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(K + 1, 0.0), v(K + 1, 0.0);
  std::vector<int> p(K + 1, 0), way(K + 1, 0);
  for (int i = 1; i <= K; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(K + 1, inf);
    std::vector<char> used(K + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= K; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= K; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> perm(static_cast<std::size_t>(K));
  for (int j = 1; j <= K; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

std::vector<int> min_sum_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() <= kExhaustiveLimit) return min_sum_assignment_exhaustive(cost);
  return hungarian(cost);
}

}  // namespace specluster
