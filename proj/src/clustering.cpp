#include "specluster/clustering.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "specluster/errors.hpp"
#include "specluster/parallel.hpp"
#include "specluster/random.hpp"

namespace specluster {

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
};

Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& X, const std::vector<int>& labels, int K,
                              std::vector<std::size_t>& counts) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(K, X.cols());
  counts.assign(static_cast<std::size_t>(K), 0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    C.row(labels[i]) += X.row(i);
    ++counts[labels[i]];
  }
  for (int k = 0; k < K; ++k)
    if (counts[k] > 0) C.row(k) /= static_cast<double>(counts[k]);
  return C;
}

double sse(const Eigen::MatrixXd& X, const std::vector<int>& labels, const Eigen::MatrixXd& C) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) total += (X.row(i) - C.row(labels[i])).squaredNorm();
  return total;
}

Eigen::MatrixXd plus_plus_seeding(const Eigen::MatrixXd& X, int K, Rng& rng) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd C(K, X.cols());
  std::uniform_int_distribution<Eigen::Index> uniform(0, n - 1);
  C.row(0) = X.row(uniform(rng));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (X.row(i) - C.row(0)).squaredNorm();
  for (int k = 1; k < K; ++k) {
    double total = d2.sum();
    Eigen::Index pick;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng), acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (d2(i) > 0.0 && acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform(rng);
    }
    C.row(k) = X.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (X.row(i) - C.row(k)).squaredNorm());
  }
  return C;
}

Run lloyd(const Eigen::MatrixXd& X, int K, int max_iter, Rng& rng) {
  const Eigen::Index n = X.rows();
  Run run;
  run.centers = plus_plus_seeding(X, K, rng);
  run.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> next(static_cast<std::size_t>(n));
  std::vector<std::size_t> counts;

  for (int it = 0; it < max_iter; ++it) {
    counts.assign(static_cast<std::size_t>(K), 0);
    Eigen::VectorXd dist(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (X.row(i) - run.centers.row(0)).squaredNorm();
      for (int k = 1; k < K; ++k) {
        double d = (X.row(i) - run.centers.row(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      next[i] = best;
      dist(i) = best_d;
      ++counts[best];
    }
    // Empty clusters take the point farthest from its center among clusters
    // that can spare one.
    for (int k = 0; k < K; ++k) {
      if (counts[k] > 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i)
        if (counts[next[i]] >= 2 && (far < 0 || dist(i) > dist(far))) far = i;
      --counts[next[far]];
      next[far] = k;
      ++counts[k];
      dist(far) = 0.0;
    }

    bool changed = next != run.labels;
    run.labels = next;
    run.centers = cluster_means(X, run.labels, K, counts);
    run.trace.push_back(sse(X, run.labels, run.centers));
    if (!changed) break;
  }
  run.objective = run.trace.back();
  return run;
}

}  // namespace

double kmeans_objective(const Eigen::MatrixXd& points, const Partition& part) {
  if (part.size() != static_cast<std::size_t>(points.rows()))
    throw SizeError("partition and point set differ in size");
  std::vector<std::size_t> counts;
  Eigen::MatrixXd C = cluster_means(points, part.labels, part.K, counts);
  return sse(points, part.labels, C);
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int K, std::uint64_t seed,
                    const KMeansOptions& opts) {
  if (K < 1) throw Error("k-means needs K >= 1");
  if (points.rows() < K)
    throw SizeError("k-means with K = " + std::to_string(K) + " needs at least K points, got " +
                    std::to_string(points.rows()));
  if (opts.restarts < 1 || opts.max_iter < 1) throw Error("k-means needs restarts and iterations");

  std::vector<Run> runs(static_cast<std::size_t>(opts.restarts));
  parallel_for(
      runs.size(),
      [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        runs[r] = lloyd(points, K, opts.max_iter, rng);
      },
      opts.threads);

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].objective < runs[best].objective) best = r;

  KMeansResult out;
  out.partition = Partition(std::move(runs[best].labels), K);
  out.centers = std::move(runs[best].centers);
  out.objective = runs[best].objective;
  out.trace = std::move(runs[best].trace);
  return out;
}

RscResult rsc(const Graph& g, int K, double tau, std::uint64_t seed, const RscOptions& opts) {
  RegLaplacianOp op(g, tau);
  EigenOptions eig = opts.eigen;
  eig.seed = derive_seed(seed, 0);
  RscResult out;
  out.basis = top_k_eigs(op.as_operator(opts.kind), K, eig);
  KMeansResult km = kmeans(out.basis.vectors, K, derive_seed(seed, 1), opts.kmeans);
  out.partition = std::move(km.partition);
  out.objective = km.objective;
  return out;
}

double center_separation_margin(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                                const Partition& membership) {
  const int K = membership.K;
  const bool per_node = centers.rows() == points.rows();
  if ((!per_node && centers.rows() != K) || points.cols() != centers.cols() ||
      membership.size() != static_cast<std::size_t>(points.rows()))
    throw SizeError("points, centers and membership disagree in shape");
  Eigen::MatrixXd cluster_center = Eigen::MatrixXd::Zero(K, centers.cols());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(points.rows(), points.cols());
  for (std::size_t i = 0; i < membership.size(); ++i) {
    if (!membership.labeled(i)) continue;
    const auto r = static_cast<Eigen::Index>(i);
    if (per_node) {
      cluster_center.row(membership.labels[i]) = centers.row(r);
      M.row(r) = centers.row(r);
    } else {
      M.row(r) = centers.row(membership.labels[i]);
    }
  }
  if (!per_node) cluster_center = centers;
  const double perturbation = (points - M).jacobiSvd().singularValues().maxCoeff();
  auto sizes = membership.cluster_sizes();

  double delta = 0.0;
  for (int a = 0; a < K; ++a)
    for (int b = a + 1; b < K; ++b) {
      if (sizes[a] == 0 || sizes[b] == 0) continue;
      double dist = (cluster_center.row(a) - cluster_center.row(b)).norm();
      if (dist == 0.0) return std::numeric_limits<double>::infinity();
      double spread = 1.0 / std::sqrt(static_cast<double>(sizes[a])) +
                      1.0 / std::sqrt(static_cast<double>(sizes[b]));
      delta = std::max(delta, std::sqrt(static_cast<double>(K)) * perturbation * spread / dist);
    }
  return delta;
}

double center_separation_margin(double perturbation, const BlockModel& model) {
  const Eigen::MatrixXd dist = population_center_distances(model);
  const auto& sizes = model.block_sizes();
  double delta = 0.0;
  for (int a = 0; a < model.K(); ++a)
    for (int b = a + 1; b < model.K(); ++b) {
      double spread = 1.0 / std::sqrt(static_cast<double>(sizes[a])) +
                      1.0 / std::sqrt(static_cast<double>(sizes[b]));
      delta = std::max(delta,
                       std::sqrt(static_cast<double>(model.K())) * perturbation * spread / dist(a, b));
    }
  return delta;
}

}  // namespace specluster
