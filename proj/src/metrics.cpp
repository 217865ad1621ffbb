#include "specluster/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "specluster/assignment.hpp"
#include "specluster/errors.hpp"

namespace specluster {

namespace {

struct Contingency {
  int K = 0;                        // padded cluster count
  Eigen::MatrixXd overlap;          // (truth k, est j) -> |C_k ∩ T_j|
  std::vector<double> truth_sizes;  // n_k
  std::vector<double> est_sizes;    // |T_j| over all nodes
};

Contingency contingency(const Partition& est, const Partition& truth) {
  if (est.size() != truth.size())
    throw SizeError("partitions cover " + std::to_string(est.size()) + " and " +
                    std::to_string(truth.size()) + " nodes");
  Contingency c;
  c.K = std::max(est.K, truth.K);
  c.overlap = Eigen::MatrixXd::Zero(c.K, c.K);
  c.truth_sizes.assign(static_cast<std::size_t>(c.K), 0.0);
  c.est_sizes.assign(static_cast<std::size_t>(c.K), 0.0);
  for (std::size_t i = 0; i < est.size(); ++i) {
    int t = truth.labels[i], e = est.labels[i];
    if (t >= 0) c.truth_sizes[t] += 1.0;
    if (e >= 0) c.est_sizes[e] += 1.0;
    if (t >= 0 && e >= 0) c.overlap(t, e) += 1.0;
  }
  return c;
}

Eigen::MatrixXd error_costs(const Contingency& c) {
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(c.K, c.K);
  for (int k = 0; k < c.K; ++k) {
    if (c.truth_sizes[k] == 0.0) continue;
    for (int j = 0; j < c.K; ++j) {
      double shared = c.overlap(k, j);
      cost(k, j) = (c.truth_sizes[k] - shared + c.est_sizes[j] - shared) / c.truth_sizes[k];
    }
  }
  return cost;
}

void check_truth(const Contingency& c, const Partition& truth) {
  for (int k = 0; k < truth.K; ++k)
    if (c.truth_sizes[k] == 0.0) throw Error("truth cluster " + std::to_string(k) + " is empty");
}

double misclassified_from(const Contingency& c) {
  double labeled = 0.0;
  for (double s : c.truth_sizes) labeled += s;
  if (labeled == 0.0) throw Error("truth labels no nodes");
  Eigen::MatrixXd cost = -c.overlap;
  auto perm = min_sum_assignment(cost);
  double agree = 0.0;
  for (int k = 0; k < c.K; ++k) agree += c.overlap(k, perm[k]);
  return 1.0 - agree / labeled;
}

}  // namespace

ErrorReport clustering_error(const Partition& est, const Partition& truth) {
  Contingency c = contingency(est, truth);
  check_truth(c, truth);
  Eigen::MatrixXd cost = error_costs(c);
  ErrorReport report;
  report.permutation = bottleneck_assignment(cost);
  for (int k = 0; k < c.K; ++k) report.error = std::max(report.error, cost(k, report.permutation[k]));
  report.misclassified_fraction = misclassified_from(c);
  return report;
}

double clustering_error_at(const Partition& est, const Partition& truth,
                           const std::vector<int>& permutation) {
  Contingency c = contingency(est, truth);
  check_truth(c, truth);
  if (permutation.size() != static_cast<std::size_t>(c.K))
    throw SizeError("permutation length does not match the padded cluster count");
  Eigen::MatrixXd cost = error_costs(c);
  double worst = 0.0;
  for (int k = 0; k < c.K; ++k) worst = std::max(worst, cost(k, permutation[k]));
  return worst;
}

double misclassified_fraction(const Partition& est, const Partition& truth) {
  Contingency c = contingency(est, truth);
  return misclassified_from(c);
}

double nmi(const Partition& est, const Partition& truth) {
  if (est.size() != truth.size()) throw SizeError("partitions differ in size");
  const int Ke = std::max(est.K, 1), Kt = std::max(truth.K, 1);
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(Ke, Kt);
  double total = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i)
    if (est.labels[i] >= 0 && truth.labels[i] >= 0) {
      joint(est.labels[i], truth.labels[i]) += 1.0;
      total += 1.0;
    }
  if (total == 0.0) throw Error("no node is labeled in both partitions");
  joint /= total;
  Eigen::VectorXd pe = joint.rowwise().sum(), pt = joint.colwise().sum().transpose();
  auto entropy = [](const Eigen::VectorXd& p) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p(i) > 0.0) h -= p(i) * std::log(p(i));
    return h;
  };
  double he = entropy(pe), ht = entropy(pt);
  if (he + ht == 0.0) return 1.0;
  double mi = 0.0;
  for (int a = 0; a < Ke; ++a)
    for (int b = 0; b < Kt; ++b)
      if (joint(a, b) > 0.0) mi += joint(a, b) * std::log(joint(a, b) / (pe(a) * pt(b)));
  return std::clamp(mi / (0.5 * (he + ht)), 0.0, 1.0);
}

double gn_modularity(const Graph& g, const Partition& part) {
  if (part.size() != g.num_nodes()) throw SizeError("partition and graph differ in size");
  if (g.num_edges() == 0) throw Error("modularity is undefined on a graph without edges");
  const int K = std::max(part.K, 1);
  std::vector<double> inside(static_cast<std::size_t>(K), 0.0), degree(static_cast<std::size_t>(K), 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    int k = part.labels[i];
    if (k < 0) continue;
    degree[k] += static_cast<double>(g.degree(i));
    for (NodeId j : g.neighbors(i))
      if (part.labels[j] == k) inside[k] += 0.5;
  }
  const double m = static_cast<double>(g.num_edges());
  double q = 0.0;
  for (int k = 0; k < K; ++k) q += inside[k] / m - std::pow(degree[k] / (2.0 * m), 2);
  return q;
}

}  // namespace specluster
