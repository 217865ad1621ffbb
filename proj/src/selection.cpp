#include "specluster/selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>

#include "specluster/blockmodel.hpp"
#include "specluster/errors.hpp"
#include "specluster/metrics.hpp"
#include "specluster/parallel.hpp"

namespace specluster {

namespace {

constexpr double kDegenerate = 1e-12;

void check_full_partition(const Graph& g, const Partition& part) {
  if (part.size() != g.num_nodes()) throw SizeError("partition and graph differ in size");
  for (std::size_t i = 0; i < part.size(); ++i)
    if (!part.labeled(i)) throw Error("node " + std::to_string(i) + " has no cluster");
  auto sizes = part.cluster_sizes();
  for (int k = 0; k < part.K; ++k)
    if (sizes[k] == 0) throw Error("cluster " + std::to_string(k) + " is empty");
}

// K-th largest eigenvalue of an n x n matrix whose nonzero spectrum is `reduced`.
double kth_largest(Eigen::VectorXd reduced, std::size_t n, int K) {
  std::vector<double> vals(reduced.data(), reduced.data() + reduced.size());
  if (static_cast<std::size_t>(vals.size()) < n) vals.push_back(0.0);
  std::sort(vals.begin(), vals.end(), std::greater<>());
  return vals[static_cast<std::size_t>(K - 1)];
}

double check_gap(double mu) {
  if (!(mu >= kDegenerate))
    throw DegenerateModelError("K-th eigenvalue of the estimated Laplacian is " +
                               std::to_string(mu));
  return mu;
}

// D-SBM pieces shared by the operator, the dense oracle and the clamp count.
struct DsbmFit {
  std::vector<int> z;
  std::vector<double> theta;
  Eigen::MatrixXd counts;
  std::vector<std::vector<std::size_t>> sorted;  // block members by ascending theta
  bool clamps = false;
};

DsbmFit fit_dsbm(const Graph& g, const Partition& part) {
  BlockEstimate est = estimate_block_matrix(g, part);
  DsbmFit fit;
  fit.z = part.labels;
  fit.theta = estimate_theta(g, part, est);
  fit.counts = est.counts;
  fit.sorted = part.members();
  std::vector<double> max_theta(static_cast<std::size_t>(part.K), 0.0);
  for (auto& block : fit.sorted) {
    std::stable_sort(block.begin(), block.end(),
                     [&](std::size_t a, std::size_t b) { return fit.theta[a] < fit.theta[b]; });
  }
  for (int k = 0; k < part.K; ++k)
    if (!fit.sorted[k].empty()) max_theta[k] = fit.theta[fit.sorted[k].back()];
  for (int a = 0; a < part.K; ++a)
    for (int b = 0; b < part.K; ++b)
      if (max_theta[a] * max_theta[b] * fit.counts(a, b) > 1.0) fit.clamps = true;
  return fit;
}

// First position in block b whose theta_j satisfies theta_i theta_j c > 1.
std::size_t clamp_start(const DsbmFit& fit, int b, double theta_i, double c) {
  const auto& block = fit.sorted[b];
  return static_cast<std::size_t>(
      std::partition_point(block.begin(), block.end(),
                           [&](std::size_t j) { return theta_i * fit.theta[j] * c <= 1.0; }) -
      block.begin());
}

}  // namespace

ModelKind parse_model_kind(std::string_view s) {
  if (s == "sbm") return ModelKind::sbm;
  if (s == "dsbm") return ModelKind::dsbm;
  throw Error("unknown model kind '" + std::string(s) + "' (expected sbm or dsbm)");
}

NormKind parse_norm_kind(std::string_view s) {
  if (s == "spectral") return NormKind::spectral;
  if (s == "frobenius") return NormKind::frobenius;
  throw Error("unknown norm kind '" + std::string(s) + "' (expected spectral or frobenius)");
}

std::string_view to_string(ModelKind k) { return k == ModelKind::sbm ? "sbm" : "dsbm"; }
std::string_view to_string(NormKind k) { return k == NormKind::spectral ? "spectral" : "frobenius"; }
std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::dkest: return "dkest";
    case Criterion::gn: return "gn";
    case Criterion::oracle: return "oracle";
  }
  return "?";
}

BlockEstimate estimate_block_matrix(const Graph& g, const Partition& part) {
  check_full_partition(g, part);
  const int K = part.K;
  BlockEstimate est;
  est.counts = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t i = 0; i < g.num_nodes(); ++i)
    for (NodeId j : g.neighbors(i)) est.counts(part.labels[i], part.labels[j]) += 1.0;
  auto sizes = part.cluster_sizes();
  est.proportions.resize(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      est.proportions(a, b) =
          est.counts(a, b) / (static_cast<double>(sizes[a]) * static_cast<double>(sizes[b]));
  return est;
}

std::vector<double> estimate_theta(const Graph& g, const Partition& part,
                                   const BlockEstimate& est) {
  Eigen::VectorXd volume = est.counts.rowwise().sum();
  std::vector<double> theta(g.num_nodes(), 0.0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    double v = volume(part.labels[i]);
    if (v > 0.0) theta[i] = static_cast<double>(g.degree(i)) / v;
  }
  return theta;
}

Eigen::MatrixXd dsbm_edge_probabilities(const Graph& g, const Partition& part, std::size_t cap) {
  if (g.num_nodes() > cap) throw SizeError("dense estimate exceeds the size cap");
  DsbmFit fit = fit_dsbm(g, part);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      P(i, j) = std::min(1.0, fit.theta[i] * fit.theta[j] * fit.counts(fit.z[i], fit.z[j]));
  return P;
}

EstimatedLaplacian estimated_laplacian(const Graph& g, const Partition& part, double tau,
                                       ModelKind kind) {
  check_full_partition(g, part);
  const std::size_t n = g.num_nodes();
  const int K = part.K;
  const double tau_n = tau / static_cast<double>(n);
  EstimatedLaplacian out;

  if (kind == ModelKind::sbm) {
    BlockEstimate est = estimate_block_matrix(g, part);
    BlockModel fitted(part.labels, est.proportions);
    out.mu_K = check_gap(kth_largest(beig_eigenvalues(fitted, tau), n, K));
    Eigen::VectorXd bd = fitted.block_degrees();
    auto scale = std::make_shared<std::vector<double>>(n);
    for (std::size_t i = 0; i < n; ++i) (*scale)[i] = 1.0 / std::sqrt(bd(part.labels[i]) + tau);
    auto Btau = std::make_shared<Eigen::MatrixXd>(est.proportions.array() + tau_n);
    auto z = std::make_shared<std::vector<int>>(part.labels);
    out.op = {n, [scale, Btau, z, K, n](std::span<const double> x, std::span<double> y) {
                Eigen::VectorXd sums = Eigen::VectorXd::Zero(K);
                for (std::size_t i = 0; i < n; ++i) sums((*z)[i]) += (*scale)[i] * x[i];
                Eigen::VectorXd mixed = *Btau * sums;
                for (std::size_t i = 0; i < n; ++i) y[i] = (*scale)[i] * mixed((*z)[i]);
              }};
    return out;
  }

  auto fit = std::make_shared<DsbmFit>(fit_dsbm(g, part));
  auto scale = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = static_cast<double>(g.degree(i)) + tau;
    if (!(d > 0.0))
      throw SingularityError("node " + std::to_string(i) + " is isolated and tau = 0");
    (*scale)[i] = 1.0 / std::sqrt(d);
  }

  if (!fit->clamps) {
    out.op = {n, [fit, scale, K, n, tau_n](std::span<const double> x, std::span<double> y) {
                Eigen::VectorXd sums = Eigen::VectorXd::Zero(K);
                double total = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                  double u = (*scale)[i] * x[i];
                  sums(fit->z[i]) += fit->theta[i] * u;
                  total += u;
                }
                Eigen::VectorXd mixed = fit->counts * sums;
                for (std::size_t i = 0; i < n; ++i)
                  y[i] = (*scale)[i] * (fit->theta[i] * mixed(fit->z[i]) + tau_n * total);
              }};
    // Nonzero spectrum of U M U' with U = [S Theta Z, S 1], M = diag(counts, tau/n).
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (std::size_t i = 0; i < n; ++i) {
      double s2 = (*scale)[i] * (*scale)[i];
      int k = fit->z[i];
      G(k, k) += s2 * fit->theta[i] * fit->theta[i];
      G(k, K) += s2 * fit->theta[i];
      G(K, K) += s2;
    }
    for (int k = 0; k < K; ++k) G(K, k) = G(k, K);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ges(G);
    Eigen::VectorXd gv = ges.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd root = ges.eigenvectors() * gv.asDiagonal() * ges.eigenvectors().transpose();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K + 1, K + 1);
    M.topLeftCorner(K, K) = fit->counts;
    M(K, K) = tau_n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> mes(root * M * root, Eigen::EigenvaluesOnly);
    out.mu_K = check_gap(kth_largest(mes.eigenvalues(), n, K));
    return out;
  }

  // Clamped entries: within each block, nodes past a theta threshold see 1.
  for (std::size_t i = 0; i < n; ++i)
    for (int b = 0; b < K; ++b)
      out.clamped += fit->sorted[b].size() - clamp_start(*fit, b, fit->theta[i], fit->counts(fit->z[i], b));
  out.op = {n, [fit, scale, K, n, tau_n](std::span<const double> x, std::span<double> y) {
              std::vector<std::vector<double>> prefix_u(K), prefix_tu(K);
              double total = 0.0;
              for (int b = 0; b < K; ++b) {
                const auto& block = fit->sorted[b];
                prefix_u[b].assign(block.size() + 1, 0.0);
                prefix_tu[b].assign(block.size() + 1, 0.0);
                for (std::size_t r = 0; r < block.size(); ++r) {
                  double u = (*scale)[block[r]] * x[block[r]];
                  prefix_u[b][r + 1] = prefix_u[b][r] + u;
                  prefix_tu[b][r + 1] = prefix_tu[b][r] + fit->theta[block[r]] * u;
                  total += u;
                }
              }
              for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int b = 0; b < K; ++b) {
                  double c = fit->counts(fit->z[i], b);
                  std::size_t cut = clamp_start(*fit, b, fit->theta[i], c);
                  std::size_t size = fit->sorted[b].size();
                  acc += fit->theta[i] * c * prefix_tu[b][cut] + (prefix_u[b][size] - prefix_u[b][cut]);
                }
                y[i] = (*scale)[i] * (acc + tau_n * total);
              }
            }};
  EigenOptions opts;
  EigenBasis top = top_k_eigs(out.op, K, opts);
  out.mu_K = check_gap(top.values(K - 1));
  return out;
}

DkestParts dkest(const Graph& g, const Partition& part, double tau, ModelKind model,
                 NormKind norm) {
  EstimatedLaplacian fitted = estimated_laplacian(g, part, tau, model);
  RegLaplacianOp L(g, tau);
  LinearOperator diff = difference(L.as_operator(), fitted.op);
  DkestParts out;
  out.numerator = norm == NormKind::spectral ? spectral_norm(diff) : frobenius_norm(diff);
  out.mu_K = fitted.mu_K;
  out.statistic = out.numerator / out.mu_K;
  out.clamped = fitted.clamped;
  return out;
}

double dkest_statistic(const Graph& g, const Partition& part, double tau, ModelKind model,
                       NormKind norm) {
  return dkest(g, part, tau, model, norm).statistic;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  if (points == 0) throw Error("grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) throw Error("geometric grid needs 0 < min <= max");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) grid[k] = lo * std::exp(step * static_cast<double>(k));
  grid.back() = hi;
  return grid;
}

std::vector<double> parse_grid(std::string_view spec) {
  auto first = spec.find(':');
  auto second = first == std::string_view::npos ? first : spec.find(':', first + 1);
  if (second == std::string_view::npos)
    throw Error("tau grid must look like min:max:points, got '" + std::string(spec) + "'");
  try {
    std::size_t used = 0;
    std::string lo_s(spec.substr(0, first)), hi_s(spec.substr(first + 1, second - first - 1)),
        pts_s(spec.substr(second + 1));
    double lo = std::stod(lo_s, &used);
    if (used != lo_s.size()) throw std::invalid_argument(lo_s);
    double hi = std::stod(hi_s, &used);
    if (used != hi_s.size()) throw std::invalid_argument(hi_s);
    long pts = std::stol(pts_s, &used);
    if (used != pts_s.size() || pts < 1) throw std::invalid_argument(pts_s);
    return geometric_grid(lo, hi, static_cast<std::size_t>(pts));
  } catch (const std::invalid_argument&) {
    throw Error("malformed tau grid '" + std::string(spec) + "'");
  } catch (const std::out_of_range&) {
    throw Error("malformed tau grid '" + std::string(spec) + "'");
  }
}

std::vector<double> default_grid(const Graph& g, std::size_t points) {
  const double n = static_cast<double>(g.num_nodes());
  double lo = std::max(1.0, g.mean_degree() / 10.0);
  auto grid = geometric_grid(lo, std::max(lo, 10.0 * n), points);
  if (g.isolated_count() == 0) grid.insert(grid.begin(), 0.0);
  return grid;
}

std::optional<std::size_t> TauScan::chosen_index(Criterion c) const {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const TauRecord& r = records[k];
    if (!r.error.empty()) continue;
    double v = c == Criterion::dkest ? -r.dkest : c == Criterion::gn ? r.gn_modularity : r.nmi;
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) continue;
    const TauRecord* b = best ? &records[*best] : nullptr;
    double bv = !b ? 0.0 : c == Criterion::dkest ? -b->dkest : c == Criterion::gn ? b->gn_modularity : b->nmi;
    if (!best || v > bv) best = k;
  }
  return best;
}

std::optional<double> TauScan::chosen_tau(Criterion c) const {
  if (auto k = chosen_index(c)) return grid[*k];
  return std::nullopt;
}

TauScan scan(const Graph& g, int K, const std::vector<double>& grid, std::uint64_t seed,
             const ScanOptions& opts, const Partition* truth) {
  if (grid.empty()) throw Error("tau grid is empty");
  auto wants = [&](Criterion c) {
    return std::find(opts.criteria.begin(), opts.criteria.end(), c) != opts.criteria.end();
  };
  if (wants(Criterion::oracle) && !truth) throw Error("the oracle criterion needs a truth partition");
  if (truth && truth->size() != g.num_nodes()) throw SizeError("truth and graph differ in size");

  TauScan out;
  out.grid = grid;
  out.criteria = opts.criteria;
  out.records.resize(grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  parallel_for(
      grid.size(),
      [&](std::size_t k) {
        TauRecord& rec = out.records[k];
        rec.tau = grid[k];
        rec.dkest = rec.gn_modularity = rec.nmi = rec.misclassified_fraction = nan;
        auto start = std::chrono::steady_clock::now();
        try {
          RscResult res = rsc(g, K, grid[k], seed, opts.rsc);
          rec.partition = std::move(res.partition);
        } catch (const Error& e) {
          rec.error = e.what();
          return;
        }
        if (wants(Criterion::dkest)) {
          try {
            rec.dkest = dkest_statistic(g, rec.partition, grid[k], opts.model, opts.norm);
          } catch (const DegenerateModelError&) {
            rec.dkest = std::numeric_limits<double>::infinity();
          } catch (const SingularityError&) {
            rec.dkest = std::numeric_limits<double>::infinity();
          }
        }
        if (wants(Criterion::gn) && g.num_edges() > 0) rec.gn_modularity = gn_modularity(g, rec.partition);
        if (truth) {
          rec.nmi = nmi(rec.partition, *truth);
          rec.misclassified_fraction = misclassified_fraction(rec.partition, *truth);
        }
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      },
      opts.threads);
  return out;
}

void write_scan_csv(std::ostream& out, const TauScan& scan, bool timing) {
  auto cell = [](double v) {
    std::ostringstream s;
    if (std::isnan(v))
      s << "";
    else if (std::isinf(v))
      s << (v > 0 ? "inf" : "-inf");
    else
      s << std::setprecision(10) << v;
    return s.str();
  };
  out << "tau,dkest,gn_modularity,nmi,misclassified_fraction,seconds\n";
  for (const auto& r : scan.records)
    out << cell(r.tau) << ',' << cell(r.dkest) << ',' << cell(r.gn_modularity) << ','
        << cell(r.nmi) << ',' << cell(r.misclassified_fraction) << ','
        << cell(timing ? r.seconds : 0.0) << '\n';
  out << "# chosen";
  for (Criterion c : scan.criteria) {
    auto t = scan.chosen_tau(c);
    out << ' ' << to_string(c) << '=' << (t ? cell(*t) : std::string("none"));
  }
  out << '\n';
}

}  // namespace specluster
