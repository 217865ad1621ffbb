#include "specluster/theory.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

#include "specluster/errors.hpp"
#include "specluster/parallel.hpp"
#include "specluster/random.hpp"
#include "specluster/spectral.hpp"

namespace specluster {

EpsilonBranches epsilon_branches(double n, double d_min, double d_max, double tau) {
  const double logn = std::log(n);
  return {10.0 * std::sqrt(logn) / std::sqrt(d_min + tau),
          10.0 * std::sqrt(d_max * logn) / (d_max + tau / 2.0)};
}

double epsilon_tau(double n, double d_min, double d_max, double tau) {
  auto b = epsilon_branches(n, d_min, d_max, tau);
  return tau <= 2.0 * d_max ? b.small_tau : b.large_tau;
}

bool concentration_condition(double n, double d_min, double tau) {
  return std::max(tau, d_min) >= 32.0 * std::log(n);
}

double davis_kahan_ratio(const BlockModel& model, double tau) {
  return epsilon_tau(static_cast<double>(model.n()), model.min_degree(), model.max_degree(), tau) /
         eigen_gap(model, tau);
}

Moments asymptotic_moments(const BlockModel& model) {
  const int K = model.K();
  const Eigen::MatrixXd& B = model.B();
  const double q = K > 1 ? B(0, 1) : 0.0;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      if (a != b && B(a, b) != q)
        throw ModelViolationError("block matrix needs one common off-diagonal probability");
  Moments m;
  const double n = static_cast<double>(model.n());
  for (int k = 0; k < K; ++k) {
    if (!(B(k, k) > q))
      throw ModelViolationError("p_" + std::to_string(k) + " must exceed q");
    const double nk = static_cast<double>(model.block_sizes()[k]);
    const double g = nk * (B(k, k) - q);
    const double w = nk / n;
    m.gamma.push_back(g);
    m.m1 += w / g;
    m.m1_tilde += 1.0 / g;
    m.m2 += w / (g * g);
  }
  return m;
}

double delta_limit_coefficient(const BlockModel& model) {
  Moments m = asymptotic_moments(model);
  return (m.m1_tilde * m.m1 - m.m2) / m.m1;
}

double delta_limit(const BlockModel& model) {
  return delta_limit_coefficient(model) *
         std::sqrt(model.max_degree() * std::log(static_cast<double>(model.n())));
}

double trace_beig_inverse(const BlockModel& model, double tau) {
  Eigen::MatrixXd Be = beig_matrix(model, tau);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Be);
  if (!lu.isInvertible()) throw SingularityError("B_eig is singular");
  return lu.inverse().trace();
}

double trace_beig_inverse_limit(const BlockModel& model) {
  Moments m = asymptotic_moments(model);
  return m.m1_tilde - m.m2 / m.m1;
}

TheoryReport theory_report(const BlockModel& model, double tau) {
  TheoryReport r;
  r.n = model.n();
  r.K = model.K();
  r.tau = tau;
  r.d_min = model.min_degree();
  r.d_max = model.max_degree();
  const double n = static_cast<double>(r.n);
  r.epsilon = epsilon_tau(n, r.d_min, r.d_max, tau);
  r.eigen_gap = eigen_gap(model, tau);
  r.delta_tau = r.epsilon / r.eigen_gap;
  r.concentration_ok = concentration_condition(n, r.d_min, tau);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    Moments m = asymptotic_moments(model);
    r.m1 = m.m1;
    r.m1_tilde = m.m1_tilde;
    r.m2 = m.m2;
    r.delta_limit = delta_limit(model);
  } catch (const ModelViolationError&) {
    r.m1 = r.m1_tilde = r.m2 = r.delta_limit = nan;
  }
  double inv_w = 0.0;
  for (std::size_t nk : model.block_sizes()) inv_w += n / static_cast<double>(nk);
  r.tau_growth_ratio = inv_w * r.d_max * std::log(n) / tau;
  return r;
}

void write_report(std::ostream& out, const TheoryReport& r) {
  out << std::setprecision(12) << "n = " << r.n << "\nK = " << r.K << "\ntau = " << r.tau
      << "\nd_min = " << r.d_min << "\nd_max = " << r.d_max << "\nepsilon = " << r.epsilon
      << "\neigen_gap = " << r.eigen_gap << "\ndelta_tau = " << r.delta_tau
      << "\nconcentration_ok = " << (r.concentration_ok ? "true" : "false")
      << "\ndelta_limit = " << r.delta_limit << "\nm1 = " << r.m1 << "\nm1_tilde = " << r.m1_tilde
      << "\nm2 = " << r.m2 << "\ntau_growth_ratio = " << r.tau_growth_ratio << '\n';
}

void write_report_csv_header(std::ostream& out) {
  out << "n,K,tau,d_min,d_max,epsilon,eigen_gap,delta_tau,concentration_ok,delta_limit,m1,"
         "m1_tilde,m2,tau_growth_ratio\n";
}

void write_report_csv_row(std::ostream& out, const TheoryReport& r) {
  out << std::setprecision(12) << r.n << ',' << r.K << ',' << r.tau << ',' << r.d_min << ','
      << r.d_max << ',' << r.epsilon << ',' << r.eigen_gap << ',' << r.delta_tau << ','
      << (r.concentration_ok ? 1 : 0) << ',' << r.delta_limit << ',' << r.m1 << ','
      << r.m1_tilde << ',' << r.m2 << ',' << r.tau_growth_ratio << '\n';
}

ConcentrationCheck concentration_check(const BlockModel& model, double tau, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads) {
  ConcentrationCheck check;
  const double n = static_cast<double>(model.n());
  check.epsilon = epsilon_tau(n, model.min_degree(), model.max_degree(), tau);
  if (!concentration_condition(n, model.min_degree(), tau)) {
    check.skipped = true;
    return check;
  }
  const Eigen::MatrixXd population = population_laplacian(model, tau);
  check.trials = trials;
  check.norms.assign(trials, std::numeric_limits<double>::infinity());
  parallel_for(
      trials,
      [&](std::size_t t) {
        Graph g = sample(model, derive_seed(seed, t));
        try {
          RegLaplacianOp L(g, tau);
          check.norms[t] = spectral_norm_diff(L.as_operator(), population);
        } catch (const SingularityError&) {
          // undefined sample Laplacian counts as a miss
        }
      },
      threads);
  for (double v : check.norms)
    if (v <= check.epsilon) ++check.passes;
  return check;
}

StrongWeakConditions strong_weak_conditions(const StrongWeakParams& params, double tau) {
  if (!(params.p_s > 0.0) || params.n_s == 0 || params.K < 1)
    throw Error("strong clusters need p_s > 0 and at least one node");
  const double n = static_cast<double>(params.n());
  const double logn = std::log(n);
  StrongWeakConditions c;
  c.separation_ratio = (params.p_s - params.q) * (params.p_s - params.q) / params.p_s / (logn / n);
  c.separation_ok = c.separation_ratio > 1.0;
  c.weak_size_ratio = static_cast<double>(params.n_w) / logn;
  c.weak_size_ok = params.n_w == 0 || c.weak_size_ratio <= 1.0;
  c.cross_ratio = params.b_sw / std::sqrt(params.p_s * logn / n);
  c.cross_ok = params.n_w == 0 || c.cross_ratio <= 1.0;
  c.tau_ratio = n * params.p_s * logn / tau;
  c.tau_ok = c.tau_ratio <= 1.0;
  return c;
}

}  // namespace specluster
