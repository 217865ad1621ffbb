#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "specluster/blockmodel.hpp"

namespace specluster {

/// Concentration radius for ||L_tau - population L_tau||; natural log.
double epsilon_tau(double n, double d_min, double d_max, double tau);

/// Both branches, for inspecting the jump at tau = 2 d_max.
struct EpsilonBranches {
  double small_tau = 0.0;  ///< 10 sqrt(log n) / sqrt(d_min + tau)
  double large_tau = 0.0;  ///< 10 sqrt(d_max log n) / (d_max + tau/2)
};
EpsilonBranches epsilon_branches(double n, double d_min, double d_max, double tau);

/// max{tau, d_min} >= 32 log n.
bool concentration_condition(double n, double d_min, double tau);

/// epsilon_tau over the population eigen gap.
double davis_kahan_ratio(const BlockModel& model, double tau);

/// m1 = sum w_k/g_k, m1_tilde = sum 1/g_k, m2 = sum w_k/g_k^2 with
/// g_k = n_k (p_k - q). Needs B with diagonal p_k and a common off-diagonal q.
struct Moments {
  double m1 = 0.0;
  double m1_tilde = 0.0;
  double m2 = 0.0;
  std::vector<double> gamma;
};
Moments asymptotic_moments(const BlockModel& model);

/// (m1_tilde m1 - m2) / m1, the coefficient of sqrt(d_max log n) in delta_n.
double delta_limit_coefficient(const BlockModel& model);

/// Representative of delta_n with all hidden constants set to 1.
double delta_limit(const BlockModel& model);

/// trace(B_eig(tau)^{-1}).
double trace_beig_inverse(const BlockModel& model, double tau);

/// lim trace(B_eig^{-1}) / tau = m1_tilde - m2 / m1.
double trace_beig_inverse_limit(const BlockModel& model);

struct TheoryReport {
  std::size_t n = 0;
  int K = 0;
  double tau = 0.0;
  double d_min = 0.0;
  double d_max = 0.0;
  double epsilon = 0.0;
  double eigen_gap = 0.0;
  double delta_tau = 0.0;
  bool concentration_ok = false;
  /// Fields below are NaN unless B has the diagonal-plus-q form.
  double delta_limit = 0.0;
  double m1 = 0.0;
  double m1_tilde = 0.0;
  double m2 = 0.0;
  /// (sum 1/w_k) d_max log n / tau; small when tau dominates.
  double tau_growth_ratio = 0.0;
};

TheoryReport theory_report(const BlockModel& model, double tau);

/// key = value lines.
void write_report(std::ostream& out, const TheoryReport& report);
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const TheoryReport& report);

struct ConcentrationCheck {
  bool skipped = false;  ///< concentration condition fails
  std::size_t trials = 0;
  std::size_t passes = 0;
  double epsilon = 0.0;
  std::vector<double> norms;  ///< ||L_tau - population L_tau|| per trial

  double pass_rate() const { return trials ? static_cast<double>(passes) / trials : 0.0; }
};

/// Samples `trials` graphs (seeds derived from seed) and counts how often the
/// spectral distance to the dense population Laplacian stays within epsilon_tau.
ConcentrationCheck concentration_check(const BlockModel& model, double tau, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads = 0);

struct StrongWeakConditions {
  double separation_ratio = 0.0;  ///< ((p_s - q)^2 / p_s) / (log n / n); should be large
  bool separation_ok = false;
  double weak_size_ratio = 0.0;  ///< n_w / log n; should stay bounded
  bool weak_size_ok = false;
  double cross_ratio = 0.0;  ///< b_sw / sqrt(p_s log n / n); should stay bounded
  bool cross_ok = false;
  double tau_ratio = 0.0;  ///< n p_s log n / tau; should vanish
  bool tau_ok = false;
};

/// Each flag holds when its ratio is on the right side of 1. With n_w = 0 the
/// weak-cluster flags hold vacuously.
StrongWeakConditions strong_weak_conditions(const StrongWeakParams& params, double tau);

}  // namespace specluster
