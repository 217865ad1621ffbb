#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specluster/graph.hpp"

namespace specluster {

/// Matrix-free symmetric operator y = Op x.
struct LinearOperator {
  std::size_t n = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

enum class LaplacianKind { regularized, degree };

/// L_tau = D_tau^{-1/2} (A + tau J) D_tau^{-1/2}, J = 11'/n, D_tau = D + tau I.
/// The tau J term is applied as a rank-one correction. Holds a reference to
/// the graph, which must outlive the operator.
class RegLaplacianOp {
 public:
  /// Throws SingularityError when some d_i + tau is zero (isolated node at tau = 0).
  RegLaplacianOp(const Graph& g, double tau);

  std::size_t n() const noexcept { return inv_sqrt_deg_.size(); }
  double tau() const noexcept { return tau_; }
  const Graph& graph() const noexcept { return *graph_; }
  std::span<const double> inv_sqrt_deg() const noexcept { return inv_sqrt_deg_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// D_tau^{-1/2} A D_tau^{-1/2}: no rank-one term.
  void apply_deg_variant(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd apply_deg_variant(const Eigen::VectorXd& x) const;

  /// Copies the operator (not the graph) into a type-erased handle.
  LinearOperator as_operator(LaplacianKind kind = LaplacianKind::regularized) const;

  Eigen::MatrixXd dense(LaplacianKind kind = LaplacianKind::regularized,
                        std::size_t cap = 5000) const;

 private:
  const Graph* graph_;
  double tau_;
  std::vector<double> inv_sqrt_deg_;
};

enum class Which { largest_algebraic, largest_magnitude };

struct EigenOptions {
  double tol = 1e-10;
  bool relative_tol = false;  ///< scale tol by the largest |Ritz value|
  int max_iter = 2000;        ///< restart cycles
  std::uint64_t seed = 0;
  std::size_t dense_threshold = 512;
  Which which = Which::largest_algebraic;
};

/// Values ordered by the target (descending, or descending |value|);
/// vectors have orthonormal columns; residuals are ||Op v - lambda v||.
struct EigenBasis {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd residuals;

  int K() const noexcept { return static_cast<int>(values.size()); }
};

/// K extreme eigenpairs. Lanczos with full reorthogonalization and thick
/// restarts; dense eigendecomposition when n <= dense_threshold.
/// Throws ConvergenceError carrying the last residual estimates.
EigenBasis top_k_eigs(const LinearOperator& op, int K, const EigenOptions& opts = {});
EigenBasis top_k_eigs(const Eigen::MatrixXd& A, int K, const EigenOptions& opts = {});

/// Largest entry in magnitude made positive; ties go to the lowest index.
void normalize_signs(Eigen::MatrixXd& vectors);

Eigen::MatrixXd materialize(const LinearOperator& op);
LinearOperator dense_operator(Eigen::MatrixXd A);
LinearOperator difference(LinearOperator a, LinearOperator b);

/// max |lambda| of a symmetric operator, relative tolerance tol.
double spectral_norm(const LinearOperator& op, double tol = 1e-6, int max_iter = 2000,
                     std::uint64_t seed = 0);
double spectral_norm_diff(const LinearOperator& a, const LinearOperator& b, double tol = 1e-6,
                          int max_iter = 2000);
double spectral_norm_diff(const LinearOperator& a, const Eigen::MatrixXd& b, double tol = 1e-6,
                          int max_iter = 2000);
double spectral_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol = 1e-6,
                          int max_iter = 2000);

/// Streams columns Op e_j; never stores the matrix.
double frobenius_norm(const LinearOperator& op);
double frobenius_norm_diff(const LinearOperator& a, const LinearOperator& b);
double frobenius_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Header row of eigenvalues, then one row of K coordinates per node.
void write_basis_csv(std::ostream& out, const EigenBasis& basis);
EigenBasis read_basis_csv(std::istream& in);

}  // namespace specluster
