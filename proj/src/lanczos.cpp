#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "specluster/errors.hpp"
#include "specluster/random.hpp"
#include "specluster/spectral.hpp"

namespace specluster {

namespace {

// Indices of eigenvalues sorted by the target ordering; ties keep lower index.
std::vector<Eigen::Index> target_order(const Eigen::VectorXd& vals, Which which) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(vals.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (which == Which::largest_magnitude) return std::abs(vals(a)) > std::abs(vals(b));
    return vals(a) > vals(b);
  });
  return idx;
}

Eigen::VectorXd true_residuals(const LinearOperator& op, const Eigen::VectorXd& values,
                               const Eigen::MatrixXd& vectors) {
  Eigen::VectorXd res(values.size());
  for (Eigen::Index k = 0; k < values.size(); ++k)
    res(k) = (op(vectors.col(k)) - values(k) * vectors.col(k)).norm();
  return res;
}

EigenBasis from_dense(const Eigen::MatrixXd& A, int K, Which which) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", {});
  auto order = target_order(es.eigenvalues(), which);
  EigenBasis out;
  out.values.resize(K);
  out.vectors.resize(A.rows(), K);
  for (int k = 0; k < K; ++k) {
    out.values(k) = es.eigenvalues()(order[k]);
    out.vectors.col(k) = es.eigenvectors().col(order[k]);
  }
  normalize_signs(out.vectors);
  out.residuals = (A * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm();
  return out;
}

void check_k(std::size_t n, int K) {
  if (K < 1 || static_cast<std::size_t>(K) > n)
    throw SizeError("requested " + std::to_string(K) + " eigenpairs of a " + std::to_string(n) +
                    "-dimensional operator");
}

// Orthogonalizes w against V's first `cols` columns twice; returns the coefficients.
Eigen::VectorXd orthogonalize(const Eigen::MatrixXd& V, Eigen::Index cols, Eigen::VectorXd& w) {
  auto basis = V.leftCols(cols);
  Eigen::VectorXd h = basis.transpose() * w;
  w.noalias() -= basis * h;
  Eigen::VectorXd h2 = basis.transpose() * w;
  w.noalias() -= basis * h2;
  return h + h2;
}

}  // namespace

void normalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < vectors.rows(); ++i)
      if (std::abs(vectors(i, k)) > std::abs(vectors(best, k))) best = i;
    if (vectors.rows() > 0 && vectors(best, k) < 0.0) vectors.col(k) *= -1.0;
  }
}

EigenBasis top_k_eigs(const Eigen::MatrixXd& A, int K, const EigenOptions& opts) {
  if (A.rows() != A.cols()) throw SizeError("matrix must be square");
  check_k(static_cast<std::size_t>(A.rows()), K);
  return from_dense(A, K, opts.which);
}

EigenBasis top_k_eigs(const LinearOperator& op, int K, const EigenOptions& opts) {
  const std::size_t n = op.n;
  check_k(n, K);
  if (n <= opts.dense_threshold) {
    EigenBasis out = from_dense(materialize(op), K, opts.which);
    out.residuals = true_residuals(op, out.values, out.vectors);
    return out;
  }

  const auto N = static_cast<Eigen::Index>(n);
  const Eigen::Index m = std::min<Eigen::Index>(N, std::max(2 * K + 10, 40));
  const Eigen::Index keep = std::min<Eigen::Index>(m - 1, K + (m - K) / 2);

  Rng rng(opts.seed);
  std::normal_distribution<double> gauss;
  auto random_vector = [&] {
    Eigen::VectorXd v(N);
    for (Eigen::Index i = 0; i < N; ++i) v(i) = gauss(rng);
    return v;
  };

  Eigen::MatrixXd V(N, m + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  V.col(0) = random_vector().normalized();

  Eigen::Index start = 0;
  Eigen::VectorXd estimates = Eigen::VectorXd::Constant(K, INFINITY);
  Eigen::VectorXd w(N);

  for (int cycle = 0; cycle < opts.max_iter; ++cycle) {
    Eigen::Index dim = m;
    double beta = 0.0;
    for (Eigen::Index j = start; j < m; ++j) {
      op.apply({V.col(j).data(), n}, {w.data(), n});
      Eigen::VectorXd h = orthogonalize(V, j + 1, w);
      T.block(0, j, j + 1, 1) = h;
      T.block(j, 0, 1, j + 1) = h.transpose();
      beta = w.norm();
      const double scale = std::max(1.0, std::abs(h(j)));
      if (beta <= 1e-12 * scale) {
        beta = 0.0;
        if (j + 1 == N) {
          dim = j + 1;
          break;
        }
        // Invariant subspace: continue with a fresh direction.
        w = random_vector();
        orthogonalize(V, j + 1, w);
        V.col(j + 1) = w.normalized();
      } else {
        V.col(j + 1) = w / beta;
      }
      if (j + 1 < m) {
        T(j + 1, j) = beta;
        T(j, j + 1) = beta;
      }
    }

    Eigen::MatrixXd Tm = T.topLeftCorner(dim, dim);
    Tm = 0.5 * (Tm + Tm.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
    auto order = target_order(es.eigenvalues(), opts.which);
    const Eigen::MatrixXd& Y = es.eigenvectors();

    double tol = opts.tol;
    if (opts.relative_tol) tol *= std::max(std::abs(es.eigenvalues()(order[0])), 1e-300);
    bool converged = true;
    for (int k = 0; k < K; ++k) {
      estimates(k) = std::abs(beta * Y(dim - 1, order[k]));
      if (estimates(k) > tol) converged = false;
    }

    if (converged || dim < m) {
      EigenBasis out;
      out.values.resize(K);
      Eigen::MatrixXd sel(dim, K);
      for (int k = 0; k < K; ++k) {
        out.values(k) = es.eigenvalues()(order[k]);
        sel.col(k) = Y.col(order[k]);
      }
      out.vectors = V.leftCols(dim) * sel;
      for (int k = 0; k < K; ++k) out.vectors.col(k).normalize();
      normalize_signs(out.vectors);
      out.residuals = true_residuals(op, out.values, out.vectors);
      return out;
    }

    // Thick restart: keep the best Ritz vectors and the residual direction.
    Eigen::MatrixXd sel(m, keep);
    for (Eigen::Index k = 0; k < keep; ++k) sel.col(k) = Y.col(order[k]);
    Eigen::MatrixXd kept = V.leftCols(m) * sel;
    Eigen::VectorXd residual = V.col(m);
    V.leftCols(keep) = kept;
    V.col(keep) = residual;
    T.setZero();
    for (Eigen::Index k = 0; k < keep; ++k) {
      T(k, k) = es.eigenvalues()(order[k]);
      T(k, keep) = T(keep, k) = beta * Y(m - 1, order[k]);
    }
    start = keep;
  }

  throw ConvergenceError("Lanczos did not converge in " + std::to_string(opts.max_iter) +
                             " restart cycles",
                         std::vector<double>(estimates.data(), estimates.data() + K));
}

double spectral_norm(const LinearOperator& op, double tol, int max_iter, std::uint64_t seed) {
  if (op.n == 0) return 0.0;
  EigenOptions opts;
  opts.tol = tol;
  opts.relative_tol = true;
  opts.max_iter = max_iter;
  opts.seed = seed;
  opts.which = Which::largest_magnitude;
  EigenBasis top = top_k_eigs(op, 1, opts);
  return std::abs(top.values(0));
}

double spectral_norm_diff(const LinearOperator& a, const LinearOperator& b, double tol,
                          int max_iter) {
  return spectral_norm(difference(a, b), tol, max_iter);
}

double spectral_norm_diff(const LinearOperator& a, const Eigen::MatrixXd& b, double tol,
                          int max_iter) {
  return spectral_norm(difference(a, dense_operator(b)), tol, max_iter);
}

double spectral_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol,
                          int max_iter) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw SizeError("matrix shapes differ");
  return spectral_norm(dense_operator(a - b), tol, max_iter);
}

}  // namespace specluster
