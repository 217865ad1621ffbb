#include "specluster/spectral.hpp"

#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>

#include "specluster/errors.hpp"

namespace specluster {

Eigen::VectorXd LinearOperator::operator()(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != n) throw SizeError("operator dimension mismatch");
  Eigen::VectorXd y(x.size());
  apply({x.data(), n}, {y.data(), n});
  return y;
}

RegLaplacianOp::RegLaplacianOp(const Graph& g, double tau) : graph_(&g), tau_(tau) {
  if (!(tau >= 0.0)) throw Error("tau must be non-negative");
  inv_sqrt_deg_.resize(g.num_nodes());
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    double d = static_cast<double>(g.degree(i)) + tau;
    if (!(d > 0.0))
      throw SingularityError("node " + std::to_string(i) +
                             " is isolated and tau = 0; the Laplacian is undefined, use tau > 0");
    inv_sqrt_deg_[i] = 1.0 / std::sqrt(d);
  }
}

void RegLaplacianOp::apply_deg_variant(std::span<const double> x, std::span<double> y) const {
  const auto offsets = graph_->row_offsets();
  const auto cols = graph_->col_indices();
  const double* s = inv_sqrt_deg_.data();
  for (std::size_t i = 0; i < n(); ++i) {
    double acc = 0.0;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) acc += s[cols[e]] * x[cols[e]];
    y[i] = s[i] * acc;
  }
}

void RegLaplacianOp::apply(std::span<const double> x, std::span<double> y) const {
  apply_deg_variant(x, y);
  if (tau_ == 0.0) return;
  double dot = 0.0;
  for (std::size_t i = 0; i < n(); ++i) dot += inv_sqrt_deg_[i] * x[i];
  const double c = tau_ / static_cast<double>(n()) * dot;
  for (std::size_t i = 0; i < n(); ++i) y[i] += c * inv_sqrt_deg_[i];
}

Eigen::VectorXd RegLaplacianOp::apply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != n()) throw SizeError("operator dimension mismatch");
  Eigen::VectorXd y(x.size());
  apply({x.data(), n()}, {y.data(), n()});
  return y;
}

Eigen::VectorXd RegLaplacianOp::apply_deg_variant(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != n()) throw SizeError("operator dimension mismatch");
  Eigen::VectorXd y(x.size());
  apply_deg_variant({x.data(), n()}, {y.data(), n()});
  return y;
}

LinearOperator RegLaplacianOp::as_operator(LaplacianKind kind) const {
  auto self = std::make_shared<const RegLaplacianOp>(*this);
  if (kind == LaplacianKind::degree)
    return {n(), [self](std::span<const double> x, std::span<double> y) {
              self->apply_deg_variant(x, y);
            }};
  return {n(), [self](std::span<const double> x, std::span<double> y) { self->apply(x, y); }};
}

Eigen::MatrixXd RegLaplacianOp::dense(LaplacianKind kind, std::size_t cap) const {
  if (n() > cap) throw SizeError("dense Laplacian exceeds the size cap");
  const auto N = static_cast<Eigen::Index>(n());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  if (kind == LaplacianKind::regularized) L.setConstant(tau_ / static_cast<double>(n()));
  for (std::size_t i = 0; i < n(); ++i)
    for (NodeId j : graph_->neighbors(i)) L(static_cast<Eigen::Index>(i), j) += 1.0;
  Eigen::Map<const Eigen::VectorXd> s(inv_sqrt_deg_.data(), N);
  return s.asDiagonal() * L * s.asDiagonal();
}

Eigen::MatrixXd materialize(const LinearOperator& op) {
  const auto N = static_cast<Eigen::Index>(op.n);
  Eigen::MatrixXd M(N, N);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    e(j) = 1.0;
    op.apply({e.data(), op.n}, {M.col(j).data(), op.n});
    e(j) = 0.0;
  }
  return M;
}

LinearOperator dense_operator(Eigen::MatrixXd A) {
  if (A.rows() != A.cols()) throw SizeError("operator matrix must be square");
  auto M = std::make_shared<const Eigen::MatrixXd>(std::move(A));
  return {static_cast<std::size_t>(M->rows()),
          [M](std::span<const double> x, std::span<double> y) {
            const auto N = M->rows();
            Eigen::Map<Eigen::VectorXd>(y.data(), N).noalias() =
                *M * Eigen::Map<const Eigen::VectorXd>(x.data(), N);
          }};
}

LinearOperator difference(LinearOperator a, LinearOperator b) {
  if (a.n != b.n) throw SizeError("operators differ in dimension");
  const std::size_t n = a.n;
  return {n, [a = std::move(a), b = std::move(b), n](std::span<const double> x,
                                                     std::span<double> y) {
            std::vector<double> tmp(n);
            a.apply(x, y);
            b.apply(x, tmp);
            for (std::size_t i = 0; i < n; ++i) y[i] -= tmp[i];
          }};
}

double frobenius_norm(const LinearOperator& op) {
  std::vector<double> e(op.n, 0.0), col(op.n);
  double total = 0.0;
  for (std::size_t j = 0; j < op.n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    e[j] = 0.0;
    for (double v : col) total += v * v;
  }
  return std::sqrt(total);
}

double frobenius_norm_diff(const LinearOperator& a, const LinearOperator& b) {
  return frobenius_norm(difference(a, b));
}

double frobenius_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw SizeError("matrix shapes differ");
  return (a - b).norm();
}

void write_basis_csv(std::ostream& out, const EigenBasis& basis) {
  out << std::setprecision(17);
  for (Eigen::Index k = 0; k < basis.values.size(); ++k)
    out << (k ? "," : "") << basis.values(k);
  out << '\n';
  for (Eigen::Index i = 0; i < basis.vectors.rows(); ++i) {
    for (Eigen::Index k = 0; k < basis.vectors.cols(); ++k)
      out << (k ? "," : "") << basis.vectors(i, k);
    out << '\n';
  }
}

EigenBasis read_basis_csv(std::istream& in) {
  auto split = [](const std::string& line, std::size_t line_no) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        out.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(line_no, "not a number: '" + cell + "'");
      }
    }
    return out;
  };
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error("eigenbasis file is empty");
  ++line_no;
  auto values = split(line, line_no);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    rows.push_back(split(line, line_no));
    if (rows.back().size() != values.size())
      throw ParseError(line_no, "expected " + std::to_string(values.size()) + " columns");
  }
  EigenBasis basis;
  const auto K = static_cast<Eigen::Index>(values.size());
  basis.values = Eigen::Map<Eigen::VectorXd>(values.data(), K);
  basis.vectors.resize(static_cast<Eigen::Index>(rows.size()), K);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index k = 0; k < K; ++k) basis.vectors(static_cast<Eigen::Index>(i), k) = rows[i][k];
  return basis;
}

}  // namespace specluster
