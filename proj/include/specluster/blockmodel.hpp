#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "specluster/graph.hpp"
#include "specluster/partition.hpp"

namespace specluster {

inline constexpr std::size_t kDefaultDenseCap = 5000;

/// K-block stochastic block model: membership Z and symmetric block
/// probabilities B, so that P = Z B Z'.
class BlockModel {
 public:
  BlockModel(std::vector<int> membership, Eigen::MatrixXd B);

  /// Contiguous blocks: the first sizes[0] nodes form block 0, and so on.
  static BlockModel from_sizes(const std::vector<std::size_t>& sizes, Eigen::MatrixXd B);

  std::size_t n() const noexcept { return membership_.size(); }
  int K() const noexcept { return static_cast<int>(B_.rows()); }
  const std::vector<int>& membership() const noexcept { return membership_; }
  int block_of(std::size_t i) const noexcept { return membership_[i]; }
  const Eigen::MatrixXd& B() const noexcept { return B_; }
  const std::vector<std::size_t>& block_sizes() const noexcept { return sizes_; }
  const std::vector<std::vector<std::size_t>>& block_members() const noexcept { return members_; }
  Partition partition() const { return Partition(membership_, K()); }

  /// w_k = n_k / n.
  Eigen::VectorXd weights() const;

  /// Expected degree shared by every node of block k, (P 1)_i for i in C_k.
  /// Includes the diagonal term P_ii.
  Eigen::VectorXd block_degrees() const;

  /// Per-node expected degrees d_i.
  Eigen::VectorXd node_degrees() const;
  double min_degree() const;
  double max_degree() const;

 private:
  std::vector<int> membership_;
  Eigen::MatrixXd B_;
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<std::size_t>> members_;
};

/// Degree-corrected SBM: P = Theta Z B Z' Theta.
class DegreeCorrectedModel {
 public:
  DegreeCorrectedModel(BlockModel base, std::vector<double> theta);

  const BlockModel& base() const noexcept { return base_; }
  const std::vector<double>& theta() const noexcept { return theta_; }
  std::size_t n() const noexcept { return base_.n(); }

 private:
  BlockModel base_;
  std::vector<double> theta_;
};

using AnyModel = std::variant<BlockModel, DegreeCorrectedModel>;

/// Samples each pair {i, j}, i != j, independently with probability P_ij.
Graph sample(const BlockModel& model, std::uint64_t seed);
Graph sample(const DegreeCorrectedModel& model, std::uint64_t seed);
Graph sample(const AnyModel& model, std::uint64_t seed);

/// Dense P including its diagonal. Throws SizeError when n > cap.
Eigen::MatrixXd edge_probabilities(const BlockModel& model, std::size_t cap = kDefaultDenseCap);
Eigen::MatrixXd edge_probabilities(const DegreeCorrectedModel& model,
                                   std::size_t cap = kDefaultDenseCap);

/// Dense D_tau^{-1/2} (P + (tau/n) 1 1') D_tau^{-1/2} with D_tau = diag(P 1) + tau I.
Eigen::MatrixXd population_laplacian(const BlockModel& model, double tau,
                                     std::size_t cap = kDefaultDenseCap);
Eigen::MatrixXd population_laplacian(const DegreeCorrectedModel& model, double tau,
                                     std::size_t cap = kDefaultDenseCap);

/// K x K matrix B_tau (Z' D_tau^{-1} Z) sharing the nonzero spectrum of the
/// population Laplacian. Never forms an n x n matrix.
Eigen::MatrixXd beig_matrix(const BlockModel& model, double tau);

/// Eigenvalues of beig_matrix, descending, computed through the symmetric
/// similar matrix S^{1/2} B_tau S^{1/2}.
Eigen::VectorXd beig_eigenvalues(const BlockModel& model, double tau);

/// mu_{K,tau}: the K-th largest population eigenvalue.
/// Throws DegenerateModelError when it is not bounded away from zero.
double eigen_gap(const BlockModel& model, double tau);

/// Pairwise distances between the K distinct rows of the population
/// eigenvector matrix: sqrt(1/n_k + 1/n_k') off the diagonal. Independent of tau.
Eigen::MatrixXd population_center_distances(const BlockModel& model);

/// K strong blocks of equal size with within-probability p_s and
/// between-probability q, plus n_w weak nodes split over B_w.rows() blocks.
struct StrongWeakParams {
  int K = 2;
  std::size_t n_s = 0;
  double p_s = 0.0;
  double q = 0.0;
  double b_sw = 0.0;
  std::size_t n_w = 0;
  Eigen::MatrixXd B_w;

  std::size_t n() const noexcept { return static_cast<std::size_t>(K) * n_s + n_w; }
  void validate() const;

  /// Expected degree of a strong node in the merged model.
  double strong_degree() const;
  /// Expected degree of a weak node in the merged model (weak-weak probability 1).
  double weak_degree() const;
  /// n_s (p_s - q).
  double strong_gap() const;
};

/// The (K + K_w)-block model: strong blocks, then weak blocks of near-equal
/// size (the first n_w % K_w weak blocks get one extra node).
BlockModel strong_weak_model(const StrongWeakParams& params);

/// The (K + 1)-block model with all weak nodes merged into one block whose
/// within probability is 1 and whose strong-weak probability is b_sw.
/// With n_w = 0 this is the K-block strong model.
BlockModel merged_strong_weak_model(const StrongWeakParams& params);

struct StrongWeakSpectrum {
  double mu_first = 1.0;
  double mu_repeated = 0.0;  ///< multiplicity K - 1
  double mu_last = 0.0;      ///< the (K + 1)-th eigenvalue
};

/// Closed-form nonzero spectrum of the merged model's population Laplacian.
StrongWeakSpectrum strong_weak_spectrum(const StrongWeakParams& params, double tau);

/// Key-value model description: n, K, sizes or weights, B (row-major),
/// optional theta_file (one weight per line, relative to the config file).
AnyModel parse_model_config(std::istream& in, const std::filesystem::path& base_dir = {});
AnyModel load_model_config(const std::filesystem::path& path);

const BlockModel& base_model(const AnyModel& model);

}  // namespace specluster
