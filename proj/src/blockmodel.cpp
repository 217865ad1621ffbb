#include "specluster/blockmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "specluster/errors.hpp"
#include "specluster/random.hpp"

namespace specluster {

namespace {

void check_block_matrix(const Eigen::MatrixXd& B) {
  if (B.rows() == 0 || B.rows() != B.cols()) throw Error("block matrix must be square and non-empty");
  for (Eigen::Index a = 0; a < B.rows(); ++a)
    for (Eigen::Index b = 0; b < B.cols(); ++b) {
      double v = B(a, b);
      if (!(v >= 0.0 && v <= 1.0))
        throw Error("block probability B(" + std::to_string(a) + "," + std::to_string(b) +
                    ") = " + std::to_string(v) + " outside [0, 1]");
      if (v != B(b, a)) throw Error("block matrix is not symmetric");
    }
}

void check_dense_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw SizeError("dense " + std::to_string(n) + " x " + std::to_string(n) +
                    " matrix exceeds the cap of " + std::to_string(cap));
}

Eigen::MatrixXd laplacian_from_probabilities(const Eigen::MatrixXd& P, double tau) {
  const auto n = P.rows();
  Eigen::VectorXd deg = P.rowwise().sum();
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = deg(i) + tau;
    if (!(d > 0.0))
      throw SingularityError("population degree of node " + std::to_string(i) +
                             " plus tau is zero");
    scale(i) = 1.0 / std::sqrt(d);
  }
  Eigen::MatrixXd L = P.array() + tau / static_cast<double>(n);
  return scale.asDiagonal() * L * scale.asDiagonal();
}

// Maps a linear index over {(x, y) : 0 <= x < y < m} ordered by y to the pair.
std::pair<std::size_t, std::size_t> triangular_pair(std::uint64_t idx) {
  auto y = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(idx))) / 2.0);
  while (y * (y - 1) / 2 > idx) --y;
  while ((y + 1) * y / 2 <= idx) ++y;
  return {static_cast<std::size_t>(idx - y * (y - 1) / 2), static_cast<std::size_t>(y)};
}

// Edges between blocks a <= b. accept(i, j) returns the probability of (i, j)
// relative to the candidate rate p.
template <typename Accept>
void sample_block_pair(const std::vector<std::size_t>& A, const std::vector<std::size_t>& Bm,
                       bool same, double p, Accept&& accept, Rng& rng, std::vector<Edge>& out) {
  if (!(p > 0.0)) return;
  const std::uint64_t na = A.size(), nb = Bm.size();
  const std::uint64_t pairs = same ? na * (na - 1) / 2 : na * nb;
  if (pairs == 0) return;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto emit = [&](std::size_t i, std::size_t j) {
    double r = accept(i, j);
    if (r >= 1.0 || unit(rng) < r) out.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  };

  if (p > 0.1) {
    for (std::uint64_t x = 0; x < na; ++x)
      for (std::uint64_t y = same ? x + 1 : 0; y < (same ? na : nb); ++y)
        if (p >= 1.0 || unit(rng) < p) emit(A[x], Bm[y]);
    return;
  }

  std::binomial_distribution<std::uint64_t> count_dist(pairs, p);
  const std::uint64_t count = count_dist(rng);
  std::uniform_int_distribution<std::uint64_t> pick(0, pairs - 1);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  while (chosen.size() < count) chosen.insert(pick(rng));
  std::vector<std::uint64_t> idx(chosen.begin(), chosen.end());
  std::sort(idx.begin(), idx.end());
  for (auto k : idx) {
    if (same) {
      auto [x, y] = triangular_pair(k);
      emit(A[x], A[y]);
    } else {
      emit(A[k / nb], Bm[k % nb]);
    }
  }
}

std::vector<double> parse_numbers(const std::string& text, std::size_t line) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(line, "not a number: '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

BlockModel::BlockModel(std::vector<int> membership, Eigen::MatrixXd B)
    : membership_(std::move(membership)), B_(std::move(B)) {
  check_block_matrix(B_);
  const auto K = static_cast<std::size_t>(B_.rows());
  sizes_.assign(K, 0);
  members_.assign(K, {});
  for (std::size_t i = 0; i < membership_.size(); ++i) {
    int z = membership_[i];
    if (z < 0 || static_cast<std::size_t>(z) >= K)
      throw Error("node " + std::to_string(i) + " has block label " + std::to_string(z) +
                  " outside [0, " + std::to_string(K) + ")");
    ++sizes_[static_cast<std::size_t>(z)];
    members_[static_cast<std::size_t>(z)].push_back(i);
  }
  for (std::size_t k = 0; k < K; ++k)
    if (sizes_[k] == 0) throw Error("block " + std::to_string(k) + " is empty");
}

BlockModel BlockModel::from_sizes(const std::vector<std::size_t>& sizes, Eigen::MatrixXd B) {
  std::vector<int> membership;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    membership.insert(membership.end(), sizes[k], static_cast<int>(k));
  if (static_cast<Eigen::Index>(sizes.size()) != B.rows())
    throw Error("block sizes and block matrix disagree on K");
  return BlockModel(std::move(membership), std::move(B));
}

Eigen::VectorXd BlockModel::weights() const {
  Eigen::VectorXd w(K());
  for (int k = 0; k < K(); ++k) w(k) = static_cast<double>(sizes_[k]) / static_cast<double>(n());
  return w;
}

Eigen::VectorXd BlockModel::block_degrees() const {
  Eigen::VectorXd sizes(K());
  for (int k = 0; k < K(); ++k) sizes(k) = static_cast<double>(sizes_[k]);
  return B_ * sizes;
}

Eigen::VectorXd BlockModel::node_degrees() const {
  Eigen::VectorXd bd = block_degrees();
  Eigen::VectorXd d(static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i) d(static_cast<Eigen::Index>(i)) = bd(membership_[i]);
  return d;
}

double BlockModel::min_degree() const { return block_degrees().minCoeff(); }
double BlockModel::max_degree() const { return block_degrees().maxCoeff(); }

DegreeCorrectedModel::DegreeCorrectedModel(BlockModel base, std::vector<double> theta)
    : base_(std::move(base)), theta_(std::move(theta)) {
  if (theta_.size() != base_.n()) throw Error("theta length does not match node count");
  std::vector<double> max_theta(static_cast<std::size_t>(base_.K()), 0.0);
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    if (!(theta_[i] > 0.0)) throw Error("theta_" + std::to_string(i) + " must be positive");
    auto k = static_cast<std::size_t>(base_.block_of(i));
    max_theta[k] = std::max(max_theta[k], theta_[i]);
  }
  for (int a = 0; a < base_.K(); ++a)
    for (int b = 0; b < base_.K(); ++b)
      if (max_theta[a] * max_theta[b] * base_.B()(a, b) > 1.0)
        throw Error("theta_i theta_j B exceeds 1 between blocks " + std::to_string(a) + " and " +
                    std::to_string(b));
}

Graph sample(const BlockModel& model, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  const auto& members = model.block_members();
  auto always = [](std::size_t, std::size_t) { return 1.0; };
  for (int a = 0; a < model.K(); ++a)
    for (int b = a; b < model.K(); ++b)
      sample_block_pair(members[a], members[b], a == b, model.B()(a, b), always, rng, edges);
  return Graph::from_edges(model.n(), edges);
}

Graph sample(const DegreeCorrectedModel& model, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> edges;
  const auto& base = model.base();
  const auto& theta = model.theta();
  const auto& members = base.block_members();
  std::vector<double> max_theta(static_cast<std::size_t>(base.K()), 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i)
    max_theta[base.block_of(i)] = std::max(max_theta[base.block_of(i)], theta[i]);
  for (int a = 0; a < base.K(); ++a)
    for (int b = a; b < base.K(); ++b) {
      double bab = base.B()(a, b);
      double p_max = std::min(1.0, max_theta[a] * max_theta[b] * bab);
      if (!(p_max > 0.0)) continue;
      auto accept = [&](std::size_t i, std::size_t j) { return theta[i] * theta[j] * bab / p_max; };
      sample_block_pair(members[a], members[b], a == b, p_max, accept, rng, edges);
    }
  return Graph::from_edges(model.n(), edges);
}

Graph sample(const AnyModel& model, std::uint64_t seed) {
  return std::visit([&](const auto& m) { return sample(m, seed); }, model);
}

Eigen::MatrixXd edge_probabilities(const BlockModel& model, std::size_t cap) {
  check_dense_cap(model.n(), cap);
  const auto n = static_cast<Eigen::Index>(model.n());
  Eigen::MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      P(i, j) = model.B()(model.block_of(static_cast<std::size_t>(i)),
                          model.block_of(static_cast<std::size_t>(j)));
  return P;
}

Eigen::MatrixXd edge_probabilities(const DegreeCorrectedModel& model, std::size_t cap) {
  Eigen::MatrixXd P = edge_probabilities(model.base(), cap);
  Eigen::Map<const Eigen::VectorXd> theta(model.theta().data(),
                                          static_cast<Eigen::Index>(model.theta().size()));
  return theta.asDiagonal() * P * theta.asDiagonal();
}

Eigen::MatrixXd population_laplacian(const BlockModel& model, double tau, std::size_t cap) {
  return laplacian_from_probabilities(edge_probabilities(model, cap), tau);
}

Eigen::MatrixXd population_laplacian(const DegreeCorrectedModel& model, double tau,
                                     std::size_t cap) {
  return laplacian_from_probabilities(edge_probabilities(model, cap), tau);
}

namespace {

Eigen::VectorXd reduced_weights(const BlockModel& model, double tau) {
  Eigen::VectorXd d = model.block_degrees();
  Eigen::VectorXd s(model.K());
  for (int k = 0; k < model.K(); ++k) {
    double dk = d(k) + tau;
    if (!(dk > 0.0))
      throw SingularityError("population degree of block " + std::to_string(k) +
                             " plus tau is zero");
    s(k) = static_cast<double>(model.block_sizes()[k]) / dk;
  }
  return s;
}

}  // namespace

Eigen::MatrixXd beig_matrix(const BlockModel& model, double tau) {
  Eigen::MatrixXd Btau = model.B().array() + tau / static_cast<double>(model.n());
  return Btau * reduced_weights(model, tau).asDiagonal();
}

Eigen::VectorXd beig_eigenvalues(const BlockModel& model, double tau) {
  Eigen::VectorXd root = reduced_weights(model, tau).cwiseSqrt();
  Eigen::MatrixXd Btau = model.B().array() + tau / static_cast<double>(model.n());
  Eigen::MatrixXd sym = root.asDiagonal() * Btau * root.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

double eigen_gap(const BlockModel& model, double tau) {
  Eigen::VectorXd mu = beig_eigenvalues(model, tau);
  if (mu.cwiseAbs().minCoeff() < 1e-12)
    throw DegenerateModelError("B_tau is numerically rank deficient; no eigen gap");
  double gap = mu(model.K() - 1);
  if (!(gap > 1e-12))
    throw DegenerateModelError("K-th population eigenvalue is not positive (" +
                               std::to_string(gap) + ")");
  return gap;
}

Eigen::MatrixXd population_center_distances(const BlockModel& model) {
  const int K = model.K();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      if (a != b)
        dist(a, b) = std::sqrt(1.0 / static_cast<double>(model.block_sizes()[a]) +
                               1.0 / static_cast<double>(model.block_sizes()[b]));
  return dist;
}

void StrongWeakParams::validate() const {
  if (K < 1 || n_s == 0) throw Error("strong/weak model needs K >= 1 strong blocks of size >= 1");
  for (double p : {p_s, q, b_sw})
    if (!(p >= 0.0 && p <= 1.0)) throw Error("strong/weak probabilities must lie in [0, 1]");
  if (!(q < p_s)) throw Error("strong/weak model requires q < p_s");
  if (n_w > 0) {
    if (B_w.rows() == 0 || B_w.rows() != B_w.cols())
      throw Error("weak block matrix must be square and non-empty");
    if (static_cast<std::size_t>(B_w.rows()) > n_w)
      throw Error("more weak blocks than weak nodes");
    check_block_matrix(B_w);
  }
}

double StrongWeakParams::strong_degree() const {
  double ns = static_cast<double>(n_s);
  return ns * p_s + static_cast<double>(K - 1) * ns * q + static_cast<double>(n_w) * b_sw;
}

double StrongWeakParams::weak_degree() const {
  return static_cast<double>(n_w) + static_cast<double>(n() - n_w) * b_sw;
}

double StrongWeakParams::strong_gap() const { return static_cast<double>(n_s) * (p_s - q); }

BlockModel strong_weak_model(const StrongWeakParams& params) {
  params.validate();
  const int Kw = params.n_w > 0 ? static_cast<int>(params.B_w.rows()) : 0;
  const int total = params.K + Kw;
  Eigen::MatrixXd B(total, total);
  B.setConstant(params.b_sw);
  B.topLeftCorner(params.K, params.K).setConstant(params.q);
  B.topLeftCorner(params.K, params.K).diagonal().setConstant(params.p_s);
  if (Kw > 0) B.bottomRightCorner(Kw, Kw) = params.B_w;

  std::vector<std::size_t> sizes(static_cast<std::size_t>(params.K), params.n_s);
  for (int w = 0; w < Kw; ++w)
    sizes.push_back(params.n_w / static_cast<std::size_t>(Kw) +
                    (static_cast<std::size_t>(w) < params.n_w % static_cast<std::size_t>(Kw) ? 1 : 0));
  return BlockModel::from_sizes(sizes, std::move(B));
}

BlockModel merged_strong_weak_model(const StrongWeakParams& params) {
  params.validate();
  const int total = params.K + (params.n_w > 0 ? 1 : 0);
  Eigen::MatrixXd B(total, total);
  B.setConstant(params.b_sw);
  B.topLeftCorner(params.K, params.K).setConstant(params.q);
  B.topLeftCorner(params.K, params.K).diagonal().setConstant(params.p_s);
  std::vector<std::size_t> sizes(static_cast<std::size_t>(params.K), params.n_s);
  if (params.n_w > 0) {
    B(params.K, params.K) = 1.0;
    sizes.push_back(params.n_w);
  }
  return BlockModel::from_sizes(sizes, std::move(B));
}

StrongWeakSpectrum strong_weak_spectrum(const StrongWeakParams& params, double tau) {
  params.validate();
  const double n = static_cast<double>(params.n());
  const double nw = static_cast<double>(params.n_w);
  const double ds = params.strong_degree();
  const double dw = params.weak_degree();
  StrongWeakSpectrum out;
  out.mu_repeated = params.strong_gap() / (ds + tau);
  if (params.n_w > 0)
    out.mu_last = nw * (1.0 + tau / n) / (dw + tau) - nw * (params.b_sw + tau / n) / (ds + tau);
  return out;
}

const BlockModel& base_model(const AnyModel& model) {
  if (const auto* dc = std::get_if<DegreeCorrectedModel>(&model)) return dc->base();
  return std::get<BlockModel>(model);
}

AnyModel parse_model_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = strip(line.substr(0, eq));
    if (!kv.emplace(key, std::make_pair(strip(line.substr(eq + 1)), line_no)).second)
      throw ParseError(line_no, "duplicate key '" + key + "'");
  }

  auto numbers = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error("model config: missing key '" + key + "'");
    return parse_numbers(it->second.first, it->second.second);
  };
  auto scalar = [&](const std::string& key) {
    auto v = numbers(key);
    if (v.size() != 1) throw ParseError(kv.at(key).second, "'" + key + "' takes one value");
    return v.front();
  };

  const auto K = static_cast<std::size_t>(scalar("K"));
  if (K == 0) throw Error("model config: K must be positive");
  std::vector<std::size_t> sizes;
  if (kv.count("sizes")) {
    for (double s : numbers("sizes")) sizes.push_back(static_cast<std::size_t>(s));
  } else {
    auto w = numbers("weights");
    const auto n = static_cast<std::size_t>(scalar("n"));
    if (w.size() != K) throw Error("model config: expected " + std::to_string(K) + " weights");
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < K; ++k) {
      double exact = w[k] / total * static_cast<double>(n);
      sizes.push_back(static_cast<std::size_t>(std::floor(exact)));
      assigned += sizes.back();
      remainders.emplace_back(-(exact - std::floor(exact)), k);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++sizes[remainders[r % K].second];
  }
  if (sizes.size() != K) throw Error("model config: expected " + std::to_string(K) + " sizes");
  std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (kv.count("n") && static_cast<std::size_t>(scalar("n")) != n)
    throw Error("model config: block sizes do not sum to n");

  auto entries = numbers("B");
  if (entries.size() != K * K) throw Error("model config: B needs K*K entries");
  Eigen::MatrixXd B(K, K);
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < K; ++b) B(a, b) = entries[a * K + b];
  BlockModel base = BlockModel::from_sizes(sizes, std::move(B));

  if (auto it = kv.find("theta_file"); it != kv.end()) {
    std::filesystem::path p = it->second.first;
    if (p.is_relative()) p = base_dir / p;
    std::ifstream tin(p);
    if (!tin) throw Error("cannot open theta file " + p.string());
    std::vector<double> theta;
    std::string tline;
    std::size_t tno = 0;
    while (std::getline(tin, tline)) {
      ++tno;
      auto v = parse_numbers(tline.substr(0, tline.find('#')), tno);
      theta.insert(theta.end(), v.begin(), v.end());
    }
    return DegreeCorrectedModel(std::move(base), std::move(theta));
  }
  return base;
}

AnyModel load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model config " + path.string());
  return parse_model_config(in, path.parent_path());
}

}  // namespace specluster
