#include "specluster/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "specluster/errors.hpp"
#include "specluster/parallel.hpp"
#include "specluster/random.hpp"

namespace specluster {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  T value{};
  if (!(in >> value) || !(in >> std::ws).eof())
    throw ParseError(line, "cannot parse '" + text + "'");
  return value;
}

std::string format(double v) {
  std::ostringstream s;
  if (std::isnan(v))
    return "";
  else if (std::isinf(v))
    s << (v > 0 ? "inf" : "-inf");
  else
    s << std::setprecision(10) << v;
  return s.str();
}

const Criterion kAllCriteria[] = {Criterion::dkest, Criterion::gn, Criterion::oracle};

}  // namespace

void ExperimentConfig::validate() const {
  if (K < 1) throw Error("experiment needs K >= 1");
  if (n < static_cast<std::size_t>(K)) throw Error("experiment needs n >= K");
  if (inside_weights.size() != static_cast<std::size_t>(K))
    throw Error("experiment needs one inside weight per block");
  for (double w : inside_weights)
    if (!(w > 0.0)) throw Error("inside weights must be positive");
  if (!(out_in_ratio >= 0.0)) throw Error("out-in ratio must be non-negative");
  if (!(mean_degree > 0.0)) throw Error("target mean degree must be positive");
  if (replicates < 1) throw Error("experiment needs at least one replicate");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << std::setprecision(17) << "n=" << n << ";K=" << K << ";w=";
  for (double w : inside_weights) s << w << ',';
  s << ";beta=" << out_in_ratio << ";lambda=" << mean_degree << ";grid=" << tau_grid
    << ";replicates=" << replicates << ";seed=" << seed << ";model=" << to_string(model)
    << ";norm=" << to_string(norm);
  return s.str();
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    std::string canonical_key = key == "w" ? "inside_weights" : key == "beta" ? "out_in_ratio"
                                : key == "lambda"                  ? "mean_degree"
                                                                   : key;
    if (!seen.insert(canonical_key).second)
      throw ParseError(line_no, "duplicate key '" + key + "'");
    if (key == "n") {
      cfg.n = parse_value<std::size_t>(value, line_no);
    } else if (key == "K") {
      cfg.K = parse_value<int>(value, line_no);
    } else if (key == "inside_weights" || key == "w") {
      std::replace(value.begin(), value.end(), ',', ' ');
      std::istringstream ws(value);
      cfg.inside_weights.clear();
      std::string tok;
      while (ws >> tok) cfg.inside_weights.push_back(parse_value<double>(tok, line_no));
    } else if (key == "out_in_ratio" || key == "beta") {
      cfg.out_in_ratio = parse_value<double>(value, line_no);
    } else if (key == "mean_degree" || key == "lambda") {
      cfg.mean_degree = parse_value<double>(value, line_no);
    } else if (key == "tau_grid") {
      cfg.tau_grid = value;
    } else if (key == "replicates") {
      cfg.replicates = parse_value<std::size_t>(value, line_no);
    } else if (key == "seed") {
      cfg.seed = parse_value<std::uint64_t>(value, line_no);
    } else if (key == "model") {
      cfg.model = parse_model_kind(value);
    } else if (key == "norm") {
      cfg.norm = parse_norm_kind(value);
    } else if (key == "output") {
      cfg.output = value;
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  if (cfg.inside_weights.empty() && cfg.K > 0) cfg.inside_weights.assign(static_cast<std::size_t>(cfg.K), 1.0);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open experiment config " + path.string());
  return parse_experiment_config(in);
}

BlockModel build_experiment_model(const ExperimentConfig& cfg) {
  cfg.validate();
  const int K = cfg.K;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(K), cfg.n / static_cast<std::size_t>(K));
  for (std::size_t k = 0; k < cfg.n % static_cast<std::size_t>(K); ++k) ++sizes[k];
  Eigen::MatrixXd M = Eigen::MatrixXd::Ones(K, K);
  for (int k = 0; k < K; ++k) M(k, k) = cfg.out_in_ratio * cfg.inside_weights[k];
  double mass = 0.0;
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      mass += static_cast<double>(sizes[a]) * static_cast<double>(sizes[b]) * M(a, b);
  if (!(mass > 0.0)) throw Error("experiment block matrix is identically zero");
  const double fac = cfg.mean_degree * static_cast<double>(cfg.n) / mass;
  Eigen::MatrixXd B = fac * M;
  if (B.maxCoeff() > 1.0)
    throw Error("infeasible experiment: largest block probability is " + format(B.maxCoeff()));
  return BlockModel::from_sizes(sizes, std::move(B));
}

double ExperimentResult::mean_chosen_nmi(Criterion c) const {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& r : replicates) {
    if (!r.error.empty()) continue;
    if (auto k = r.scan.chosen_index(c)) {
      total += r.scan.records[*k].nmi;
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
  BlockModel model = build_experiment_model(cfg);
  const Partition truth = model.partition();
  ExperimentResult result;
  result.config = cfg;
  result.replicates.resize(cfg.replicates);
  parallel_for(
      cfg.replicates,
      [&](std::size_t r) {
        ReplicateResult& rep = result.replicates[r];
        rep.replicate = r;
        const std::uint64_t rep_seed = derive_seed(cfg.seed, r);
        try {
          Graph g = sample(model, derive_seed(rep_seed, 0));
          auto grid = cfg.tau_grid.empty() ? default_grid(g) : parse_grid(cfg.tau_grid);
          ScanOptions opts;
          opts.criteria = {Criterion::dkest, Criterion::gn, Criterion::oracle};
          opts.model = cfg.model;
          opts.norm = cfg.norm;
          opts.threads = 1;
          rep.scan = scan(g, cfg.K, grid, derive_seed(rep_seed, 1), opts, &truth);
        } catch (const Error& e) {
          rep.error = e.what();
        }
      },
      threads);
  return result;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_provenance(std::ostream& out, std::uint64_t config_hash, std::uint64_t seed) {
  out << "# specluster " << kVersion << '\n'
      << "# config_hash " << std::hex << std::setw(16) << std::setfill('0') << config_hash
      << std::dec << std::setfill(' ') << '\n'
      << "# seed " << seed << '\n';
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result, bool timing) {
  write_provenance(out, fnv1a(result.config.canonical()), result.config.seed);
  out << "replicate,tau,dkest,gn_modularity,nmi,misclassified_fraction,seconds\n";
  for (const auto& rep : result.replicates) {
    if (!rep.error.empty()) {
      out << "# replicate " << rep.replicate << " failed: " << rep.error << '\n';
      continue;
    }
    for (const auto& r : rep.scan.records)
      out << rep.replicate << ',' << format(r.tau) << ',' << format(r.dkest) << ','
          << format(r.gn_modularity) << ',' << format(r.nmi) << ','
          << format(r.misclassified_fraction) << ',' << format(timing ? r.seconds : 0.0) << '\n';
  }
  for (Criterion c : kAllCriteria)
    out << "# summary " << to_string(c) << " mean_nmi " << format(result.mean_chosen_nmi(c)) << '\n';
}

}  // namespace specluster
