#include <doctest.h>

#include <cmath>
#include <sstream>

#include "specluster/errors.hpp"
#include "specluster/harness.hpp"
#include "specluster/metrics.hpp"

using namespace specluster;

namespace {

ExperimentConfig config(std::size_t n, int K, std::vector<double> w, double beta, double lambda) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.K = K;
  cfg.inside_weights = std::move(w);
  cfg.out_in_ratio = beta;
  cfg.mean_degree = lambda;
  return cfg;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("experiment block matrix") {
  BlockModel flat = build_experiment_model(config(400, 2, {1, 1}, 1, 8));
  CHECK(flat.B().isApproxToConstant(8.0 / 400, 1e-15));

  ExperimentConfig cfg = config(999, 3, {1, 2, 0.5}, 4, 12);
  BlockModel a = build_experiment_model(cfg);
  cfg.mean_degree = 24;
  BlockModel b = build_experiment_model(cfg);
  CHECK(b.B() == 2.0 * a.B());
  CHECK(a.B()(1, 1) == doctest::Approx(8 * a.B()(0, 1)));
  CHECK(a.B()(0, 2) == a.B()(1, 0));
  CHECK(a.node_degrees().mean() == doctest::Approx(12.0));

  // The sparse-block matrix is this family with beta = 1, w = (4, 1.2), lambda = 13.5.
  BlockModel sparse = build_experiment_model(config(3000, 2, {4, 1.2}, 1, 13.5));
  CHECK(sparse.B()(0, 0) == doctest::Approx(0.01));
  CHECK(sparse.B()(0, 1) == doctest::Approx(0.0025));
  CHECK(sparse.B()(1, 1) == doctest::Approx(0.003));

  CHECK_THROWS_WITH(build_experiment_model(config(100, 2, {1, 1}, 50, 90)),
                    doctest::Contains("largest block probability"));
}

TEST_CASE("sampled mean degree in the lambda = 30 panel") {
  BlockModel m = build_experiment_model(config(1500, 3, {1, 1, 1}, 5, 30));
  // No self-loops: subtract the diagonal of P, and use the exact edge variance.
  double mean_edges = 0.0, var_edges = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      double na = 500, pairs = a == b ? na * (na - 1) / 2 : na * na, p = m.B()(a, b);
      mean_edges += pairs * p;
      var_edges += pairs * p * (1 - p);
    }
  const double expect = 2 * mean_edges / 1500, sigma = 2 * std::sqrt(var_edges) / 1500;
  CHECK(std::abs(expect - 30) < 0.1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    double d = sample(m, seed).mean_degree();
    CHECK(std::abs(d - expect) <= 3 * sigma);
  }
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# panel\nn = 300\nK = 3\nw = 1, 2, 1\nbeta = 4\nlambda = 10\n"
      "tau_grid = 1:300:5\nreplicates = 2\nseed = 17\nmodel = dsbm\nnorm = frobenius\n");
  ExperimentConfig cfg = parse_experiment_config(in);
  CHECK(cfg.n == 300);
  CHECK(cfg.inside_weights == std::vector<double>{1, 2, 1});
  CHECK(cfg.out_in_ratio == 4);
  CHECK(cfg.mean_degree == 10);
  CHECK(cfg.replicates == 2);
  CHECK(cfg.seed == 17);
  CHECK(cfg.model == ModelKind::dsbm);
  CHECK(cfg.norm == NormKind::frobenius);

  std::istringstream defaults("n = 100\nK = 2\nmean_degree = 5\n");
  CHECK(parse_experiment_config(defaults).inside_weights == std::vector<double>{1, 1});

  auto fails = [](const std::string& text) {
    std::istringstream s(text);
    CHECK_THROWS_AS(parse_experiment_config(s), Error);
  };
  fails("n = 100\nK = 2\nlambda = 5\nbogus = 1\n");
  fails("n = 100\nK = 2\nlambda = 5\nlambda = 6\n");
  fails("n = 100\nK = 2\nlambda = 5\nmean_degree = 6\n");
  fails("n = 100\nK = 2\nlambda = -1\n");
  fails("n = 100\nK = 2\nlambda = 5\nbeta = -1\n");
  fails("n = 100\nK = 2\nlambda = 5\nw = 1 0\n");
  fails("n = 100\nK = 2\nlambda = 5\nw = 1 1 1\n");
  fails("n = 100\nK = 2\nlambda = 5\nreplicates = 0\n");
  fails("n = ten\nK = 2\nlambda = 5\n");
  fails("n = 100\nK = 2\nlambda\n");
  fails("n = 100\nK = 2\nlambda = 5\nmodel = blah\n");

  std::istringstream bad_line("n = 100\nK 2\n");
  try {
    parse_experiment_config(bad_line);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("experiment output") {
  ExperimentConfig cfg = config(200, 2, {1, 1}, 6, 12);
  cfg.tau_grid = "1:200:3";
  cfg.seed = 5;
  ExperimentResult res = run_experiment(cfg, 1);
  REQUIRE(res.replicates.size() == 1);
  CHECK(res.replicates[0].error.empty());
  std::ostringstream a;
  write_experiment_csv(a, res);
  auto lines = lines_of(a.str());
  REQUIRE(lines.size() == 3 + 1 + 3 + 3);
  CHECK(lines[0] == "# specluster " + std::string(kVersion));
  CHECK(lines[1].rfind("# config_hash ", 0) == 0);
  CHECK(lines[2] == "# seed 5");
  CHECK(lines[3] == "replicate,tau,dkest,gn_modularity,nmi,misclassified_fraction,seconds");
  for (int k = 4; k < 7; ++k) CHECK(lines[k].rfind("0,", 0) == 0);
  CHECK(lines[7].rfind("# summary dkest mean_nmi ", 0) == 0);
  CHECK(lines[8].rfind("# summary gn mean_nmi ", 0) == 0);
  CHECK(lines[9].rfind("# summary oracle mean_nmi ", 0) == 0);
  CHECK(res.mean_chosen_nmi(Criterion::oracle) >= res.mean_chosen_nmi(Criterion::dkest));
  CHECK(res.mean_chosen_nmi(Criterion::oracle) >= res.mean_chosen_nmi(Criterion::gn));

  cfg.replicates = 3;
  std::ostringstream b, c, d;
  write_experiment_csv(b, run_experiment(cfg, 1));
  write_experiment_csv(c, run_experiment(cfg, 3));
  write_experiment_csv(d, run_experiment(cfg, 1));
  CHECK(b.str() == c.str());
  CHECK(b.str() == d.str());

  // The hash follows the configuration.
  ExperimentConfig other = cfg;
  other.mean_degree = 13;
  CHECK(fnv1a(other.canonical()) != fnv1a(cfg.canonical()));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("failed replicates are recorded and skipped") {
  // A reversed grid makes every replicate fail.
  ExperimentConfig cfg = config(60, 2, {1, 1}, 4, 5);
  cfg.tau_grid = "5:1:3";
  cfg.replicates = 2;
  ExperimentResult res = run_experiment(cfg, 1);
  CHECK(!res.replicates[0].error.empty());
  CHECK(std::isnan(res.mean_chosen_nmi(Criterion::dkest)));
  std::ostringstream out;
  write_experiment_csv(out, res);
  CHECK(out.str().find("# replicate 1 failed: ") != std::string::npos);
}

TEST_CASE("sparse-block design: DKest beats tau = 0") {
  BlockModel m = build_experiment_model(config(3000, 2, {4, 1.2}, 1, 13.5));
  Partition truth = m.partition();
  double at_zero = 0.0, at_dkest = 0.0;
  int used = 0;
  for (std::uint64_t seed = 0; used < 5; ++seed) {
    Graph g = sample(m, seed);
    if (g.isolated_count() > 0) continue;
    ++used;
    ScanOptions opts;
    opts.criteria = {Criterion::dkest, Criterion::oracle};
    opts.threads = 1;
    TauScan s = scan(g, 2, default_grid(g), seed, opts, &truth);
    REQUIRE(s.grid.front() == 0.0);
    at_zero += s.records.front().nmi;
    at_dkest += s.records[*s.chosen_index(Criterion::dkest)].nmi;
  }
  MESSAGE("mean NMI tau=0: " << at_zero / used << ", DKest: " << at_dkest / used);
  CHECK(at_zero < at_dkest);
}
