#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bsz/block_path.hpp"
#include "bsz/rates.hpp"
#include "bsz/rng.hpp"
#include "bsz/verify.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bsz;

TEST_CASE("rescale maps are exact affine inverses") {
  for (long n : {3L, 100L, 10000L}) {
    for (double v : {-2.5, 0.0, 1.25, 731.0}) {
      CHECK(unrescale_mrca(n, rescale_mrca(n, v)) == doctest::Approx(v).epsilon(1e-12));
      CHECK(unrescale_length(n, rescale_length(n, v)) ==
            doctest::Approx(v).epsilon(1e-12));
      for (double t : {0.0, 0.5, 3.0})
        CHECK(unrescale_blocks_value(n, t, rescale_blocks_value(n, t, v)) ==
              doctest::Approx(v).epsilon(1e-12));
    }
  }

  // centering points map to zero
  long n = 1000;
  double ln = std::log(double(n));
  double lln = std::log(ln);
  CHECK(rescale_blocks_value(n, 0.0, double(n)) == 0.0);
  CHECK(rescale_mrca(n, lln) == 0.0);
  CHECK(rescale_length(n, double(n) / ln + double(n) * lln / (ln * ln)) ==
        doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(rescale_mrca(2, 1.0), std::domain_error);
  CHECK_THROWS_AS(unrescale_mrca(2, 1.0), std::domain_error);
  CHECK_THROWS_AS(rescale_length(2, 1.0), std::domain_error);
  CHECK_THROWS_AS(rescale_blocks_value(2, 0.0, 1.0), std::domain_error);
}

TEST_CASE("rescaled block path follows the ancestor trace") {
  long n = 100;
  double ln = std::log(double(n));
  BlockPath tr;
  tr.n = n;
  tr.events.push_back({0.0, 100, std::nullopt});
  tr.events.push_back({0.05, 70, 31});
  tr.events.push_back({0.2, 40, 31});
  tr.events.push_back({0.9, 10, 31});  // beyond the window, must be cut
  double t_max = 2.0;
  PiecewisePath p = rescale_block_path(n, tr, t_max);

  std::vector<double> jts = p.jump_times();
  REQUIRE(jts.size() == 2);
  CHECK(jts[0] == 0.05 * ln);
  CHECK(jts[1] == 0.2 * ln);

  CHECK(p.samples.front().time == 0.0);
  CHECK(p.samples.front().value == 0.0);
  CHECK(p.samples.back().time == t_max);

  for (size_t i = 0; i < p.samples.size(); ++i) {
    const auto& s = p.samples[i];
    bool pre_half = i + 1 < p.samples.size() &&
                    p.samples[i + 1].time == s.time && p.samples[i + 1].is_jump;
    long c = pre_half ? (s.time == jts[0] ? 100 : 70)
                      : tr.count_at(s.time / ln);
    CHECK(s.value ==
          doctest::Approx(rescale_blocks_value(n, s.time, double(c))).epsilon(1e-13));
  }

  CHECK_THROWS_AS(rescale_block_path(n, tr, 0.0), std::invalid_argument);
}

TEST_CASE("ks statistic against a known cdf") {
  auto unif = [](double x) { return std::min(std::max(x, 0.0), 1.0); };

  CHECK(ks_statistic({0.5}, unif) == 0.5);
  CHECK(ks_statistic({0.25, 0.75}, unif) == 0.25);

  // samples at the quantiles i/(m+1) stay within the plotting-position gap
  long m = 10;
  std::vector<double> qs;
  for (long i = 1; i <= m; ++i) qs.push_back(double(i) / double(m + 1));
  CHECK(ks_statistic(qs, unif) <= 1.0 / double(m + 1) + 1.0 / double(m));

  // inverse-cdf draws from the standing location family
  auto gcdf = [](double y) { return std::exp(-std::exp(-y)); };
  rng g(42);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = -std::log(-std::log(g.u01()));
  CHECK(ks_statistic(std::move(xs), gcdf) < ks_threshold(100000));

  CHECK_THROWS_AS(ks_statistic({}, unif), std::invalid_argument);
}

TEST_CASE("two sample ks statistic and thresholds") {
  CHECK(ks_statistic_two({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_statistic_two({0.0}, {1.0}) == 1.0);
  CHECK(ks_statistic_two({0.0, 2.0}, {1.0, 3.0}) == 0.5);
  CHECK(ks_threshold(400) == 1.95 / 20.0);
  CHECK(ks_threshold_two(100, 100) == doctest::Approx(1.95 * std::sqrt(0.02)));
  CHECK_THROWS_AS(ks_statistic_two({}, {1.0}), std::invalid_argument);
}

TEST_CASE("empirical characteristic function basics") {
  std::vector<double> c(64, 1.5);
  CfEstimate e = empirical_cf(c, 2.0);
  CHECK(e.value.real() == doctest::Approx(std::cos(3.0)).epsilon(1e-15));
  CHECK(e.value.imag() == doctest::Approx(std::sin(3.0)).epsilon(1e-15));
  CHECK(e.se_re == doctest::Approx(0.0));
  CHECK(e.se_im == doctest::Approx(0.0));

  rng g(5);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = g.exp1();
  CfEstimate z = empirical_cf(xs, 0.0);
  CHECK(z.value.real() == 1.0);
  CHECK(z.value.imag() == 0.0);
  CHECK(z.se_re == 0.0);
  CHECK(z.se_im == 0.0);

  // exponential law: CF = 1/(1 - iu), check within 3 SE at u = 1
  CfEstimate f = empirical_cf(xs, 1.0);
  CHECK(std::fabs(f.value.real() - 0.5) < 3.0 * f.se_re + 1e-12);
  CHECK(std::fabs(f.value.imag() - 0.5) < 3.0 * f.se_im + 1e-12);

  CHECK_THROWS_AS(empirical_cf({}, 1.0), std::invalid_argument);
}

TEST_CASE("variance rate bound check") {
  // single-pair case: the second moment is the truncated pair rate itself
  for (double c : {1e-2, 1e-3})
    CHECK(truncated_block_loss_second_moment(2, c) <= c);

  // vanishing cutoff kills the truncated moment
  CHECK(truncated_block_loss_second_moment(50, 1e-10) <
        truncated_block_loss_second_moment(50, 1e-4));
  CHECK(truncated_block_loss_second_moment(50, 1e-10) < 2500 * 1e-10);

  TestReport r = variance_rate_bound_check(10000);
  CHECK(r.pass);
  CHECK(r.statistic <= 1.0);
  CHECK(r.statistic > 0.0);
  CHECK(r.replicates == 3);

  CHECK_THROWS_AS(variance_rate_bound_check(99), std::invalid_argument);
}

TEST_CASE("coupling experiment keeps the shared-field structure") {
  for (long n : {300L, 1000L}) {
    double tn = 2.0 * std::log(std::log(double(n)));
    rng g(2024);
    CouplingResult r = run_coupling_experiment(n, tn, g);
    CHECK(r.structure_ok);
    CHECK(r.explicit_points >= 1);
    CHECK(r.degenerate_points >= 0);
    CHECK(r.degenerate_points <= r.explicit_points);
    CHECK((long)r.y_path.jump_times().size() == r.explicit_points);
    CHECK(r.x_path.samples.front().time == 0.0);
    CHECK(r.x_path.samples.front().value == 0.0);
    CHECK(std::isfinite(r.sup_distance));
    CHECK(r.sup_distance >= 0.0);

    rng g2(2024);
    CouplingResult r2 = run_coupling_experiment(n, tn, g2);
    CHECK(r2.sup_distance == r.sup_distance);
    CHECK(r2.explicit_points == r.explicit_points);
  }

  rng g(1);
  CHECK_THROWS_AS(run_coupling_experiment(99, 1.0, g), std::invalid_argument);
  CHECK_THROWS_AS(run_coupling_experiment(300, 0.0, g), std::invalid_argument);
}

TEST_CASE("verify config profiles and file overrides") {
  VerifyConfig a = VerifyConfig::acceptance();
  VerifyConfig f = VerifyConfig::fast();
  CHECK(a.rate_b_max == 500);
  CHECK(f.rate_b_max == 200);
  CHECK(a.coupling_grid.size() == 3);
  CHECK(f.coupling_grid.size() == 2);

  const char* path = "test_verify_config.json";
  {
    std::ofstream out(path);
    out << "{\"acceptance\": {\"rate_b_max\": 50, \"blocks_cases\": [[7, 0.25]]},"
        << " \"fast\": {\"depth_reps\": 7}}";
  }
  VerifyConfig ca = VerifyConfig::from_json_file(path, "acceptance");
  CHECK(ca.rate_b_max == 50);
  CHECK(ca.depth_reps == a.depth_reps);
  REQUIRE(ca.blocks_cases.size() == 1);
  CHECK(ca.blocks_cases[0].first == 7);
  CHECK(ca.blocks_cases[0].second == 0.25);
  VerifyConfig cf = VerifyConfig::from_json_file(path, "fast");
  CHECK(cf.depth_reps == 7);
  CHECK(cf.rate_b_max == 200);
  CHECK_THROWS_AS(VerifyConfig::from_json_file(path, "huge"), std::runtime_error);
  CHECK_THROWS_AS(VerifyConfig::from_json_file("no_such_file.json", "fast"),
                  std::runtime_error);
  std::remove(path);
}

TEST_CASE("report serialization") {
  std::vector<TestReport> reps = {
      {"alpha", 0.5, 1.0, true, 3, 42},
      {"beta", 2.0, 1.0, false, 100, 7},
  };
  CHECK(reports_to_csv(reps) ==
        "name,statistic,threshold,pass,replicates,seed\n"
        "alpha,0.5,1,1,3,42\n"
        "beta,2,1,0,100,7\n");

  nlohmann::json j = nlohmann::json::parse(reports_to_json(reps));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["name"] == "alpha");
  CHECK(j[0]["statistic"] == 0.5);
  CHECK(j[0]["pass"] == true);
  CHECK(j[1]["name"] == "beta");
  CHECK(j[1]["replicates"] == 100);
  CHECK(j[1]["seed"] == 7);
}

TEST_CASE("suite dispatch and deterministic exact tests") {
  const auto& names = suite_names();
  REQUIRE(names.size() == 14);
  CHECK(names.front() == "rate_identities");
  CHECK(names.back() == "mrca_trend");

  VerifyConfig cfg = VerifyConfig::fast();
  cfg.rate_b_max = 60;
  cfg.loss_b_max = 400;

  TestReport r1 = run_one("rate_identities", cfg, 9);
  CHECK(r1.pass);
  CHECK(r1.statistic < 1e-12);
  TestReport r2 = run_one("block_loss_bound", cfg, 9);
  CHECK(r2.pass);
  TestReport r3 = run_one("detailed_balance", cfg, 9);
  CHECK(r3.pass);
  CHECK(r3.statistic < 1e-12);
  TestReport r4 = run_one("generator_consistency", cfg, 9);
  CHECK(r4.pass);

  CHECK_THROWS_AS(run_one("no_such_test", cfg, 9), std::invalid_argument);
}

TEST_CASE("full suite smoke run is reproducible") {
  VerifyConfig c;
  c.rate_b_max = 40;
  c.loss_b_max = 300;
  c.depth_reps = 300;
  c.depth_ns = {10};
  c.blocks_reps = 200;
  c.blocks_cases = {{30, 0.5}};
  c.equiv_n3_reps = 400;
  c.equiv_n5_reps = 300;
  c.equiv_a100_reps = 100;
  c.gumbel_samples = 2000;
  c.gumbel_mc = 2000;
  c.balance_grid = 12;
  c.a_jumps = 500;
  c.stable_eps = 1e-3;
  c.stable_samples = 2000;
  c.ou_cf_samples = 400;
  c.ou_cf_eps = 1e-2;
  c.ou_paths = 2;
  c.ou_h = 1e-3;
  c.coupling_reps = 3;
  c.coupling_grid = {300, 600};
  c.mrca_reps = 400;
  c.mrca_grid = {50, 100};

  std::vector<TestReport> out = run_suite(suite_names(), c, 123);
  REQUIRE(out.size() == suite_names().size());
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].name == suite_names()[i]);
    CHECK(out[i].replicates > 0);
    CHECK(out[i].statistic >= 0.0);
    CHECK(out[i].seed == 123);
  }

  // exact tests must hold even at smoke scale
  for (const auto& r : out)
    if (r.name == "rate_identities" || r.name == "detailed_balance")
      CHECK(r.pass);

  std::vector<TestReport> again = run_suite(suite_names(), c, 123);
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(again[i].statistic == out[i].statistic);
    CHECK(again[i].pass == out[i].pass);
  }
}
