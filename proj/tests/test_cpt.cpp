#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "uqcpt/cpt.hpp"
#include "uqcpt/dgp.hpp"
#include "uqcpt/error.hpp"

using namespace uqcpt;
using Catch::Approx;

TEST_CASE("sup_bb_cdf") {
  CHECK(sup_bb_cdf(0.0) == 0.0);
  CHECK(sup_bb_cdf(0.05) == 0.0);
  CHECK(sup_bb_cdf(1.358) == Approx(0.95).margin(5e-4));
  CHECK(sup_bb_cdf(4.0) > 1.0 - 1e-10);
  CHECK_THROWS_AS(sup_bb_cdf(-0.1), InvalidArgument);
  double prev = 0.0;
  for (double x = 0.0; x < 3.0; x += 0.01) {
    const double f = sup_bb_cdf(x);
    REQUIRE(f >= prev);
    prev = f;
    if (x > 0.2) REQUIRE(f == Approx(oracle::sup_bb_cdf(x)).margin(1e-11));
  }
}

TEST_CASE("sup_bb_cdf against simulated bridge maxima") {
  // 20k paths on a 2000-step grid; discretization biases the max low by ~0.01
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  const int paths = 20000;
  const int steps = 2000;
  const double x = 1.3581;
  int below = 0;
  std::vector<double> w(steps + 1);
  for (int p = 0; p < paths; ++p) {
    w[0] = 0.0;
    for (int i = 1; i <= steps; ++i) w[i] = w[i - 1] + z(rng) / std::sqrt(double(steps));
    double m = 0.0;
    for (int i = 0; i <= steps; ++i) m = std::max(m, std::fabs(w[i] - double(i) / steps * w[steps]));
    below += m <= x ? 1 : 0;
  }
  CHECK(double(below) / paths == Approx(sup_bb_cdf(x)).margin(0.01));
}

TEST_CASE("critical values") {
  CHECK(critical_value(0.05) == Approx(1.3581).margin(1e-3));
  CHECK(sup_bb_cdf(critical_value(0.5)) == Approx(0.5).margin(1e-6));
  CHECK(critical_value(0.01) > critical_value(0.05));
  CHECK(critical_value(0.05) > critical_value(0.10));
  CHECK_THROWS_AS(critical_value(0.0), InvalidArgument);
  CHECK_THROWS_AS(critical_value(1.0), InvalidArgument);
}

TEST_CASE("test_statistic picks the first maximum") {
  const Trajectory t{1, {0.0, 3.0, -5.0, 0.0}};
  const auto r = test_statistic(t, 1);
  CHECK(r.statistic == 5.0);
  CHECK(r.argmax_k == 3);
  const Trajectory flat{4, {0.0, 0.0, 0.0}};
  CHECK(test_statistic(flat, 4).argmax_k == 4);
  CHECK(test_statistic(flat, 4).statistic == 0.0);
  const Trajectory tie{1, {2.0, -2.0, 1.0}};
  CHECK(test_statistic(tie, 1).argmax_k == 1);
  CHECK(test_statistic(tie, 2).argmax_k == 2);
  CHECK_THROWS_AS(test_statistic(tie, 4), InvalidArgument);
}

TEST_CASE("trajectories match composition oracles") {
  std::mt19937_64 rng(41);
  const auto med = [](const oracle::Vec& v) { return oracle::median(v); };
  const auto hl = [](const oracle::Vec& v) { return oracle::u_quantile(v, oracle::avg, 0.5); };
  const auto mean = [](const oracle::Vec& v) { return oracle::mean(v); };
  int compared = 0;
  for (int rep = 0; rep < 80; ++rep) {
    const auto x = oracle::random_series(rng, 12 + rep % 19);
    const Sample s(x);
    try {
      const auto t = trajectory(s, TestKind::hodges_lehmann(), LrvConfig::full(), 11);
      const auto o = oracle::trajectory(x, hl, oracle::lrv_hl(x, false), 11);
      REQUIRE(t.first_k == 11);
      REQUIRE(t.values.size() == o.size());
      for (std::size_t i = 0; i < o.size(); ++i) REQUIRE(t.values[i] == Approx(o[i]).margin(1e-10));
      REQUIRE(t.values.back() == 0.0);
      ++compared;
    } catch (const SingularDensity&) {
    }
    const auto c = trajectory(s, TestKind::cusum(), LrvConfig::marginal(), 1);
    const auto oc = oracle::trajectory(x, mean, oracle::lrv_cusum(x, true), 1);
    for (std::size_t i = 0; i < oc.size(); ++i) REQUIRE(c.values[i] == Approx(oc[i]).margin(1e-10));
    const auto m = trajectory(s, TestKind::median(), LrvConfig::known(2.0), 1);
    const auto om = oracle::trajectory(x, med, 2.0, 1);
    for (std::size_t i = 0; i < om.size(); ++i) REQUIRE(m.values[i] == Approx(om[i]).margin(1e-10));
  }
  CHECK(compared > 60);
}

TEST_CASE("constant sample with known variance") {
  const Sample s(std::vector<double>(50, 3.0));
  for (const auto& kind : {TestKind::cusum(), TestKind::median(), TestKind::hodges_lehmann()}) {
    const auto r = run_test(s, kind, LrvConfig::known(1.0));
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK_FALSE(r.reject);
    for (double v : r.trajectory.values) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(run_test(s, TestKind::hodges_lehmann(), LrvConfig::full()), DegenerateSample);
}

TEST_CASE("run_test fields are consistent") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Sample s = generate({MarginalDist::normal(), DependenceSpec::iid(),
                               ChangeSpec::location_jump(seed % 2 == 0 ? 0.0 : 0.6, 0.5), 120, seed});
    for (const auto& kind : {TestKind::cusum(), TestKind::median(), TestKind::hodges_lehmann(),
                             TestKind::general(UQuantileSpec::qn())}) {
      const auto r = run_test(s, kind, LrvConfig::full());
      const auto mx = test_statistic(r.trajectory, kind.default_k_min());
      REQUIRE(r.statistic == mx.statistic);
      REQUIRE(r.changepoint_k == mx.argmax_k);
      REQUIRE(r.p_value == Approx(1.0 - sup_bb_cdf(r.statistic)).margin(1e-15));
      REQUIRE(r.reject_at_5pct == (r.statistic > critical_value(0.05)));
      if (std::fabs(r.p_value - 0.05) > 1e-6) REQUIRE(r.reject_at_5pct == (r.p_value < 0.05));
      REQUIRE(r.trajectory.last_k() == 120);
      REQUIRE(r.lrv_used > 0.0);
    }
  }
}

TEST_CASE("studentized statistic is location and scale invariant") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Sample s = generate({MarginalDist::scaled_t(3), DependenceSpec::ar1(0.4), ChangeSpec::none(), 150, seed});
    std::vector<double> moved(s.values().begin(), s.values().end());
    for (auto& v : moved) v = 2.0 * v + 1.0;
    for (const auto& kind : {TestKind::cusum(), TestKind::hodges_lehmann()}) {
      CHECK(run_test(Sample(moved), kind, LrvConfig::full()).statistic ==
            Approx(run_test(s, kind, LrvConfig::full()).statistic).epsilon(1e-9));
    }
    std::vector<double> shifted(s.values().begin(), s.values().end());
    for (auto& v : shifted) v += 5.0;
    CHECK(run_test(Sample(shifted), TestKind::median(), LrvConfig::full()).statistic ==
          Approx(run_test(s, TestKind::median(), LrvConfig::full()).statistic).epsilon(1e-9));
  }
}

TEST_CASE("HL change-point estimate locates a large jump") {
  int near = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const Sample s = generate({MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::location_jump(1.0, 0.5), 240,
                               derive_seed(555, r)});
    const auto res = run_test(s, TestKind::hodges_lehmann(), LrvConfig::full());
    near += std::labs(long(res.changepoint_k) - 120) <= 10 ? 1 : 0;
  }
  CHECK(near >= reps * 9 / 10);
}

TEST_CASE("run_test rejection rates under null and alternative") {
  int null_rej = 0;
  int alt_rej = 0;
  for (int r = 0; r < 1000; ++r) {
    const auto seed = derive_seed(2024, r);
    const Sample h0 = generate({MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::none(), 240, seed});
    const Sample h1 = generate({MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::location_jump(1.0, 0.5), 240, seed});
    null_rej += run_test(h0, TestKind::hodges_lehmann(), LrvConfig::full()).reject ? 1 : 0;
    alt_rej += run_test(h1, TestKind::hodges_lehmann(), LrvConfig::full()).reject ? 1 : 0;
  }
  CHECK(null_rej / 10.0 == Approx(3.0).margin(2.0));
  CHECK(alt_rej / 10.0 == Approx(100.0).margin(2.0));
}

TEST_CASE("argument checks") {
  const Sample s({1, 2, 3, 4, 5});
  CHECK_THROWS_AS(trajectory(s, TestKind::hodges_lehmann(), LrvConfig::known(1), 1), InvalidArgument);
  CHECK_THROWS_AS(trajectory(s, TestKind::cusum(), LrvConfig::known(1), 6), InvalidArgument);
  CHECK_THROWS_AS(run_test(s, TestKind::cusum(), LrvConfig::known(1), std::nullopt, 1.5), InvalidArgument);
  CHECK(TestKind::hodges_lehmann().name() == "hl");
  CHECK(TestKind::general(UQuantileSpec::qn()).name() == "uq:absdiff:0.25");
  CHECK(TestKind::cusum().default_k_min() == 1);
  CHECK(TestKind::median().default_k_min() == 11);
}
