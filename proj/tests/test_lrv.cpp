#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "uqcpt/dgp.hpp"
#include "uqcpt/error.hpp"
#include "uqcpt/lrv.hpp"
#include "uqcpt/uquantile.hpp"

using namespace uqcpt;
using Catch::Approx;

namespace {

const auto kEpan = DensityKernel::epanechnikov();

// The library either agrees with the oracle or refuses an estimate the oracle
// shows to be singular (zero density) or non-positive.
template <class F, class O>
bool check_pair(F f, O o, double tol) {
  const double ref = o();
  try {
    const double lib = f();
    REQUIRE(lib == Approx(ref).margin(tol));
    return true;
  } catch (const Error&) {
    REQUIRE_FALSE((std::isfinite(ref) && ref > 0.0 && ref < 1e12));
    return false;
  }
}

}  // namespace

TEST_CASE("kernels and windows") {
  CHECK(kEpan.evaluate(0.0) == 0.75);
  CHECK(kEpan.evaluate(1.5) == 0.0);
  CHECK(kEpan.evaluate(0.3) == kEpan.evaluate(-0.3));
  CHECK(oracle::simpson(kEpan.evaluate, -1.0, 1.0, 2000) == Approx(1.0).margin(1e-6));
  for (const auto& w : {HacWindow::quartic(), HacWindow::bartlett()}) {
    CHECK(w.evaluate(0.0) == 1.0);
    CHECK(w.evaluate(1.2) == 0.0);
    CHECK(w.evaluate(-0.4) == w.evaluate(0.4));
  }
  CHECK(HacWindow::quartic().evaluate(0.5) == 0.5625);
  CHECK(HacWindow::bartlett().evaluate(0.25) == 0.75);
}

TEST_CASE("bandwidth rules") {
  const auto cfg = LrvConfig::full();
  CHECK(hac_bandwidth(1000, cfg) == Approx(20.0));
  CHECK(density_bandwidth(2.0, 5.0, 8, cfg) == Approx(1.0));
  CHECK(density_bandwidth(0.0, 4.0, 8, cfg) == Approx(2.0));
  CHECK_THROWS_AS(density_bandwidth(0.0, 0.0, 8, cfg), DegenerateSample);
  auto fixed = cfg;
  fixed.fixed_hac_bandwidth = 3.5;
  CHECK(hac_bandwidth(1000, fixed) == 3.5);
  fixed.fixed_hac_bandwidth = -1.0;
  CHECK_THROWS_AS(hac_bandwidth(10, fixed), InvalidArgument);
  for (std::size_t n = 2; n < 50; ++n) CHECK(hac_bandwidth(n, cfg) > 0.0);
}

TEST_CASE("density estimates: examples") {
  CHECK(u_density_estimate(Sample({0, 1}), PairKernel::average(), 0.5, kEpan, 1.0) == 0.75);
  CHECK(u_density_estimate(Sample({0, 1}), PairKernel::average(), 2.0, kEpan, 1.0) == 0.0);
  CHECK(kde(Sample({0}), 0.0, kEpan, 1.0) == 0.75);
  CHECK(kde(Sample({0}), 5.0, kEpan, 1.0) == 0.0);
  CHECK_THROWS_AS(kde(Sample({0}), 0.0, kEpan, 0.0), InvalidArgument);
  CHECK_THROWS_AS(u_density_estimate(Sample({0, 1}), PairKernel::average(), 0.0, kEpan, -1.0), InvalidArgument);
}

TEST_CASE("density estimates match direct sums") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 60; ++rep) {
    const auto x = oracle::random_series(rng, 2 + rep % 49);
    const Sample s(x);
    const double t = z(rng);
    const double d = 0.2 + std::fabs(z(rng));
    REQUIRE(u_density_estimate(s, PairKernel::average(), t, kEpan, d) ==
            Approx(oracle::u_density(x, oracle::avg, t, d)).margin(1e-12));
    REQUIRE(u_density_estimate(s, PairKernel::abs_diff(), std::fabs(t), kEpan, d) ==
            Approx(oracle::u_density(x, oracle::absdiff, std::fabs(t), d)).margin(1e-12));
    REQUIRE(kde(s, t, kEpan, d) == Approx(oracle::kde(x, t, d)).margin(1e-12));
  }
}

TEST_CASE("u density integrates to one") {
  const Sample s = generate({MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::none(), 60, 4});
  const auto pv = oracle::pairs(std::vector<double>(s.values().begin(), s.values().end()), oracle::avg);
  const auto [lo, hi] = std::minmax_element(pv.begin(), pv.end());
  const double d = 0.3;
  const auto f = [&](double t) { return u_density_estimate(s, PairKernel::average(), t, kEpan, d); };
  CHECK(oracle::simpson(f, *lo - d, *hi + d, 4000) == Approx(1.0).margin(1e-3));
}

TEST_CASE("autocovariance of h1") {
  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 30; ++rep) {
    const auto x = oracle::random_series(rng, 3 + rep);
    const Sample s(x);
    const double t = oracle::u_quantile(x, oracle::avg, 0.5);
    for (std::size_t r : {0, 1, 2}) {
      REQUIRE(autocov_h1(s, PairKernel::average(), t, r) ==
              Approx(oracle::rho(x, oracle::avg, t, r)).margin(1e-12));
    }
    const std::size_t last = x.size() - 1;
    const auto h = h1_hat_values(s, PairKernel::average(), t);
    REQUIRE(autocov_h1(s, PairKernel::average(), t, last) ==
            Approx(h.front() * h.back() / static_cast<double>(x.size())).margin(1e-14));
    REQUIRE(autocov_h1(s, PairKernel::average(), 1e9, 1) == 0.0);
  }
  CHECK_THROWS_AS(autocov_h1(Sample({1, 2, 3}), PairKernel::average(), 0.0, 3), InvalidArgument);
}

TEST_CASE("hac_sum") {
  const std::vector<double> z{1, -1, 1, -1};
  CHECK(hac_sum(z, HacWindow::quartic(), 2.0, LrvMode::Marginal) == 1.0);
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> v(5 + rep);
    for (auto& e : v) e = g(rng);
    const double b = 0.5 + rep * 0.3;
    REQUIRE(hac_sum(v, HacWindow::quartic(), b, LrvMode::Full) == Approx(oracle::hac(v, b, false)).margin(1e-12));
    REQUIRE(hac_sum(v, HacWindow::bartlett(), b, LrvMode::Full) ==
            Approx(oracle::hac(v, b, false, oracle::bartlett)).margin(1e-12));
    // a bandwidth below 1 zeroes every lag but 0
    REQUIRE(hac_sum(v, HacWindow::quartic(), 0.9, LrvMode::Full) == hac_sum(v, HacWindow::quartic(), 0.9, LrvMode::Marginal));
  }
}

TEST_CASE("psi_hat") {
  const Sample s({-1.0, 0.0, 2.0});
  CHECK(psi_hat(s, 100.0, 0.5) == -0.5);
  CHECK(psi_hat(s, -100.0, 0.5) == 0.5);
  CHECK(psi_hat(s, 0.0, 0.0) == Approx(1.0 / 3.0 * 2.0 - 0.5));
}

TEST_CASE("variance estimators match the direct formulas") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  int compared = 0;
  int total = 0;
  for (int rep = 0; rep < 120; ++rep) {
    const auto x = oracle::random_series(rng, 5 + rep % 26);
    const Sample s(x);
    for (bool marginal : {false, true}) {
      const auto cfg = marginal ? LrvConfig::marginal() : LrvConfig::full();
      total += 4;
      compared += check_pair([&] { return lrv_cusum(s, cfg); }, [&] { return oracle::lrv_cusum(x, marginal); }, 1e-10);
      compared += check_pair([&] { return lrv_median(s, cfg); }, [&] { return oracle::lrv_median(x, marginal); }, 1e-10);
      compared += check_pair([&] { return lrv_hl(s, cfg); }, [&] { return oracle::lrv_hl(x, marginal); }, 1e-10);
      const double p = u(rng);
      compared += check_pair([&] { return lrv_uquantile(s, {PairKernel::abs_diff(), p}, cfg); },
                 [&] { return oracle::lrv_uquantile(x, oracle::absdiff, p, marginal); }, 1e-10);
    }
  }
  CHECK(compared > total * 9 / 10);
}

TEST_CASE("variance estimator examples and errors") {
  CHECK(lrv_cusum(Sample({1, -1, 1, -1}), LrvConfig::marginal()) == 1.0);
  CHECK_THROWS_AS(lrv_cusum(Sample({2, 2, 2, 2}), LrvConfig::full()), DegenerateSample);
  CHECK_THROWS_AS(lrv_hl(Sample({2, 2, 2, 2}), LrvConfig::full()), DegenerateSample);
  CHECK_THROWS_AS(lrv_median(Sample({2, 2, 2, 2}), LrvConfig::full()), DegenerateSample);
  CHECK(lrv_hl(Sample({2, 2, 2}), LrvConfig::known(1.5)) == 1.5);
  CHECK_THROWS_AS(lrv_hl(Sample({1, 2, 3}), LrvConfig::known(-1.0)), InvalidArgument);
  CHECK_THROWS_AS(lrv_hl(Sample({1}), LrvConfig::full()), InsufficientData);
  // a tiny fixed bandwidth leaves the density at the median at zero
  auto cfg = LrvConfig::full();
  cfg.fixed_density_bandwidth = 1e-6;
  CHECK_THROWS_AS(lrv_median(Sample({0, 1, 2, 3}), cfg), SingularDensity);
}

TEST_CASE("invariances") {
  std::mt19937_64 rng(35);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = oracle::random_series(rng, 60);
    auto shifted = x;
    for (auto& v : shifted) v += 0.25;
    const double a = lrv_hl(Sample(x), LrvConfig::full());
    CHECK(lrv_hl(Sample(shifted), LrvConfig::full()) == Approx(a).epsilon(1e-9));
    auto scaled = x;
    for (auto& v : scaled) v *= 3.0;
    CHECK(lrv_cusum(Sample(scaled), LrvConfig::marginal()) ==
          Approx(9.0 * lrv_cusum(Sample(x), LrvConfig::marginal())).epsilon(1e-12));
  }
}

TEST_CASE("consistency at large n") {
  const auto cfg = LrvConfig::full();
  const Sample normal = generate({MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::none(), 5000, 77});
  CHECK(lrv_hl(normal, cfg) == Approx(M_PI / 3.0).epsilon(0.15));
  CHECK(lrv_cusum(normal, cfg) == Approx(1.0).epsilon(0.15));
  CHECK(lrv_median(normal, cfg) == Approx(M_PI / 2.0).epsilon(0.15));
  const Sample t3 = generate({MarginalDist::scaled_t(3), DependenceSpec::iid(), ChangeSpec::none(), 5000, 78});
  CHECK(lrv_hl(t3, cfg) == Approx(*true_lrv(MarginalDist::scaled_t(3), DependenceSpec::iid(),
                                            TestKind::Variant::HodgesLehmann).value).epsilon(0.15));
  const Sample t1 = generate({MarginalDist::scaled_t(1), DependenceSpec::iid(), ChangeSpec::none(), 5000, 79});
  const double g1 = 0.6744897501960817;  // z_{3/4}, and t_{1;3/4} = 1
  CHECK(lrv_median(t1, cfg) == Approx(g1 * g1 * M_PI * M_PI / 4.0).epsilon(0.15));
}

TEST_CASE("marginal and full agree on iid data") {
  // the HAC sum is biased low at moderate n; compare averages, not per-sample ratios
  double marginal = 0.0, full = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Sample s = generate({MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::none(), 4000, seed});
    marginal += lrv_hl(s, LrvConfig::marginal());
    full += lrv_hl(s, LrvConfig::full());
  }
  CHECK(marginal / full == Approx(1.0).epsilon(0.03));
  CHECK(full / 200.0 == Approx(M_PI / 3.0).epsilon(0.03));
}

TEST_CASE("HL variance error shrinks with n") {
  std::vector<double> med_err;
  for (std::size_t n : {500, 2000, 8000}) {
    std::vector<double> err;
    for (std::uint64_t r = 0; r < 100; ++r) {
      const Sample s = generate({MarginalDist::normal(), DependenceSpec::iid(), ChangeSpec::none(), n, derive_seed(99, r)});
      err.push_back(std::fabs(lrv_hl(s, LrvConfig::full()) - M_PI / 3.0));
    }
    med_err.push_back(oracle::median(err));
  }
  CHECK(med_err[0] > med_err[1]);
  CHECK(med_err[1] > med_err[2]);
}
