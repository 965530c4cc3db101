#include "uqcpt/cpt.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "uqcpt/error.hpp"
#include "uqcpt/uquantile.hpp"

namespace uqcpt {

std::string TestKind::name() const {
  switch (variant_) {
    case Variant::Cusum:
      return "cusum";
    case Variant::Median:
      return "median";
    case Variant::HodgesLehmann:
      return "hl";
    case Variant::GeneralUQuantile:
      break;
  }
  char p[32];
  std::snprintf(p, sizeof p, "%g", spec_->p);
  return "uq:" + spec_->kernel.name() + ":" + p;
}

std::vector<double> estimator_path(const Sample& sample, const TestKind& kind, std::size_t k_min) {
  const std::size_t n = sample.size();
  if (k_min < kind.min_prefix() || k_min > n) {
    throw InvalidArgument("k_min must lie in [" + std::to_string(kind.min_prefix()) + ", n]");
  }
  const auto tail = [k_min](std::vector<double> all) {
    all.erase(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k_min - 1));
    return all;
  };
  switch (kind.variant()) {
    case TestKind::Variant::Cusum:
      return tail(prefix_means(sample));
    case TestKind::Variant::Median:
      return tail(prefix_medians(sample));
    case TestKind::Variant::HodgesLehmann:
      return prefix_u_quantiles(sample, UQuantileSpec::hodges_lehmann(), k_min);
    case TestKind::Variant::GeneralUQuantile:
      break;
  }
  return prefix_u_quantiles(sample, *kind.spec(), k_min);
}

double long_run_variance(const Sample& sample, const TestKind& kind, const LrvConfig& config) {
  switch (kind.variant()) {
    case TestKind::Variant::Cusum:
      return lrv_cusum(sample, config);
    case TestKind::Variant::Median:
      return lrv_median(sample, config);
    case TestKind::Variant::HodgesLehmann:
      return lrv_hl(sample, config);
    case TestKind::Variant::GeneralUQuantile:
      break;
  }
  return lrv_uquantile(sample, *kind.spec(), config);
}

Trajectory trajectory_with_lrv(const Sample& sample, const TestKind& kind, double lrv,
                               std::size_t k_min) {
  if (!(lrv > 0.0) || !std::isfinite(lrv)) throw InvalidArgument("long-run variance must be positive");
  auto path = estimator_path(sample, kind, k_min);
  const double full = path.back();
  const double scale = 1.0 / (std::sqrt(static_cast<double>(sample.size())) * std::sqrt(lrv));
  for (std::size_t j = 0; j < path.size(); ++j) {
    path[j] = static_cast<double>(k_min + j) * scale * (path[j] - full);
  }
  return {k_min, std::move(path)};
}

Trajectory trajectory(const Sample& sample, const TestKind& kind, const LrvConfig& config,
                      std::size_t k_min) {
  if (k_min < kind.min_prefix() || k_min > sample.size()) {
    throw InvalidArgument("k_min must lie in [" + std::to_string(kind.min_prefix()) + ", n]");
  }
  return trajectory_with_lrv(sample, kind, long_run_variance(sample, kind, config), k_min);
}

MaxResult test_statistic(const Trajectory& trajectory, std::size_t k_min) {
  if (trajectory.values.empty() || k_min > trajectory.last_k()) {
    throw InvalidArgument("every trajectory entry is excluded by k_min");
  }
  const std::size_t start = k_min > trajectory.first_k ? k_min - trajectory.first_k : 0;
  MaxResult best{std::fabs(trajectory.values[start]), trajectory.first_k + start};
  for (std::size_t j = start + 1; j < trajectory.values.size(); ++j) {
    const double a = std::fabs(trajectory.values[j]);
    if (a > best.statistic) best = {a, trajectory.first_k + j};
  }
  return best;
}

double sup_bb_cdf(double x) {
  if (!(x >= 0.0)) throw InvalidArgument("sup |B| distribution is defined for x >= 0");
  if (x < 0.1) return 0.0;
  constexpr double kTermTolerance = 1e-12;
  double sum = 0.0;
  if (x < 0.5) {
    // Theta-function form: sqrt(2 pi)/x sum_k exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    for (int k = 1; k < 100; ++k) {
      const double m = 2.0 * k - 1.0;
      const double term = std::exp(-m * m * c);
      sum += term;
      if (term < kTermTolerance) break;
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  // Kolmogorov series: 1 + 2 sum_k (-1)^k exp(-2 k^2 x^2)
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? -term : term);
    if (term < kTermTolerance) break;
  }
  return std::min(1.0, 1.0 + 2.0 * sum);
}

double critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const double target = 1.0 - alpha;
  double lo = 0.1;
  double hi = 10.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (sup_bb_cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ChangePointResult run_test(const Sample& sample, const TestKind& kind, const LrvConfig& config,
                           std::optional<std::size_t> k_min, double alpha) {
  const std::size_t first = k_min.value_or(kind.default_k_min());
  ChangePointResult result;
  result.critical_value = critical_value(alpha);
  result.lrv_used = long_run_variance(sample, kind, config);
  result.trajectory = trajectory_with_lrv(sample, kind, result.lrv_used, first);
  const MaxResult max = test_statistic(result.trajectory, first);
  result.statistic = max.statistic;
  result.changepoint_k = max.argmax_k;
  result.p_value = 1.0 - sup_bb_cdf(max.statistic);
  result.reject = max.statistic > result.critical_value;
  static const double kFivePercent = critical_value(0.05);
  result.reject_at_5pct = max.statistic > kFivePercent;
  return result;
}

}  // namespace uqcpt
