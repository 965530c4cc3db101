#include "uqcpt/lrv.hpp"

#include <cmath>
#include <numeric>

#include "pair_select.hpp"
#include "uqcpt/error.hpp"
#include "uqcpt/simd/kernels.hpp"
#include "uqcpt/uquantile.hpp"

namespace uqcpt {

DensityKernel DensityKernel::epanechnikov() {
  return {Kind::Epanechnikov,
          [](double u) { return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }, 1.0,
          "epanechnikov"};
}

HacWindow HacWindow::quartic() {
  return {[](double t) {
            const double s = 1.0 - t * t;
            return std::fabs(t) <= 1.0 ? s * s : 0.0;
          },
          1.0, "quartic"};
}

HacWindow HacWindow::bartlett() {
  return {[](double t) { return std::fabs(t) <= 1.0 ? 1.0 - std::fabs(t) : 0.0; }, 1.0, "bartlett"};
}

LrvConfig LrvConfig::known(double value) {
  LrvConfig config;
  config.mode = LrvMode::Known;
  config.known_value = value;
  return config;
}

LrvConfig LrvConfig::marginal() {
  LrvConfig config;
  config.mode = LrvMode::Marginal;
  return config;
}

LrvConfig LrvConfig::full() { return {}; }

double hac_bandwidth(std::size_t n, const LrvConfig& config) {
  const double b = config.fixed_hac_bandwidth.value_or(
      config.hac_scale * std::pow(static_cast<double>(n), config.hac_exponent));
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("HAC bandwidth must be positive");
  return b;
}

double density_bandwidth(double iqr, double stddev, std::size_t n, const LrvConfig& config) {
  if (config.fixed_density_bandwidth) {
    if (!(*config.fixed_density_bandwidth > 0.0)) {
      throw InvalidArgument("density bandwidth must be positive");
    }
    return *config.fixed_density_bandwidth;
  }
  const double spread = iqr > 0.0 ? iqr : stddev;
  if (!(spread > 0.0)) throw DegenerateSample("sample has zero spread; density bandwidth undefined");
  return spread * std::pow(static_cast<double>(n), config.density_exponent);
}

namespace {

void require_bandwidth(double d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("bandwidth must be positive");
}

double known_value(const LrvConfig& config) {
  if (!(config.known_value > 0.0) || !std::isfinite(config.known_value)) {
    throw InvalidArgument("known long-run variance must be positive and finite");
  }
  return config.known_value;
}

double checked_variance(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DegenerateSample("long-run variance estimate is not positive");
  }
  return value;
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pair_stddev(std::span<const double> x, const PairKernel& kernel) {
  std::vector<double> pairs;
  pairs.reserve(pair_count(x.size()));
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) pairs.push_back(kernel(x[i], x[j]));
  }
  return stddev(pairs);
}

// Location t, bandwidth and density value of the U-statistic density at a
// pair-value quantile.
struct PairDensity {
  double location;
  double density;
};

PairDensity pair_density_at_quantile(const Sample& sample, const UQuantileSpec& spec,
                                     const LrvConfig& config) {
  detail::PairSelector selector(sample.values(), spec.kernel);
  const double location = selector.kth(quantile_rank(spec.p, selector.pairs()));
  double d = 0.0;
  if (config.fixed_density_bandwidth) {
    d = density_bandwidth(0.0, 0.0, sample.size(), config);
  } else {
    const double iqr = selector.quantile_interpolated(0.75) - selector.quantile_interpolated(0.25);
    const double sd = iqr > 0.0 ? 0.0 : pair_stddev(sample.values(), spec.kernel);
    d = density_bandwidth(iqr, sd, sample.size(), config);
  }
  const double density = u_density_estimate(sample, spec.kernel, location, config.density_kernel, d);
  if (!(density > kDensityFloor)) {
    throw SingularDensity("U-statistic density estimate at the U-quantile is below the floor");
  }
  return {location, density};
}

}  // namespace

double u_density_estimate(const Sample& sample, const PairKernel& kernel, double t,
                          const DensityKernel& density, double d) {
  require_pairs(sample);
  require_bandwidth(d);
  const auto x = sample.values();
  const bool vectorized =
      density.kind == DensityKernel::Kind::Epanechnikov && kernel.op() != PairOp::Custom;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (vectorized) {
      sum += simd::epanechnikov_pair_sum(kernel.op(), x[i], x.subspan(i + 1), t, d);
    } else {
      for (std::size_t j = i + 1; j < x.size(); ++j) sum += density.evaluate((kernel(x[i], x[j]) - t) / d);
    }
  }
  return sum / (static_cast<double>(pair_count(x.size())) * d);
}

double kde(const Sample& sample, double x, const DensityKernel& density, double d) {
  require_bandwidth(d);
  const auto xs = sample.values();
  double sum = 0.0;
  if (density.kind == DensityKernel::Kind::Epanechnikov) {
    sum = simd::epanechnikov_sum(xs, x, d);
  } else {
    for (double v : xs) sum += density.evaluate((v - x) / d);
  }
  return sum / (static_cast<double>(xs.size()) * d);
}

double autocov_h1(const Sample& sample, const PairKernel& kernel, double t, std::size_t r) {
  if (r >= sample.size()) throw InvalidArgument("autocovariance lag must be below n");
  const auto h1 = h1_hat_values(sample, kernel, t);
  return simd::lagged_dot(h1, r) / static_cast<double>(sample.size());
}

double hac_sum(std::span<const double> z, const HacWindow& window, double b, LrvMode mode) {
  const std::size_t n = z.size();
  const auto inv_n = 1.0 / static_cast<double>(n);
  double sum = simd::lagged_dot(z, 0) * inv_n;
  if (mode == LrvMode::Marginal) return sum;
  for (std::size_t r = 1; r < n; ++r) {
    const double u = static_cast<double>(r) / b;
    if (u > window.radius) break;
    const double w = window.evaluate(u);
    if (w == 0.0) continue;
    sum += 2.0 * w * simd::lagged_dot(z, r) * inv_n;
  }
  return sum;
}

double psi_hat(const Sample& sample, double x, double h) {
  const auto xs = sample.values();
  const std::size_t count = simd::count_pairs_le(PairOp::Average, x, xs, h);
  return static_cast<double>(count) / static_cast<double>(xs.size()) - 0.5;
}

double lrv_uquantile(const Sample& sample, const UQuantileSpec& spec, const LrvConfig& config) {
  require_pairs(sample);
  if (config.mode == LrvMode::Known) return known_value(config);
  const auto [location, density] = pair_density_at_quantile(sample, spec, config);
  const auto h1 = h1_hat_values(sample, spec.kernel, location);
  const double hac = hac_sum(h1, config.window, hac_bandwidth(sample.size(), config), config.mode);
  return checked_variance(4.0 * hac / (density * density));
}

double lrv_cusum(const Sample& sample, const LrvConfig& config) {
  require_pairs(sample);
  if (config.mode == LrvMode::Known) return known_value(config);
  const auto x = sample.values();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  std::vector<double> z(x.size());
  bool constant = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = x[i] - mean;
    constant = constant && x[i] == x[0];
  }
  if (constant) throw DegenerateSample("constant sample has zero variance");
  return checked_variance(hac_sum(z, config.window, hac_bandwidth(x.size(), config), config.mode));
}

double lrv_median(const Sample& sample, const LrvConfig& config) {
  require_pairs(sample);
  if (config.mode == LrvMode::Known) return known_value(config);
  const auto x = sample.values();
  const double median = sample_median(x);
  const double iqr = sample_quantile(x, 0.75) - sample_quantile(x, 0.25);
  const double d = density_bandwidth(iqr, iqr > 0.0 ? 0.0 : stddev(x), x.size(), config);
  const double f = kde(sample, median, config.density_kernel, d);
  if (!(f > kDensityFloor)) throw SingularDensity("density estimate at the median is below the floor");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] <= median ? 1.0 : 0.0) - 0.5;
  const double hac = hac_sum(z, config.window, hac_bandwidth(x.size(), config), config.mode);
  return checked_variance(hac / (f * f));
}

double lrv_hl(const Sample& sample, const LrvConfig& config) {
  require_pairs(sample);
  if (config.mode == LrvMode::Known) return known_value(config);
  const auto [hl, density] = pair_density_at_quantile(sample, UQuantileSpec::hodges_lehmann(), config);
  const auto x = sample.values();
  std::vector<double> psi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) psi[i] = psi_hat(sample, x[i], hl);
  const double hac = hac_sum(psi, config.window, hac_bandwidth(x.size(), config), config.mode);
  return checked_variance(4.0 * hac / (density * density));
}

}  // namespace uqcpt
