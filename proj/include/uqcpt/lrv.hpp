#pragma once

// Long-run variance estimators: kernel densities of the data and of the
// pairwise kernel values, HAC-weighted autocovariance sums, and the
// test-specific studentizers for the mean, median, Hodges-Lehmann and general
// U-quantile change-point processes.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqcpt/pair_kernel.hpp"
#include "uqcpt/sample.hpp"

namespace uqcpt {

/// Density estimates at or below this value are treated as singular.
inline constexpr double kDensityFloor = 1e-8;

/// A symmetric probability density with support [-radius, radius].
struct DensityKernel {
  enum class Kind { Epanechnikov, Custom };

  static DensityKernel epanechnikov();

  Kind kind = Kind::Epanechnikov;
  std::function<double(double)> evaluate;
  double radius = 1.0;
  std::string name;
};

/// HAC lag window with W(0) = 1. `radius` is the support bound (may be infinite).
struct HacWindow {
  static HacWindow quartic();   ///< (1 - t^2)^2 on |t| <= 1
  static HacWindow bartlett();  ///< (1 - |t|) on |t| <= 1

  std::function<double(double)> evaluate;
  double radius = 1.0;
  std::string name;
};

enum class LrvMode {
  Known,     ///< use a supplied value
  Marginal,  ///< lag-zero term only
  Full,      ///< HAC sum over all lags
};

struct LrvConfig {
  LrvMode mode = LrvMode::Full;
  double known_value = std::numeric_limits<double>::quiet_NaN();
  DensityKernel density_kernel = DensityKernel::epanechnikov();
  HacWindow window = HacWindow::quartic();
  /// d_n = spread * n^density_exponent, spread the IQR of the smoothed values.
  double density_exponent = -1.0 / 3.0;
  std::optional<double> fixed_density_bandwidth;
  /// b_n = hac_scale * n^hac_exponent.
  double hac_scale = 2.0;
  double hac_exponent = 1.0 / 3.0;
  std::optional<double> fixed_hac_bandwidth;

  static LrvConfig known(double value);
  static LrvConfig marginal();
  static LrvConfig full();
};

[[nodiscard]] double hac_bandwidth(std::size_t n, const LrvConfig& config);

/// IQR * n^exponent, falling back to the standard deviation when the IQR is 0.
/// Throws DegenerateSample when both vanish.
[[nodiscard]] double density_bandwidth(double iqr, double stddev, std::size_t n,
                                       const LrvConfig& config);

/// u_n(t) = 2 / (n (n-1) d) sum_{i<j} K((g(X_i, X_j) - t) / d)
[[nodiscard]] double u_density_estimate(const Sample& sample, const PairKernel& kernel, double t,
                                        const DensityKernel& density, double d);

/// f_n(x) = 1 / (n d) sum_k K((X_k - x) / d)
[[nodiscard]] double kde(const Sample& sample, double x, const DensityKernel& density, double d);

/// rho(r, t) = (1/n) sum_{i=1}^{n-r} h1(X_i, t) h1(X_{i+r}, t); divisor n for every lag.
[[nodiscard]] double autocov_h1(const Sample& sample, const PairKernel& kernel, double t,
                                std::size_t r);

/// sum_{r=-(n-1)}^{n-1} W(r/b) (1/n) sum_i z_i z_{i+|r|}; only r = 0 in Marginal mode.
[[nodiscard]] double hac_sum(std::span<const double> z, const HacWindow& window, double b,
                             LrvMode mode);

/// psi_n(x) = (1/n) sum_j (1{(x + X_j)/2 <= h} - 1/2)
[[nodiscard]] double psi_hat(const Sample& sample, double x, double h);

/// General p-U-quantile long-run variance 4 / u_n(q)^2 * HAC(h1_hat(., q)).
[[nodiscard]] double lrv_uquantile(const Sample& sample, const UQuantileSpec& spec,
                                   const LrvConfig& config);
/// Long-run variance of the mean, centred at the sample mean.
[[nodiscard]] double lrv_cusum(const Sample& sample, const LrvConfig& config);
/// Long-run variance of the median: centred indicators over f_n(median)^2.
[[nodiscard]] double lrv_median(const Sample& sample, const LrvConfig& config);
/// Long-run variance of the Hodges-Lehmann estimator via psi_n.
[[nodiscard]] double lrv_hl(const Sample& sample, const LrvConfig& config);

}  // namespace uqcpt
