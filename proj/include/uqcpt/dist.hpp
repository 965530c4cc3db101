#pragma once

namespace uqcpt::dist {

[[nodiscard]] double normal_cdf(double x);
/// Inverse of the standard normal cdf, 0 < q < 1.
[[nodiscard]] double normal_quantile(double q);

/// Student t density 1 / (sqrt(nu) B(nu/2, 1/2)) (1 + x^2/nu)^{-(nu+1)/2}.
[[nodiscard]] double t_density(double nu, double x);
[[nodiscard]] double t_cdf(double nu, double x);
/// Inverse t cdf; closed forms for nu = 1 and nu = 2, numeric inversion otherwise.
[[nodiscard]] double t_quantile(double nu, double q);

/// gamma_nu = z_{3/4} / t_{nu;3/4}: rescales t_nu so that median |Y| matches the normal.
[[nodiscard]] double t_scale_factor(double nu);

/// 2 * int f_nu(x)^2 dx by numerical quadrature: the density of (X + Y)/2 at 0.
[[nodiscard]] double t_pair_average_density_at_zero(double nu);

}  // namespace uqcpt::dist
