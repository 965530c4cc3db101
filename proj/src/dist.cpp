#include "uqcpt/dist.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "uqcpt/error.hpp"

namespace uqcpt::dist {
namespace {

void require_nu(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("t degrees of freedom must be positive");
}

void require_probability(double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("probability must lie in (0, 1)");
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double q) {
  require_probability(q);
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double t_density(double nu, double x) {
  require_nu(nu);
  const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                          0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double t_cdf(double nu, double x) {
  require_nu(nu);
  if (nu == 1.0) return 0.5 + std::atan(x) / std::numbers::pi;
  if (nu == 2.0) return 0.5 + x / (2.0 * std::sqrt(2.0 + x * x));
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

double t_quantile(double nu, double q) {
  require_nu(nu);
  require_probability(q);
  if (nu == 1.0) {
    if (q == 0.5) return 0.0;
    return q < 0.5 ? -1.0 / std::tan(std::numbers::pi * q) : 1.0 / std::tan(std::numbers::pi * (1.0 - q));
  }
  if (nu == 2.0) return (2.0 * q - 1.0) / std::sqrt(2.0 * q * (1.0 - q));
  return boost::math::quantile(boost::math::students_t_distribution<double>(nu), q);
}

double t_scale_factor(double nu) { return normal_quantile(0.75) / t_quantile(nu, 0.75); }

double t_pair_average_density_at_zero(double nu) {
  require_nu(nu);
  boost::math::quadrature::exp_sinh<double> integrator;
  const double half = integrator.integrate([nu](double x) {
    const double f = t_density(nu, x);
    return f * f;
  });
  // symmetric integrand: 2 * int_R f^2 = 4 * int_0^inf f^2
  return 4.0 * half;
}

}  // namespace uqcpt::dist
