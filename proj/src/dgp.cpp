#include "uqcpt/dgp.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "uqcpt/dist.hpp"
#include "uqcpt/error.hpp"

namespace uqcpt {
namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// "name(value)" -> value
double parse_parenthesized(const std::string& label, const std::string& name) {
  if (label.size() < name.size() + 3 || label.compare(0, name.size() + 1, name + "(") != 0 ||
      label.back() != ')') {
    throw InvalidArgument("malformed label '" + label + "'");
  }
  const std::string inner = label.substr(name.size() + 1, label.size() - name.size() - 2);
  std::size_t used = 0;
  const double v = std::stod(inner, &used);
  if (used != inner.size()) throw InvalidArgument("malformed number in '" + label + "'");
  return v;
}

double parse_number(const std::string& text, const std::string& label) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("malformed label '" + label + "'");
  }
  if (used != text.size()) throw InvalidArgument("malformed label '" + label + "'");
  return v;
}

}  // namespace

MarginalDist MarginalDist::scaled_t(double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("t degrees of freedom must be positive");
  return {Kind::StudentT, nu, 1.0, true};
}

MarginalDist MarginalDist::student_t(double nu) {
  if (!(nu > 0.0)) throw InvalidArgument("t degrees of freedom must be positive");
  return {Kind::StudentT, nu, 1.0, false};
}

MarginalDist MarginalDist::exponential(double rate) {
  if (!(rate > 0.0)) throw InvalidArgument("exponential rate must be positive");
  return {Kind::Exponential, 0.0, rate, false};
}

double MarginalDist::scale() const {
  return kind == Kind::StudentT && scaled ? dist::t_scale_factor(nu) : 1.0;
}

double MarginalDist::from_standard_normal(double z) const {
  switch (kind) {
    case Kind::Normal:
      return z;
    case Kind::StudentT: {
      // work in the lower tail for accuracy, then reflect
      const double lower = 0.5 * std::erfc(std::fabs(z) / std::numbers::sqrt2);
      const double t = dist::t_quantile(nu, lower);
      const double gamma = scaled ? dist::t_scale_factor(nu) : 1.0;
      return gamma * (z > 0.0 ? -t : t);
    }
    case Kind::Exponential:
      break;
  }
  // F^{-1}(u) = -log(1 - u) / rate with 1 - u = Phi(-z)
  if (z >= 0.0) return -std::log(0.5 * std::erfc(z / std::numbers::sqrt2)) / rate;
  return -std::log1p(-0.5 * std::erfc(-z / std::numbers::sqrt2)) / rate;
}

std::string MarginalDist::label() const {
  switch (kind) {
    case Kind::Normal:
      return "normal";
    case Kind::StudentT:
      return (scaled ? "t" : "tu") + format_number(nu);
    case Kind::Exponential:
      break;
  }
  return "exp(" + format_number(rate) + ")";
}

MarginalDist MarginalDist::parse(const std::string& label) {
  if (label == "normal") return normal();
  if (label == "exp") return exponential(1.0);
  if (label.rfind("exp(", 0) == 0) return exponential(parse_parenthesized(label, "exp"));
  if (label.rfind("tu", 0) == 0) return student_t(parse_number(label.substr(2), label));
  if (label.rfind('t', 0) == 0 && label.size() > 1) return scaled_t(parse_number(label.substr(1), label));
  throw InvalidArgument("unknown marginal distribution '" + label + "'");
}

DependenceSpec DependenceSpec::ar1(double phi) {
  if (!(phi > -1.0 && phi < 1.0)) throw InvalidArgument("AR(1) coefficient must lie in (-1, 1)");
  return {Kind::Ar1, phi};
}

std::string DependenceSpec::label() const {
  return kind == Kind::Iid ? "iid" : "ar1(" + format_number(phi) + ")";
}

DependenceSpec DependenceSpec::parse(const std::string& label) {
  if (label == "iid") return iid();
  if (label.rfind("ar1(", 0) == 0) return ar1(parse_parenthesized(label, "ar1"));
  throw InvalidArgument("unknown dependence '" + label + "'");
}

ChangeSpec ChangeSpec::location_jump(double mu, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("change location must lie in (0, 1)");
  if (!std::isfinite(mu)) throw InvalidArgument("jump height must be finite");
  return {Kind::LocationJump, mu, 1.0, theta};
}

ChangeSpec ChangeSpec::scale_change(double lambda2, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("change location must lie in (0, 1)");
  if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) throw InvalidArgument("lambda2 must be positive");
  return {Kind::ScaleChange, 0.0, lambda2, theta};
}

std::size_t ChangeSpec::change_index(std::size_t n) const {
  return static_cast<std::size_t>(std::floor(theta * static_cast<double>(n) + 1e-9));
}

bool ChangeSpec::is_null() const noexcept {
  switch (kind) {
    case Kind::None:
      return true;
    case Kind::LocationJump:
      return mu == 0.0;
    case Kind::ScaleChange:
      break;
  }
  return lambda2 == 1.0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Sample generate(const DgpSpec& spec) {
  if (spec.n < 2) throw InvalidArgument("simulated series need n >= 2");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double phi = spec.dependence.phi_or_zero();
  const double sd = std::sqrt(1.0 - phi * phi);

  std::vector<double> x(spec.n);
  // w_i = Z_i * sqrt(1 - phi^2) is the latent AR(1) standardized to unit variance
  double w = normal(rng);
  const double gamma = spec.marginal.scale();
  MarginalDist unit = spec.marginal;
  unit.scaled = false;
  const std::size_t change_at = spec.change.change_index(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (i > 0) w = phi * w + sd * normal(rng);
    double y = unit.from_standard_normal(w) * gamma;
    if (i >= change_at) {
      if (spec.change.kind == ChangeSpec::Kind::LocationJump) y += spec.change.mu;
      if (spec.change.kind == ChangeSpec::Kind::ScaleChange) y /= spec.change.lambda2;
    }
    x[i] = y;
  }
  return Sample(std::move(x));
}

double arcsin_series(double phi, double c) {
  double sum = 0.0;
  double power = phi;
  for (int k = 1; k < 10000; ++k) {
    const double term = std::asin(c * power);
    sum += term;
    if (std::fabs(term) < 1e-14) break;
    power *= phi;
  }
  return sum;
}

double exponential_hl_median() {
  const auto f = [](double h) { return std::exp(2.0 * h) - 2.0 * (1.0 + 2.0 * h); };
  double lo = 0.5;
  double hi = 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LrvReference true_lrv(const MarginalDist& marginal, const DependenceSpec& dependence,
                      TestKind::Variant kind) {
  using Variant = TestKind::Variant;
  constexpr double pi = std::numbers::pi;
  if (kind == Variant::GeneralUQuantile) {
    return {std::nullopt, "unavailable: no closed form for general U-quantiles"};
  }
  const bool ar1 = dependence.kind == DependenceSpec::Kind::Ar1;
  const double phi = dependence.phi_or_zero();

  switch (marginal.kind) {
    case MarginalDist::Kind::Normal:
      if (kind == Variant::Cusum) return {ar1 ? (1.0 + phi) / (1.0 - phi) : 1.0, {}};
      if (kind == Variant::HodgesLehmann) return {pi / 3.0 + (ar1 ? 4.0 * arcsin_series(phi, 0.5) : 0.0), {}};
      return {pi / 2.0 + (ar1 ? 2.0 * arcsin_series(phi, 1.0) : 0.0), {}};

    case MarginalDist::Kind::StudentT: {
      const double gamma = marginal.scale();
      const double nu = marginal.nu;
      if (kind == Variant::Cusum) {
        if (nu <= 2.0) return {std::nullopt, "unavailable: infinite variance"};
        if (ar1) return {std::nullopt, "unavailable: no closed form for Gaussian-copula t margins"};
        return {gamma * gamma * nu / (nu - 2.0), {}};
      }
      if (kind == Variant::HodgesLehmann) {
        const double u = dist::t_pair_average_density_at_zero(nu);
        const double ratio = gamma / u;
        return {ratio * ratio * (1.0 / 3.0 + (ar1 ? 4.0 / pi * arcsin_series(phi, 0.5) : 0.0)), {}};
      }
      const double ratio = gamma / dist::t_density(nu, 0.0);
      return {ratio * ratio * (0.25 + (ar1 ? arcsin_series(phi, 1.0) / pi : 0.0)), {}};
    }

    case MarginalDist::Kind::Exponential:
      break;
  }
  if (ar1) return {std::nullopt, "unavailable: no closed form for dependent exponential data"};
  const double scale2 = 1.0 / (marginal.rate * marginal.rate);
  if (kind == Variant::HodgesLehmann) {
    const double h = exponential_hl_median();
    const double a = 2.0 * h - 1.0;
    return {scale2 * (3.0 - a * a) / (4.0 * h * h), {}};
  }
  return {scale2, {}};
}

}  // namespace uqcpt
