#pragma once

// Simulation designs: symmetric margins with a location jump and exponential
// margins with a rate change, optionally with Gaussian-copula AR(1)
// dependence, plus the population long-run variances that go with them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "uqcpt/cpt.hpp"
#include "uqcpt/sample.hpp"

namespace uqcpt {

struct MarginalDist {
  enum class Kind { Normal, StudentT, Exponential };

  static MarginalDist normal() { return {Kind::Normal, 0.0, 1.0, false}; }
  /// t_nu multiplied by gamma_nu = z_{3/4} / t_{nu;3/4}.
  static MarginalDist scaled_t(double nu);
  /// Plain t_nu, gamma = 1.
  static MarginalDist student_t(double nu);
  static MarginalDist exponential(double rate);

  /// Multiplier applied to the t draws (1 for other margins).
  [[nodiscard]] double scale() const;
  /// Maps a standard normal draw z to F^{-1}(Phi(z)) (times gamma for scaled t).
  [[nodiscard]] double from_standard_normal(double z) const;
  /// "normal", "t3", "tu3" (unscaled), "exp(1)".
  [[nodiscard]] std::string label() const;
  /// Inverse of label(); throws InvalidArgument on unknown names.
  static MarginalDist parse(const std::string& label);

  Kind kind = Kind::Normal;
  double nu = 0.0;
  double rate = 1.0;
  bool scaled = false;
};

struct DependenceSpec {
  enum class Kind { Iid, Ar1 };

  static DependenceSpec iid() { return {Kind::Iid, 0.0}; }
  static DependenceSpec ar1(double phi);

  [[nodiscard]] double phi_or_zero() const noexcept { return kind == Kind::Ar1 ? phi : 0.0; }
  /// "iid" or "ar1(0.4)".
  [[nodiscard]] std::string label() const;
  static DependenceSpec parse(const std::string& label);

  Kind kind = Kind::Iid;
  double phi = 0.0;
};

struct ChangeSpec {
  enum class Kind { None, LocationJump, ScaleChange };

  static ChangeSpec none() { return {}; }
  /// X_i = Y_i + mu for i > floor(theta n).
  static ChangeSpec location_jump(double mu, double theta);
  /// X_i = Y_i / lambda2 for i > floor(theta n).
  static ChangeSpec scale_change(double lambda2, double theta);

  /// floor(theta n): the number of observations before the change.
  [[nodiscard]] std::size_t change_index(std::size_t n) const;
  /// True when the post-change law equals the pre-change law.
  [[nodiscard]] bool is_null() const noexcept;

  Kind kind = Kind::None;
  double mu = 0.0;
  double lambda2 = 1.0;
  double theta = 0.5;
};

struct DgpSpec {
  MarginalDist marginal = MarginalDist::normal();
  DependenceSpec dependence = DependenceSpec::iid();
  ChangeSpec change = ChangeSpec::none();
  std::size_t n = 240;
  std::uint64_t seed = 0;
};

/// SplitMix64 finalizer over (master, index): independent streams per replication.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Deterministic in spec.seed. The latent AR(1) starts from its stationary law.
[[nodiscard]] Sample generate(const DgpSpec& spec);

/// A closed-form population long-run variance, or the reason none is available.
struct LrvReference {
  std::optional<double> value;
  std::string reason;

  [[nodiscard]] bool available() const noexcept { return value.has_value(); }
};

[[nodiscard]] LrvReference true_lrv(const MarginalDist& marginal, const DependenceSpec& dependence,
                                    TestKind::Variant kind);

/// sum_{k>=1} arcsin(c phi^k), stopping once an increment drops below 1e-14.
[[nodiscard]] double arcsin_series(double phi, double c);

/// Median h of (X + Y)/2 for X, Y iid Exp(1): the root of 2 (1 + 2h) = e^{2h}.
[[nodiscard]] double exponential_hl_median();

}  // namespace uqcpt
