#pragma once

// Studentized change-point processes, max-type statistics and the law of the
// supremum of the absolute Brownian bridge.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "uqcpt/lrv.hpp"
#include "uqcpt/pair_kernel.hpp"
#include "uqcpt/sample.hpp"

namespace uqcpt {

/// Which location functional drives the change-point process.
class TestKind {
 public:
  enum class Variant { Cusum, Median, HodgesLehmann, GeneralUQuantile };

  static TestKind cusum() { return TestKind(Variant::Cusum, std::nullopt); }
  static TestKind median() { return TestKind(Variant::Median, std::nullopt); }
  static TestKind hodges_lehmann() { return TestKind(Variant::HodgesLehmann, std::nullopt); }
  static TestKind general(UQuantileSpec spec) { return TestKind(Variant::GeneralUQuantile, std::move(spec)); }

  [[nodiscard]] Variant variant() const noexcept { return variant_; }
  /// Only set for GeneralUQuantile.
  [[nodiscard]] const std::optional<UQuantileSpec>& spec() const noexcept { return spec_; }
  [[nodiscard]] std::string name() const;
  /// 1 for CUSUM; 11 for the robust tests, which skip the first 10 estimates.
  [[nodiscard]] std::size_t default_k_min() const noexcept { return variant_ == Variant::Cusum ? 1 : 11; }
  /// Smallest prefix length at which the estimator is defined.
  [[nodiscard]] std::size_t min_prefix() const noexcept {
    return variant_ == Variant::Cusum || variant_ == Variant::Median ? 1 : 2;
  }

 private:
  TestKind(Variant variant, std::optional<UQuantileSpec> spec) : variant_(variant), spec_(std::move(spec)) {}

  Variant variant_;
  std::optional<UQuantileSpec> spec_;
};

/// Process values for k = first_k, ..., n.
struct Trajectory {
  std::size_t first_k = 1;
  std::vector<double> values;

  [[nodiscard]] std::size_t last_k() const noexcept { return first_k + values.size() - 1; }
};

struct MaxResult {
  double statistic = 0.0;
  std::size_t argmax_k = 0;
};

struct ChangePointResult {
  double statistic = 0.0;
  Trajectory trajectory;
  std::size_t changepoint_k = 0;
  double lrv_used = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;  ///< at the requested alpha
  bool reject = false;          ///< at the requested alpha
  bool reject_at_5pct = false;
};

/// Estimator values theta_k for k = k_min, ..., n.
[[nodiscard]] std::vector<double> estimator_path(const Sample& sample, const TestKind& kind,
                                                 std::size_t k_min);

/// Long-run variance of the kind's estimator under `config`.
[[nodiscard]] double long_run_variance(const Sample& sample, const TestKind& kind,
                                       const LrvConfig& config);

/// (k / sqrt n) (theta_k - theta_n) / sigma for k = k_min..n, sigma from the full sample.
[[nodiscard]] Trajectory trajectory(const Sample& sample, const TestKind& kind,
                                    const LrvConfig& config, std::size_t k_min);

/// Same, with a precomputed long-run variance.
[[nodiscard]] Trajectory trajectory_with_lrv(const Sample& sample, const TestKind& kind,
                                             double lrv, std::size_t k_min);

/// max |trajectory(k)| over k >= k_min; ties go to the smallest k.
[[nodiscard]] MaxResult test_statistic(const Trajectory& trajectory, std::size_t k_min);

/// P(sup_{0<=s<=1} |B(s)| <= x) for a standard Brownian bridge B.
[[nodiscard]] double sup_bb_cdf(double x);

/// The (1 - alpha) quantile of sup |B|.
[[nodiscard]] double critical_value(double alpha);

/// k_min defaults to kind.default_k_min().
[[nodiscard]] ChangePointResult run_test(const Sample& sample, const TestKind& kind,
                                         const LrvConfig& config,
                                         std::optional<std::size_t> k_min = std::nullopt,
                                         double alpha = 0.05);

}  // namespace uqcpt
