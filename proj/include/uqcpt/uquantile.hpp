#pragma once

// Empirical U-distribution functions and U-quantiles over the pairs i < j,
// their prefix sequences, and the plug-in first Hoeffding projection.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "uqcpt/pair_kernel.hpp"
#include "uqcpt/sample.hpp"

namespace uqcpt {

/// Number of unordered pairs, n (n - 1) / 2.
[[nodiscard]] constexpr std::uint64_t pair_count(std::size_t n) noexcept {
  return n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
}

/// The order-statistic index ceil(p N) in [1, N] realizing inf{t : U_n(t) >= p}.
/// A relative slack of 1e-12 absorbs p N landing a rounding error above an integer.
[[nodiscard]] std::uint64_t quantile_rank(double p, std::uint64_t pairs);

/// U_n(t): fraction of pairs with g(X_i, X_j) <= t.
[[nodiscard]] double u_dist_fn(const Sample& sample, const PairKernel& kernel, double t);

/// The k-th smallest (1-based) of the N pairwise kernel values.
///
/// Monotone kernels run a randomized pivot search on the implicit sorted
/// pair matrix in O(n log^2 n) expected time; custom kernels materialize the
/// pair values and use quickselect.
[[nodiscard]] double pair_order_statistic(const Sample& sample, const PairKernel& kernel,
                                          std::uint64_t k);

/// U_n^{-1}(p), the ceil(p N)-th smallest pairwise value.
[[nodiscard]] double u_quantile(const Sample& sample, const UQuantileSpec& spec);

/// Median of the pairwise averages (i < j, lower median for even N).
[[nodiscard]] double hodges_lehmann(const Sample& sample);

/// Sample quantile of the pairwise values with linear interpolation between
/// order statistics (R's type 7).
[[nodiscard]] double pair_quantile_interpolated(const Sample& sample, const PairKernel& kernel,
                                                double q);

enum class PrefixMethod {
  Auto,         ///< Incremental for monotone kernels, RankTree otherwise.
  Incremental,  ///< Warm start from the previous prefix quantile (monotone kernels only).
  RankTree,     ///< Fenwick tree over the ranks of all N pair values.
  Recompute,    ///< Quickselect from scratch per prefix; the reference route.
};

/// U_k^{-1}(p) for k = k_min, ..., n. Every method yields bit-identical output.
[[nodiscard]] std::vector<double> prefix_u_quantiles(const Sample& sample,
                                                     const UQuantileSpec& spec,
                                                     std::size_t k_min,
                                                     PrefixMethod method = PrefixMethod::Auto);

/// Running means for k = 1, ..., n.
[[nodiscard]] std::vector<double> prefix_means(const Sample& sample);

/// Running sample medians for k = 1, ..., n; even k averages the two central values.
[[nodiscard]] std::vector<double> prefix_medians(const Sample& sample);

/// Sample median, averaging the two central order statistics when n is even.
[[nodiscard]] double sample_median(std::span<const double> values);

/// Type-7 sample quantile of raw values.
[[nodiscard]] double sample_quantile(std::span<const double> values, double q);

/// h1_hat(x, t) = (1/n) sum_i 1{g(x, X_i) <= t} - (1/n^2) sum_{i,j} 1{g(X_i, X_j) <= t}.
/// The double sum includes the diagonal i = j.
[[nodiscard]] double h1_hat(const Sample& sample, const PairKernel& kernel, double t, double x);

/// h1_hat(X_i, t) for every observation, in O(n^2) total.
[[nodiscard]] std::vector<double> h1_hat_values(const Sample& sample, const PairKernel& kernel,
                                                double t);

}  // namespace uqcpt
