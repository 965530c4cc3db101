#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uqcpt/pair_kernel.hpp"

namespace uqcpt::detail {

/// Repeated order-statistic queries over the pairs i < j of one sample.
class PairSelector {
 public:
  PairSelector(std::span<const double> values, const PairKernel& kernel);

  /// k-th smallest pair value, 1 <= k <= N.
  [[nodiscard]] double kth(std::uint64_t k);
  /// Type-7 interpolated quantile of the pair values.
  [[nodiscard]] double quantile_interpolated(double q);

  [[nodiscard]] std::uint64_t pairs() const noexcept { return pairs_; }

 private:
  double kth_sorted_matrix(std::uint64_t k);

  const PairKernel& kernel_;
  std::vector<double> values_;  // sorted for monotone kernels, original order otherwise
  std::vector<double> materialized_;
  std::uint64_t pairs_;
};

/// Boundaries b[i] = first column j > i with g(a_i, a_j) > v on sorted `a`,
/// for rows i = 0, ..., k - 2. Returns the number of pair values <= v.
std::uint64_t pair_boundaries_le(std::span<const double> sorted, const PairKernel& kernel, double v,
                                 std::span<std::size_t> boundaries);

}  // namespace uqcpt::detail
