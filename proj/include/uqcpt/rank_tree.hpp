#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace uqcpt {

/// Order-statistic multiset over a fixed, sorted universe of keys.
///
/// Keys are located by binary search and counted in a Fenwick tree, so an
/// insertion and a k-th smallest query each cost O(log U).
class RankTree {
 public:
  /// `universe` must be sorted ascending; duplicates are allowed.
  explicit RankTree(std::vector<double> universe);

  /// Adds one copy of `key`, which must be present in the universe.
  void insert(double key);

  /// The k-th smallest inserted key, 1-based. Requires 1 <= k <= size().
  [[nodiscard]] double kth(std::uint64_t k) const;

  [[nodiscard]] std::uint64_t size() const noexcept { return size_; }

 private:
  std::vector<double> keys_;
  std::vector<std::uint64_t> tree_;  // 1-based Fenwick array
  std::uint64_t size_ = 0;
  std::size_t top_bit_ = 0;
};

}  // namespace uqcpt
