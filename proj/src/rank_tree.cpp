#include "uqcpt/rank_tree.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

#include "uqcpt/error.hpp"

namespace uqcpt {

RankTree::RankTree(std::vector<double> universe)
    : keys_(std::move(universe)), tree_(keys_.size() + 1, 0) {
  top_bit_ = keys_.empty() ? 0 : std::bit_floor(keys_.size());
}

void RankTree::insert(double key) {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) throw InvalidArgument("RankTree: key outside the universe");
  for (std::size_t i = static_cast<std::size_t>(it - keys_.begin()) + 1; i < tree_.size();
       i += i & (~i + 1)) {
    ++tree_[i];
  }
  ++size_;
}

double RankTree::kth(std::uint64_t k) const {
  assert(k >= 1 && k <= size_);
  // Binary lifting: largest position whose prefix count is < k.
  std::size_t pos = 0;
  std::uint64_t remaining = k;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next < tree_.size() && tree_[next] < remaining) {
      pos = next;
      remaining -= tree_[next];
    }
  }
  return keys_[pos];
}

}  // namespace uqcpt
