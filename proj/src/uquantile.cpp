#include "uqcpt/uquantile.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <random>

#include "pair_select.hpp"
#include "uqcpt/error.hpp"
#include "uqcpt/rank_tree.hpp"
#include "uqcpt/simd/kernels.hpp"

namespace uqcpt {

namespace detail {

PairSelector::PairSelector(std::span<const double> values, const PairKernel& kernel)
    : kernel_(kernel), values_(values.begin(), values.end()), pairs_(pair_count(values.size())) {
  if (values_.size() < 2) throw InsufficientData("at least two observations are required");
  if (kernel_.sorted_rows_monotone()) std::sort(values_.begin(), values_.end());
}

double PairSelector::kth(std::uint64_t k) {
  if (k < 1 || k > pairs_) throw InvalidArgument("order statistic index out of range");
  if (kernel_.sorted_rows_monotone()) return kth_sorted_matrix(k);
  if (materialized_.empty()) {
    materialized_.reserve(pairs_);
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
      for (std::size_t j = i + 1; j < values_.size(); ++j) {
        materialized_.push_back(kernel_(values_[i], values_[j]));
      }
    }
  }
  const auto nth = materialized_.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(materialized_.begin(), nth, materialized_.end());
  return *nth;
}

double PairSelector::quantile_interpolated(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  const double h = static_cast<double>(pairs_ - 1) * q;
  const auto lo = static_cast<std::uint64_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  const double lower = kth(lo + 1);
  if (frac <= 0.0 || lo + 1 >= pairs_) return lower;
  const double upper = kth(lo + 2);
  return lower + frac * (upper - lower);
}

// Pivot search on the implicit matrix G[i][j] = g(a_i, a_j), j > i, whose rows
// are non-decreasing. Each row keeps a candidate column range [lo, hi); a
// random candidate pivot splits every range by binary search until few remain.
double PairSelector::kth_sorted_matrix(std::uint64_t k) {
  const std::span<const double> a = values_;
  const std::size_t n = a.size();
  const std::size_t rows = n - 1;
  std::vector<std::size_t> lo(rows), hi(rows, n), lt(rows), le(rows);
  for (std::size_t i = 0; i < rows; ++i) lo[i] = i + 1;
  std::mt19937_64 rng(0x5eed5eedULL);

  const auto first_where = [&](std::size_t i, std::size_t from, std::size_t to, auto&& pred) {
    // smallest j in [from, to) with pred(g(a_i, a_j)), or `to`
    std::size_t left = from;
    std::size_t right = to;
    while (left < right) {
      const std::size_t mid = left + (right - left) / 2;
      if (pred(kernel_(a[i], a[mid]))) {
        right = mid;
      } else {
        left = mid + 1;
      }
    }
    return left;
  };

  const std::uint64_t small = std::max<std::uint64_t>(4 * n, 256);
  while (true) {
    std::uint64_t total = 0;
    std::uint64_t below = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      total += hi[i] - lo[i];
      below += lo[i] - (i + 1);
    }
    if (total <= small) {
      std::vector<double> rest;
      rest.reserve(total);
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = lo[i]; j < hi[i]; ++j) rest.push_back(kernel_(a[i], a[j]));
      }
      const auto nth = rest.begin() + static_cast<std::ptrdiff_t>(k - below - 1);
      std::nth_element(rest.begin(), nth, rest.end());
      return *nth;
    }

    std::uint64_t pick = std::uniform_int_distribution<std::uint64_t>(0, total - 1)(rng);
    std::size_t row = 0;
    while (pick >= hi[row] - lo[row]) {
      pick -= hi[row] - lo[row];
      ++row;
    }
    const double pivot = kernel_(a[row], a[lo[row] + pick]);

    std::uint64_t count_lt = 0;
    std::uint64_t count_le = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      lt[i] = first_where(i, lo[i], hi[i], [pivot](double g) { return g >= pivot; });
      le[i] = first_where(i, lt[i], hi[i], [pivot](double g) { return g > pivot; });
      count_lt += lt[i] - (i + 1);
      count_le += le[i] - (i + 1);
    }
    if (k <= count_lt) {
      hi.swap(lt);
    } else if (k > count_le) {
      lo.swap(le);
    } else {
      return pivot;
    }
  }
}

std::uint64_t pair_boundaries_le(std::span<const double> a, const PairKernel& kernel, double v,
                                 std::span<std::size_t> b) {
  const std::size_t k = a.size();
  std::uint64_t count = 0;
  if (kernel.op() == PairOp::Average) {
    // first j over the whole row with g > v is non-increasing in i
    std::size_t j = k;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      while (j > 0 && kernel(a[i], a[j - 1]) > v) --j;
      b[i] = std::max(j, i + 1);
      count += b[i] - (i + 1);
    }
  } else if (kernel.op() == PairOp::AbsDiff) {
    // a_j - a_i over j > i; the boundary is non-decreasing in i
    std::size_t j = 1;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      j = std::max(j, i + 1);
      while (j < k && kernel(a[i], a[j]) <= v) ++j;
      b[i] = j;
      count += b[i] - (i + 1);
    }
  } else {
    throw InvalidArgument("pair boundaries require a monotone kernel");
  }
  return count;
}

}  // namespace detail

namespace {

struct HeapEntry {
  double value;
  std::size_t row;
  std::size_t col;
};

// Warm start: given v = U_{k-1}^{-1}(p), count the pairs of the k-prefix that
// are <= v and walk the row frontiers up or down to the new target rank.
std::vector<double> prefix_incremental(std::span<const double> x, const PairKernel& kernel,
                                       double p, std::size_t k_min) {
  const std::size_t n = x.size();
  std::vector<double> out;
  out.reserve(n - k_min + 1);
  std::vector<double> a;
  a.reserve(n);
  std::vector<std::size_t> bounds(n);
  std::vector<HeapEntry> heap;
  heap.reserve(n);
  const auto by_min = [](const HeapEntry& l, const HeapEntry& r) { return l.value > r.value; };
  const auto by_max = [](const HeapEntry& l, const HeapEntry& r) { return l.value < r.value; };

  double v = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    a.insert(std::upper_bound(a.begin(), a.end(), x[k - 1]), x[k - 1]);
    if (k < 2) continue;
    const std::uint64_t target = quantile_rank(p, pair_count(k));
    if (k == 2) {
      v = kernel(a[0], a[1]);
    } else {
      const std::uint64_t below =
          detail::pair_boundaries_le(a, kernel, v, std::span<std::size_t>(bounds.data(), k - 1));
      heap.clear();
      if (target <= below) {
        // (below - target + 1)-th largest among values <= v
        for (std::size_t i = 0; i + 1 < k; ++i) {
          if (bounds[i] > i + 1) heap.push_back({kernel(a[i], a[bounds[i] - 1]), i, bounds[i] - 1});
        }
        std::make_heap(heap.begin(), heap.end(), by_max);
        for (std::uint64_t step = below - target; step > 0; --step) {
          std::pop_heap(heap.begin(), heap.end(), by_max);
          const HeapEntry top = heap.back();
          heap.pop_back();
          if (top.col - 1 > top.row) {
            heap.push_back({kernel(a[top.row], a[top.col - 1]), top.row, top.col - 1});
            std::push_heap(heap.begin(), heap.end(), by_max);
          }
        }
      } else {
        // (target - below)-th smallest among values > v
        for (std::size_t i = 0; i + 1 < k; ++i) {
          if (bounds[i] < k) heap.push_back({kernel(a[i], a[bounds[i]]), i, bounds[i]});
        }
        std::make_heap(heap.begin(), heap.end(), by_min);
        for (std::uint64_t step = target - below - 1; step > 0; --step) {
          std::pop_heap(heap.begin(), heap.end(), by_min);
          const HeapEntry top = heap.back();
          heap.pop_back();
          if (top.col + 1 < k) {
            heap.push_back({kernel(a[top.row], a[top.col + 1]), top.row, top.col + 1});
            std::push_heap(heap.begin(), heap.end(), by_min);
          }
        }
      }
      v = heap.front().value;
    }
    if (k >= k_min) out.push_back(v);
  }
  return out;
}

std::vector<double> prefix_rank_tree(std::span<const double> x, const PairKernel& kernel, double p,
                                     std::size_t k_min) {
  const std::size_t n = x.size();
  std::vector<double> universe;
  universe.reserve(pair_count(n));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) universe.push_back(kernel(x[i], x[j]));
  }
  std::sort(universe.begin(), universe.end());
  RankTree tree(std::move(universe));

  std::vector<double> out;
  out.reserve(n - k_min + 1);
  for (std::size_t k = 2; k <= n; ++k) {
    for (std::size_t i = 0; i + 1 < k; ++i) tree.insert(kernel(x[i], x[k - 1]));
    if (k >= k_min) out.push_back(tree.kth(quantile_rank(p, tree.size())));
  }
  return out;
}

std::vector<double> prefix_recompute(std::span<const double> x, const PairKernel& kernel, double p,
                                     std::size_t k_min) {
  std::vector<double> out;
  std::vector<double> pairs;
  for (std::size_t k = k_min; k <= x.size(); ++k) {
    pairs.clear();
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) pairs.push_back(kernel(x[i], x[j]));
    }
    const auto nth = pairs.begin() + static_cast<std::ptrdiff_t>(quantile_rank(p, pairs.size()) - 1);
    std::nth_element(pairs.begin(), nth, pairs.end());
    out.push_back(*nth);
  }
  return out;
}

}  // namespace

std::uint64_t quantile_rank(double p, std::uint64_t pairs) {
  if (pairs == 0) throw InsufficientData("no pairs");
  const double target = p * static_cast<double>(pairs);
  const double k = std::ceil(target - std::fabs(target) * 1e-12);
  return std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(k, 1.0)), 1, pairs);
}

double u_dist_fn(const Sample& sample, const PairKernel& kernel, double t) {
  require_pairs(sample);
  const auto x = sample.values();
  std::uint64_t count = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (kernel.op() == PairOp::Custom) {
      for (std::size_t j = i + 1; j < x.size(); ++j) count += kernel(x[i], x[j]) <= t ? 1 : 0;
    } else {
      count += simd::count_pairs_le(kernel.op(), x[i], x.subspan(i + 1), t);
    }
  }
  return static_cast<double>(count) / static_cast<double>(pair_count(x.size()));
}

double pair_order_statistic(const Sample& sample, const PairKernel& kernel, std::uint64_t k) {
  require_pairs(sample);
  detail::PairSelector selector(sample.values(), kernel);
  return selector.kth(k) + 0.0;
}

double u_quantile(const Sample& sample, const UQuantileSpec& spec) {
  require_pairs(sample);
  return pair_order_statistic(sample, spec.kernel,
                              quantile_rank(spec.p, pair_count(sample.size())));
}

double hodges_lehmann(const Sample& sample) { return u_quantile(sample, UQuantileSpec::hodges_lehmann()); }

double pair_quantile_interpolated(const Sample& sample, const PairKernel& kernel, double q) {
  require_pairs(sample);
  detail::PairSelector selector(sample.values(), kernel);
  return selector.quantile_interpolated(q);
}

std::vector<double> prefix_u_quantiles(const Sample& sample, const UQuantileSpec& spec,
                                       std::size_t k_min, PrefixMethod method) {
  if (k_min < 2 || k_min > sample.size()) {
    throw InvalidArgument("prefix window must satisfy 2 <= k_min <= n");
  }
  const auto x = sample.values();
  if (method == PrefixMethod::Auto) {
    method = spec.kernel.sorted_rows_monotone() ? PrefixMethod::Incremental : PrefixMethod::RankTree;
  }
  std::vector<double> out;
  switch (method) {
    case PrefixMethod::Incremental:
      if (!spec.kernel.sorted_rows_monotone()) {
        throw InvalidArgument("incremental prefix quantiles need a monotone kernel");
      }
      out = prefix_incremental(x, spec.kernel, spec.p, k_min);
      break;
    case PrefixMethod::RankTree:
      out = prefix_rank_tree(x, spec.kernel, spec.p, k_min);
      break;
    case PrefixMethod::Recompute:
    case PrefixMethod::Auto:
      out = prefix_recompute(x, spec.kernel, spec.p, k_min);
      break;
  }
  // -0 and +0 tie in the multiset; which one a route lands on is arbitrary
  for (double& v : out) v += 0.0;
  return out;
}

std::vector<double> prefix_means(const Sample& sample) {
  std::vector<double> out;
  out.reserve(sample.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    sum += sample[k];
    out.push_back(sum / static_cast<double>(k + 1));
  }
  return out;
}

std::vector<double> prefix_medians(const Sample& sample) {
  std::vector<double> out;
  out.reserve(sample.size());
  std::priority_queue<double> lower;                                       // max-heap
  std::priority_queue<double, std::vector<double>, std::greater<>> upper;  // min-heap
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double x = sample[k];
    if (lower.empty() || x <= lower.top()) {
      lower.push(x);
    } else {
      upper.push(x);
    }
    if (lower.size() > upper.size() + 1) {
      upper.push(lower.top());
      lower.pop();
    } else if (upper.size() > lower.size()) {
      lower.push(upper.top());
      upper.pop();
    }
    out.push_back(lower.size() > upper.size() ? lower.top() : (lower.top() + upper.top()) / 2.0);
  }
  return out;
}

double sample_median(std::span<const double> values) {
  if (values.empty()) throw InsufficientData("median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

double sample_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw InsufficientData("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = static_cast<double>(v.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (frac <= 0.0 || lo + 1 >= v.size()) return v[lo];
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

namespace {

std::uint64_t count_row(const PairKernel& kernel, double x, std::span<const double> ys, double t) {
  if (kernel.op() != PairOp::Custom) return simd::count_pairs_le(kernel.op(), x, ys, t);
  std::uint64_t count = 0;
  for (double y : ys) count += kernel(x, y) <= t ? 1 : 0;
  return count;
}

}  // namespace

std::vector<double> h1_hat_values(const Sample& sample, const PairKernel& kernel, double t) {
  const auto x = sample.values();
  const auto n = static_cast<double>(x.size());
  std::vector<double> out(x.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::uint64_t c = count_row(kernel, x[i], x, t);
    out[i] = static_cast<double>(c);
    total += c;
  }
  const double centering = static_cast<double>(total) / (n * n);
  for (double& v : out) v = v / n - centering;
  return out;
}

double h1_hat(const Sample& sample, const PairKernel& kernel, double t, double x) {
  const auto xs = sample.values();
  const auto n = static_cast<double>(xs.size());
  std::uint64_t total = 0;
  for (double xi : xs) total += count_row(kernel, xi, xs, t);
  return static_cast<double>(count_row(kernel, x, xs, t)) / n - static_cast<double>(total) / (n * n);
}

}  // namespace uqcpt
