// Compiled with -mavx2 only; never called unless the CPU reports AVX2.

#include <immintrin.h>

#include <cmath>

#include "tables.hpp"

namespace uqcpt::simd::detail {
namespace {

inline double apply(PairOp op, double x, double y) {
  return op == PairOp::Average ? (x + y) * 0.5 : std::fabs(x - y);
}

inline double epanechnikov(double u) { return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

template <PairOp Op>
inline __m256d apply4(__m256d vx, __m256d vy) {
  if constexpr (Op == PairOp::Average) {
    return _mm256_mul_pd(_mm256_add_pd(vx, vy), _mm256_set1_pd(0.5));
  } else {
    return abs_pd(_mm256_sub_pd(vx, vy));
  }
}

// Lane-wise 0.75 (1 - u^2) on |u| <= 1, zero elsewhere.
inline __m256d epanechnikov4(__m256d u) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inside = _mm256_cmp_pd(abs_pd(u), one, _CMP_LE_OQ);
  const __m256d w = _mm256_mul_pd(_mm256_set1_pd(0.75), _mm256_sub_pd(one, _mm256_mul_pd(u, u)));
  return _mm256_and_pd(inside, w);
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

template <PairOp Op>
void pair_values_impl(double x, const double* ys, std::size_t n, double* out) {
  const __m256d vx = _mm256_set1_pd(x);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, apply4<Op>(vx, _mm256_loadu_pd(ys + j)));
  for (; j < n; ++j) out[j] = apply(Op, x, ys[j]);
}

void pair_values(PairOp op, double x, const double* ys, std::size_t n, double* out) {
  if (op == PairOp::Average) {
    pair_values_impl<PairOp::Average>(x, ys, n, out);
  } else {
    pair_values_impl<PairOp::AbsDiff>(x, ys, n, out);
  }
}

template <PairOp Op>
std::size_t count_impl(double x, const double* ys, std::size_t n, double t) {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vt = _mm256_set1_pd(t);
  std::size_t count = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d le = _mm256_cmp_pd(apply4<Op>(vx, _mm256_loadu_pd(ys + j)), vt, _CMP_LE_OQ);
    count += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(le)));
  }
  for (; j < n; ++j) count += apply(Op, x, ys[j]) <= t ? 1 : 0;
  return count;
}

std::size_t count_pairs_le(PairOp op, double x, const double* ys, std::size_t n, double t) {
  return op == PairOp::Average ? count_impl<PairOp::Average>(x, ys, n, t)
                               : count_impl<PairOp::AbsDiff>(x, ys, n, t);
}

template <PairOp Op>
double epan_pair_impl(double x, const double* ys, std::size_t n, double t, double d) {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d vd = _mm256_set1_pd(d);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d u = _mm256_div_pd(_mm256_sub_pd(apply4<Op>(vx, _mm256_loadu_pd(ys + j)), vt), vd);
    acc = _mm256_add_pd(acc, epanechnikov4(u));
  }
  double sum = hsum(acc);
  for (; j < n; ++j) sum += epanechnikov((apply(Op, x, ys[j]) - t) / d);
  return sum;
}

double epanechnikov_pair_sum(PairOp op, double x, const double* ys, std::size_t n, double t,
                             double d) {
  return op == PairOp::Average ? epan_pair_impl<PairOp::Average>(x, ys, n, t, d)
                               : epan_pair_impl<PairOp::AbsDiff>(x, ys, n, t, d);
}

double epanechnikov_sum(const double* xs, std::size_t n, double center, double d) {
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d vd = _mm256_set1_pd(d);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d u = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + j), vc), vd);
    acc = _mm256_add_pd(acc, epanechnikov4(u));
  }
  double sum = hsum(acc);
  for (; j < n; ++j) sum += epanechnikov((xs[j] - center) / d);
  return sum;
}

double lagged_dot(const double* a, std::size_t n, std::size_t lag) {
  if (lag >= n) return 0.0;
  const std::size_t m = n - lag;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(a + i + lag)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(a + i + 4 + lag)));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) sum += a[i] * a[i + lag];
  return sum;
}

constexpr KernelTable kAvx2{pair_values, count_pairs_le, epanechnikov_pair_sum, epanechnikov_sum,
                            lagged_dot};

}  // namespace

const KernelTable& avx2_kernels() noexcept { return kAvx2; }

}  // namespace uqcpt::simd::detail
