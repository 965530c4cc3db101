#include <cmath>

#include "tables.hpp"

namespace uqcpt::simd::detail {
namespace {

inline double apply(PairOp op, double x, double y) {
  return op == PairOp::Average ? (x + y) * 0.5 : std::fabs(x - y);
}

inline double epanechnikov(double u) { return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0; }

void pair_values(PairOp op, double x, const double* ys, std::size_t n, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = apply(op, x, ys[j]);
}

std::size_t count_pairs_le(PairOp op, double x, const double* ys, std::size_t n, double t) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j) count += apply(op, x, ys[j]) <= t ? 1 : 0;
  return count;
}

double epanechnikov_pair_sum(PairOp op, double x, const double* ys, std::size_t n, double t,
                             double d) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += epanechnikov((apply(op, x, ys[j]) - t) / d);
  return sum;
}

double epanechnikov_sum(const double* xs, std::size_t n, double center, double d) {
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += epanechnikov((xs[j] - center) / d);
  return sum;
}

double lagged_dot(const double* a, std::size_t n, std::size_t lag) {
  double sum = 0.0;
  if (lag >= n) return sum;
  for (std::size_t i = 0; i + lag < n; ++i) sum += a[i] * a[i + lag];
  return sum;
}

constexpr KernelTable kScalar{pair_values, count_pairs_le, epanechnikov_pair_sum, epanechnikov_sum,
                              lagged_dot};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace uqcpt::simd::detail
