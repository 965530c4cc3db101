#pragma once

// Data-parallel inner loops shared by the estimators. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant chosen at
// runtime. Element-wise results are bit-identical across variants; sums may
// differ in the last bits because the lanes are reduced in a different order.

#include <cstddef>
#include <span>
#include <string_view>

#include "uqcpt/pair_kernel.hpp"

namespace uqcpt::simd {

enum class Level { Scalar, Avx2 };

struct KernelTable {
  /// out[j] = g(x, ys[j])
  void (*pair_values)(PairOp op, double x, const double* ys, std::size_t n, double* out);
  /// #{j : g(x, ys[j]) <= t}
  std::size_t (*count_pairs_le)(PairOp op, double x, const double* ys, std::size_t n, double t);
  /// sum_j K((g(x, ys[j]) - t) / d) with K the Epanechnikov kernel
  double (*epanechnikov_pair_sum)(PairOp op, double x, const double* ys, std::size_t n, double t,
                                  double d);
  /// sum_j K((xs[j] - center) / d) with K the Epanechnikov kernel
  double (*epanechnikov_sum)(const double* xs, std::size_t n, double center, double d);
  /// sum_{i < n - lag} a[i] * a[i + lag]
  double (*lagged_dot)(const double* a, std::size_t n, std::size_t lag);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table() noexcept;

/// Best level supported by both the build and the running CPU.
Level detected_level() noexcept;
Level active_level() noexcept;
/// Throws InvalidArgument if `level` is unavailable on this machine.
void set_active_level(Level level);
std::string_view level_name(Level level) noexcept;

const KernelTable& active_table() noexcept;

// Span wrappers over the active table. `op` must not be PairOp::Custom.

void pair_values(PairOp op, double x, std::span<const double> ys, std::span<double> out);
std::size_t count_pairs_le(PairOp op, double x, std::span<const double> ys, double t);
double epanechnikov_pair_sum(PairOp op, double x, std::span<const double> ys, double t, double d);
double epanechnikov_sum(std::span<const double> xs, double center, double d);
double lagged_dot(std::span<const double> a, std::size_t lag);

/// Restores the previous active level on destruction.
class ScopedLevel {
 public:
  explicit ScopedLevel(Level level) : previous_(active_level()) { set_active_level(level); }
  ~ScopedLevel() { set_active_level(previous_); }
  ScopedLevel(const ScopedLevel&) = delete;
  ScopedLevel& operator=(const ScopedLevel&) = delete;

 private:
  Level previous_;
};

}  // namespace uqcpt::simd
