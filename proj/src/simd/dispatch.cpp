#include <atomic>
#include <cstdlib>
#include <string_view>

#include "tables.hpp"
#include "uqcpt/error.hpp"

namespace uqcpt::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(UQCPT_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

// UQCPT_SIMD=scalar forces the reference kernels.
Level initial_level() noexcept {
  if (const char* env = std::getenv("UQCPT_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return Level::Scalar;
  }
  return detected_level();
}

std::atomic<Level>& active() noexcept {
  static std::atomic<Level> level{initial_level()};
  return level;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return detail::scalar_kernels(); }

const KernelTable* avx2_table() noexcept {
#if defined(UQCPT_HAVE_AVX2)
  return &detail::avx2_kernels();
#else
  return nullptr;
#endif
}

Level detected_level() noexcept { return cpu_has_avx2() ? Level::Avx2 : Level::Scalar; }

Level active_level() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_level(Level level) {
  if (level == Level::Avx2 && detected_level() != Level::Avx2) {
    throw InvalidArgument("AVX2 kernels are not available on this machine");
  }
  active().store(level, std::memory_order_relaxed);
}

std::string_view level_name(Level level) noexcept {
  return level == Level::Avx2 ? "avx2" : "scalar";
}

const KernelTable& active_table() noexcept {
#if defined(UQCPT_HAVE_AVX2)
  if (active_level() == Level::Avx2) return detail::avx2_kernels();
#endif
  return detail::scalar_kernels();
}

void pair_values(PairOp op, double x, std::span<const double> ys, std::span<double> out) {
  active_table().pair_values(op, x, ys.data(), ys.size(), out.data());
}

std::size_t count_pairs_le(PairOp op, double x, std::span<const double> ys, double t) {
  return active_table().count_pairs_le(op, x, ys.data(), ys.size(), t);
}

double epanechnikov_pair_sum(PairOp op, double x, std::span<const double> ys, double t, double d) {
  return active_table().epanechnikov_pair_sum(op, x, ys.data(), ys.size(), t, d);
}

double epanechnikov_sum(std::span<const double> xs, double center, double d) {
  return active_table().epanechnikov_sum(xs.data(), xs.size(), center, d);
}

double lagged_dot(std::span<const double> a, std::size_t lag) {
  return active_table().lagged_dot(a.data(), a.size(), lag);
}

}  // namespace uqcpt::simd
