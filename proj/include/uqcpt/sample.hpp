#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uqcpt {

/// An ordered series of finite reals, n >= 1.
class Sample {
 public:
  /// Throws InvalidArgument on non-finite entries and InsufficientData when empty.
  explicit Sample(std::vector<double> values);

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// The first `k` observations as a new sample.
  [[nodiscard]] Sample prefix(std::size_t k) const;

 private:
  std::vector<double> values_;
};

/// Throws InsufficientData unless the sample holds at least two observations.
void require_pairs(const Sample& sample);

}  // namespace uqcpt
