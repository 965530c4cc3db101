#pragma once

#include <cmath>
#include <functional>
#include <string>

namespace uqcpt {

/// Built-in pairwise operations. The first two admit vectorized kernels and
/// monotone (sorted-matrix) selection; Custom goes through a std::function.
enum class PairOp { Average, AbsDiff, Custom };

/// A symmetric kernel g(x, y) of two reals.
class PairKernel {
 public:
  /// g(x, y) = (x + y) / 2, the Hodges-Lehmann kernel.
  static PairKernel average();
  /// g(x, y) = |x - y|, the Qn / Gini kernel.
  static PairKernel abs_diff();
  /// A user-supplied kernel. Symmetry is the caller's responsibility.
  static PairKernel custom(std::function<double(double, double)> g, std::string name);

  double operator()(double x, double y) const {
    switch (op_) {
      case PairOp::Average:
        return (x + y) * 0.5;
      case PairOp::AbsDiff:
        return std::fabs(x - y);
      case PairOp::Custom:
        break;
    }
    return fn_(x, y);
  }

  [[nodiscard]] PairOp op() const noexcept { return op_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  /// On sorted data, row i of the pair matrix (j > i) is non-decreasing in j.
  [[nodiscard]] bool sorted_rows_monotone() const noexcept { return op_ != PairOp::Custom; }

 private:
  PairKernel(PairOp op, std::function<double(double, double)> fn, std::string name)
      : op_(op), fn_(std::move(fn)), name_(std::move(name)) {}

  PairOp op_;
  std::function<double(double, double)> fn_;
  std::string name_;
};

/// A pairwise kernel together with a probability 0 < p < 1.
struct UQuantileSpec {
  UQuantileSpec(PairKernel kernel, double p);

  static UQuantileSpec hodges_lehmann() { return {PairKernel::average(), 0.5}; }
  /// Unscaled Qn: the lower quartile of pairwise distances.
  static UQuantileSpec qn() { return {PairKernel::abs_diff(), 0.25}; }

  PairKernel kernel;
  double p;
};

}  // namespace uqcpt
