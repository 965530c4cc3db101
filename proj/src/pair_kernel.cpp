#include "uqcpt/pair_kernel.hpp"

#include "uqcpt/error.hpp"

namespace uqcpt {

PairKernel PairKernel::average() { return {PairOp::Average, {}, "average"}; }

PairKernel PairKernel::abs_diff() { return {PairOp::AbsDiff, {}, "absdiff"}; }

PairKernel PairKernel::custom(std::function<double(double, double)> g, std::string name) {
  if (!g) throw InvalidArgument("custom pair kernel is empty");
  return {PairOp::Custom, std::move(g), std::move(name)};
}

UQuantileSpec::UQuantileSpec(PairKernel kernel_, double p_) : kernel(std::move(kernel_)), p(p_) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("U-quantile probability must lie in (0, 1)");
}

}  // namespace uqcpt
