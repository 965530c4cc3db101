#include "uqcpt/sample.hpp"

#include <cmath>
#include <string>

#include "uqcpt/error.hpp"

namespace uqcpt {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InsufficientData("sample is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("sample entry " + std::to_string(i + 1) + " is not finite");
    }
  }
}

Sample Sample::prefix(std::size_t k) const {
  if (k == 0 || k > values_.size()) throw InvalidArgument("prefix length out of range");
  return Sample(std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(k)));
}

void require_pairs(const Sample& sample) {
  if (sample.size() < 2) throw InsufficientData("at least two observations are required");
}

}  // namespace uqcpt
