#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace collapse {

/// Pairwise summation. The split points depend only on the length, so the
/// result is independent of how the values were produced.
template <typename Real>
Real pairwise_sum(std::span<const Real> values) {
  constexpr std::size_t kBlock = 32;
  if (values.size() <= kBlock) {
    Real acc{0};
    for (const Real v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename Real>
struct MeanAndError {
  Real mean{0};
  Real standard_error{0};
};

/// Mean and standard error (population standard deviation over sqrt(n)).
template <typename Real>
MeanAndError<Real> mean_and_error(std::span<const Real> values) {
  const auto n = static_cast<Real>(values.size());
  if (values.empty()) return {};
  const Real mean = pairwise_sum(values) / n;
  std::vector<Real> centred(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) centred[i] = (values[i] - mean) * (values[i] - mean);
  const Real ss = pairwise_sum(std::span<const Real>(centred));
  const Real variance = ss / n;
  return {mean, std::sqrt(variance / n)};
}

}  // namespace collapse
