#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace heis {

namespace detail {
inline constexpr std::size_t kPairwiseLeaf = 16;
}

/// Balanced-tree summation of term(i) for i in [lo, hi).
///
/// The split points depend only on the range, so the result is a fixed
/// function of the inputs no matter how callers schedule the work.
template <class Term>
double pairwise_sum(std::size_t lo, std::size_t hi, const Term& term) {
  const std::size_t n = hi - lo;
  if (n <= detail::kPairwiseLeaf) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

inline double pairwise_sum(std::span<const double> v) {
  return pairwise_sum(0, v.size(), [&](std::size_t i) { return v[i]; });
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(std::span<const double>(v));
}

}  // namespace heis
