#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsep/matio.hpp"

namespace sparsep {

/// y = A x with each row accumulated in ascending column order at element
/// width. This order is the canonical one for float comparisons.
template <class T> std::vector<T> reference_spmv(const TripletMatrix &m, std::span<const T> x);

/// Deterministic input vector: small integers for integer types, values in
/// [-1, 1] for floats.
template <class T> std::vector<T> make_input_vector(std::size_t n, std::uint64_t seed);

/// Elementwise tolerance check: bitwise for integers; for floats
/// |a - b| <= tol * (|b| + 1) with tol 1e-6 (fp32) or 1e-12 (fp64).
template <class T> bool outputs_match(std::span<const T> got, std::span<const T> expected);

template <class T> constexpr double output_tolerance() {
  if constexpr (std::is_same_v<T, float>) return 1e-6;
  else if constexpr (std::is_same_v<T, double>) return 1e-12;
  else return 0.0;
}

} // namespace sparsep
