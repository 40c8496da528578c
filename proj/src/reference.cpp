#include "sparsep/reference.hpp"

#include <cmath>
#include <random>

#include "sparsep/formats.hpp"

namespace sparsep {

template <class T> std::vector<T> reference_spmv(const TripletMatrix &m, std::span<const T> x) {
  if (x.size() != m.n_cols) {
    throw SchemeError("input vector has " + std::to_string(x.size()) + " elements, matrix has " +
                      std::to_string(m.n_cols) + " columns");
  }
  TripletMatrix sorted = m;
  if (!sorted.is_canonical()) sorted.canonicalize();
  std::vector<T> y(m.n_rows, T{});
  for (const Entry<T> &e : typed_entries<T>(sorted)) {
    y[e.row] = scalar::mac(y[e.row], e.value, x[e.col]);
  }
  return y;
}

template <class T> std::vector<T> make_input_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<T> x(n);
  for (auto &v : x) {
    const std::uint64_t u = rng();
    if constexpr (std::is_integral_v<T>) {
      v = static_cast<T>(static_cast<std::int64_t>(u % 7) - 3);
    } else {
      // 53 random bits mapped onto [-1, 1]; independent of the library's distributions.
      const double unit = static_cast<double>(u >> 11) * 0x1.0p-53;
      v = static_cast<T>(2.0 * unit - 1.0);
    }
  }
  return x;
}

template <class T> bool outputs_match(std::span<const T> got, std::span<const T> expected) {
  if (got.size() != expected.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if constexpr (std::is_integral_v<T>) {
      if (got[i] != expected[i]) return false;
    } else {
      const double g = got[i], e = expected[i];
      if (!(std::abs(g - e) <= output_tolerance<T>() * (std::abs(e) + 1.0))) return false;
    }
  }
  return true;
}

#define SPARSEP_INSTANTIATE_REFERENCE(T)                                                     \
  template std::vector<T> reference_spmv<T>(const TripletMatrix &, std::span<const T>);       \
  template std::vector<T> make_input_vector<T>(std::size_t, std::uint64_t);                   \
  template bool outputs_match<T>(std::span<const T>, std::span<const T>);

SPARSEP_FOR_EACH_SCALAR(SPARSEP_INSTANTIATE_REFERENCE)

} // namespace sparsep
