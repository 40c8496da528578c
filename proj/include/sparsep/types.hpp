#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace sparsep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed Matrix Market input. Carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class GeneratorError : public Error {
public:
  using Error::Error;
};

/// Invalid scheme/format/partition combination or bad planning arguments.
class SchemeError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

enum class DType { i8, i16, i32, i64, f32, f64 };

inline constexpr DType kAllDTypes[] = {DType::i8,  DType::i16, DType::i32,
                                       DType::i64, DType::f32, DType::f64};

constexpr std::size_t dtype_width(DType t) {
  switch (t) {
  case DType::i8: return 1;
  case DType::i16: return 2;
  case DType::i32: return 4;
  case DType::i64: return 8;
  case DType::f32: return 4;
  case DType::f64: return 8;
  }
  return 0;
}

constexpr bool dtype_is_float(DType t) { return t == DType::f32 || t == DType::f64; }

std::string_view to_string(DType t);
DType parse_dtype(std::string_view s);

template <class T> struct dtype_of;
template <> struct dtype_of<std::int8_t> { static constexpr DType value = DType::i8; };
template <> struct dtype_of<std::int16_t> { static constexpr DType value = DType::i16; };
template <> struct dtype_of<std::int32_t> { static constexpr DType value = DType::i32; };
template <> struct dtype_of<std::int64_t> { static constexpr DType value = DType::i64; };
template <> struct dtype_of<float> { static constexpr DType value = DType::f32; };
template <> struct dtype_of<double> { static constexpr DType value = DType::f64; };

template <class T> inline constexpr DType dtype_v = dtype_of<T>::value;

template <class T> struct type_tag { using type = T; };

/// Invokes `f(type_tag<T>{})` with the C++ scalar type matching `t`.
template <class F> decltype(auto) dispatch_dtype(DType t, F &&f) {
  switch (t) {
  case DType::i8: return f(type_tag<std::int8_t>{});
  case DType::i16: return f(type_tag<std::int16_t>{});
  case DType::i32: return f(type_tag<std::int32_t>{});
  case DType::i64: return f(type_tag<std::int64_t>{});
  case DType::f32: return f(type_tag<float>{});
  case DType::f64: break;
  }
  return f(type_tag<double>{});
}

// Accumulation happens at the element width. Integers wrap modulo 2^bits.
namespace scalar {

template <class T> constexpr T add(T a, T b) {
  if constexpr (std::is_integral_v<T>) {
    using U = std::make_unsigned_t<T>;
    using W = std::conditional_t<(sizeof(T) < sizeof(unsigned)), unsigned, U>;
    return static_cast<T>(static_cast<U>(static_cast<W>(static_cast<U>(a)) +
                                         static_cast<W>(static_cast<U>(b))));
  } else {
    return a + b;
  }
}

template <class T> constexpr T mul(T a, T b) {
  if constexpr (std::is_integral_v<T>) {
    using U = std::make_unsigned_t<T>;
    using W = std::conditional_t<(sizeof(T) < sizeof(unsigned)), unsigned, U>;
    return static_cast<T>(static_cast<U>(static_cast<W>(static_cast<U>(a)) *
                                         static_cast<W>(static_cast<U>(b))));
  } else {
    return a * b;
  }
}

/// acc + a * b with the multiply rounded before the add.
template <class T> constexpr T mac(T acc, T a, T b) { return add(acc, mul(a, b)); }

/// Converts a file/generator value to the element type (integer conversion wraps).
template <class T> T from_double(double v) {
  if constexpr (std::is_integral_v<T>) {
    return static_cast<T>(static_cast<std::int64_t>(v));
  } else {
    return static_cast<T>(v);
  }
}

} // namespace scalar

inline constexpr std::size_t round_up(std::size_t v, std::size_t m) {
  return m == 0 ? v : (v + m - 1) / m * m;
}

inline constexpr std::size_t ceil_div(std::size_t a, std::size_t b) {
  return b == 0 ? 0 : (a + b - 1) / b;
}

/// Expands M(T) for every supported scalar type (explicit instantiations).
#define SPARSEP_FOR_EACH_SCALAR(M)                                                           \
  M(std::int8_t) M(std::int16_t) M(std::int32_t) M(std::int64_t) M(float) M(double)

} // namespace sparsep
