#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <variant>
#include <vector>

#include "sparsep/matio.hpp"
#include "sparsep/types.hpp"

namespace sparsep {

enum class Format { csr, coo, bcsr, bcoo };

std::string_view to_string(Format f);

inline constexpr bool is_blocked(Format f) { return f == Format::bcsr || f == Format::bcoo; }

struct BlockShape {
  std::size_t r = 4;
  std::size_t c = 4;
  friend bool operator==(const BlockShape &, const BlockShape &) = default;
};

/// One nonzero in element type T.
template <class T> struct Entry {
  std::size_t row = 0;
  std::size_t col = 0;
  T value{};
  friend bool operator==(const Entry &, const Entry &) = default;
};

template <class T> struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> rowptr{0};
  std::vector<std::size_t> colind;
  std::vector<T> values;

  std::size_t nnz() const { return colind.size(); }
  std::size_t row_nnz(std::size_t i) const { return rowptr[i + 1] - rowptr[i]; }
};

template <class T> struct CooTuple {
  std::size_t row = 0;
  std::size_t col = 0;
  T value{};
};

template <class T> struct CooMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<CooTuple<T>> tuples;

  std::size_t nnz() const { return tuples.size(); }
};

/// Block CSR. Each stored block is dense r x c (row-major) and zero padded;
/// `bmask` marks which block cells hold an original nonzero.
template <class T> struct BcsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  BlockShape shape;
  std::vector<std::size_t> browptr{0};
  std::vector<std::size_t> bcolind;
  std::vector<T> bvalues;
  std::vector<std::uint8_t> bmask;
  std::vector<std::size_t> block_nnz;

  std::size_t n_block_rows() const { return ceil_div(n_rows, shape.r); }
  std::size_t n_blocks() const { return bcolind.size(); }
  std::size_t block_elems() const { return shape.r * shape.c; }
  std::size_t nnz() const;
  double fill_ratio() const;
};

template <class T> struct BcooMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  BlockShape shape;
  std::vector<std::size_t> browind;
  std::vector<std::size_t> bcolind;
  std::vector<T> bvalues;
  std::vector<std::uint8_t> bmask;
  std::vector<std::size_t> block_nnz;

  std::size_t n_block_rows() const { return ceil_div(n_rows, shape.r); }
  std::size_t n_blocks() const { return bcolind.size(); }
  std::size_t block_elems() const { return shape.r * shape.c; }
  std::size_t nnz() const;
  double fill_ratio() const;
};

template <class T>
using AnyMatrix = std::variant<CsrMatrix<T>, CooMatrix<T>, BcsrMatrix<T>, BcooMatrix<T>>;

template <class T> std::vector<Entry<T>> typed_entries(const TripletMatrix &m);

template <class T> CsrMatrix<T> to_csr(const TripletMatrix &m);
template <class T> CooMatrix<T> to_coo(const TripletMatrix &m);
template <class T> BcsrMatrix<T> to_bcsr(const TripletMatrix &m, BlockShape shape = {});
template <class T> BcooMatrix<T> to_bcoo(const TripletMatrix &m, BlockShape shape = {});
template <class T>
AnyMatrix<T> encode(const TripletMatrix &m, Format f, BlockShape shape = {});

// Same encoders over typed, canonically sorted entries.
template <class T>
CsrMatrix<T> csr_from_entries(std::size_t n_rows, std::size_t n_cols,
                              const std::vector<Entry<T>> &e);
template <class T>
CooMatrix<T> coo_from_entries(std::size_t n_rows, std::size_t n_cols,
                              const std::vector<Entry<T>> &e);
template <class T>
BcsrMatrix<T> bcsr_from_entries(std::size_t n_rows, std::size_t n_cols, BlockShape shape,
                                const std::vector<Entry<T>> &e);
template <class T> BcooMatrix<T> bcoo_from_bcsr(const BcsrMatrix<T> &m);
template <class T>
AnyMatrix<T> encode_entries(std::size_t n_rows, std::size_t n_cols,
                            const std::vector<Entry<T>> &e, Format f, BlockShape shape);

/// Original nonzeros of any format, sorted by (row, col).
template <class T> std::vector<Entry<T>> entries_of(const AnyMatrix<T> &m);

/// Row-major dense reconstruction.
template <class T> std::vector<T> to_dense(const AnyMatrix<T> &m);

/// Re-encodes rows [row_begin, row_end) with local row indices.
template <class T>
AnyMatrix<T> slice_rows(const AnyMatrix<T> &m, std::size_t row_begin, std::size_t row_end);

/// Re-encodes the sub-rectangle with local indices. Blocked formats are
/// re-blocked relative to the tile origin.
template <class T>
AnyMatrix<T> slice_tile(const AnyMatrix<T> &m, std::size_t row_begin, std::size_t row_end,
                        std::size_t col_begin, std::size_t col_end);

template <class T> Format format_of(const AnyMatrix<T> &m) {
  return static_cast<Format>(m.index());
}

template <class T> std::size_t rows_of(const AnyMatrix<T> &m) {
  return std::visit([](const auto &x) { return x.n_rows; }, m);
}

template <class T> std::size_t cols_of(const AnyMatrix<T> &m) {
  return std::visit([](const auto &x) { return x.n_cols; }, m);
}

template <class T> std::size_t nnz_of(const AnyMatrix<T> &m) {
  return std::visit([](const auto &x) { return x.nnz(); }, m);
}

/// Number of stored blocks; 0 for CSR/COO.
template <class T> std::size_t blocks_of(const AnyMatrix<T> &m);

/// Debug dump as a dense text grid ('.' for structural zeros).
template <class T> void dump_dense(std::ostream &out, const AnyMatrix<T> &m);

} // namespace sparsep
