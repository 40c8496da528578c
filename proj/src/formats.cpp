#include "sparsep/formats.hpp"

#include <algorithm>
#include <ostream>

namespace sparsep {

std::string_view to_string(Format f) {
  switch (f) {
  case Format::csr: return "CSR";
  case Format::coo: return "COO";
  case Format::bcsr: return "BCSR";
  case Format::bcoo: return "BCOO";
  }
  return "?";
}

template <class T> std::size_t BcsrMatrix<T>::nnz() const {
  std::size_t s = 0;
  for (std::size_t k : block_nnz) s += k;
  return s;
}

template <class T> double BcsrMatrix<T>::fill_ratio() const {
  if (n_blocks() == 0) return 0.0;
  return static_cast<double>(nnz()) / static_cast<double>(n_blocks() * block_elems());
}

template <class T> std::size_t BcooMatrix<T>::nnz() const {
  std::size_t s = 0;
  for (std::size_t k : block_nnz) s += k;
  return s;
}

template <class T> double BcooMatrix<T>::fill_ratio() const {
  if (n_blocks() == 0) return 0.0;
  return static_cast<double>(nnz()) / static_cast<double>(n_blocks() * block_elems());
}

template <class T> std::vector<Entry<T>> typed_entries(const TripletMatrix &m) {
  std::vector<Entry<T>> e;
  e.reserve(m.nnz());
  for (const Triplet &t : m.entries) e.push_back({t.row, t.col, scalar::from_double<T>(t.value)});
  return e;
}

template <class T>
CsrMatrix<T> csr_from_entries(std::size_t n_rows, std::size_t n_cols,
                              const std::vector<Entry<T>> &e) {
  CsrMatrix<T> m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.rowptr.assign(n_rows + 1, 0);
  m.colind.reserve(e.size());
  m.values.reserve(e.size());
  for (const Entry<T> &x : e) {
    ++m.rowptr[x.row + 1];
    m.colind.push_back(x.col);
    m.values.push_back(x.value);
  }
  for (std::size_t i = 0; i < n_rows; ++i) m.rowptr[i + 1] += m.rowptr[i];
  return m;
}

template <class T>
CooMatrix<T> coo_from_entries(std::size_t n_rows, std::size_t n_cols,
                              const std::vector<Entry<T>> &e) {
  CooMatrix<T> m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.tuples.reserve(e.size());
  for (const Entry<T> &x : e) m.tuples.push_back({x.row, x.col, x.value});
  return m;
}

template <class T>
BcsrMatrix<T> bcsr_from_entries(std::size_t n_rows, std::size_t n_cols, BlockShape shape,
                                const std::vector<Entry<T>> &e) {
  if (shape.r < 1 || shape.c < 1) throw SchemeError("block dimensions must be >= 1");
  BcsrMatrix<T> m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.shape = shape;
  const std::size_t nbr = m.n_block_rows();
  const std::size_t elems = m.block_elems();
  m.browptr.assign(nbr + 1, 0);

  struct Cell {
    std::size_t bcol, off;
    T value;
  };
  std::vector<Cell> cells;
  std::size_t k = 0;
  for (std::size_t br = 0; br < nbr; ++br) {
    cells.clear();
    const std::size_t row_end = std::min(n_rows, (br + 1) * shape.r);
    for (; k < e.size() && e[k].row < row_end; ++k) {
      const Entry<T> &x = e[k];
      cells.push_back({x.col / shape.c, (x.row % shape.r) * shape.c + x.col % shape.c, x.value});
    }
    std::stable_sort(cells.begin(), cells.end(),
                     [](const Cell &a, const Cell &b) { return a.bcol < b.bcol; });
    for (std::size_t i = 0; i < cells.size();) {
      const std::size_t bc = cells[i].bcol;
      const std::size_t base = m.bvalues.size();
      m.bcolind.push_back(bc);
      m.bvalues.resize(base + elems, T{});
      m.bmask.resize(base + elems, 0);
      std::size_t count = 0;
      for (; i < cells.size() && cells[i].bcol == bc; ++i) {
        m.bvalues[base + cells[i].off] = cells[i].value;
        m.bmask[base + cells[i].off] = 1;
        ++count;
      }
      m.block_nnz.push_back(count);
    }
    m.browptr[br + 1] = m.bcolind.size();
  }
  return m;
}

template <class T> BcooMatrix<T> bcoo_from_bcsr(const BcsrMatrix<T> &b) {
  BcooMatrix<T> m;
  m.n_rows = b.n_rows;
  m.n_cols = b.n_cols;
  m.shape = b.shape;
  m.bcolind = b.bcolind;
  m.bvalues = b.bvalues;
  m.bmask = b.bmask;
  m.block_nnz = b.block_nnz;
  m.browind.reserve(b.n_blocks());
  for (std::size_t br = 0; br < b.n_block_rows(); ++br) {
    for (std::size_t k = b.browptr[br]; k < b.browptr[br + 1]; ++k) m.browind.push_back(br);
  }
  return m;
}

template <class T>
AnyMatrix<T> encode_entries(std::size_t n_rows, std::size_t n_cols,
                            const std::vector<Entry<T>> &e, Format f, BlockShape shape) {
  switch (f) {
  case Format::csr: return csr_from_entries(n_rows, n_cols, e);
  case Format::coo: return coo_from_entries(n_rows, n_cols, e);
  case Format::bcsr: return bcsr_from_entries(n_rows, n_cols, shape, e);
  case Format::bcoo: break;
  }
  return bcoo_from_bcsr(bcsr_from_entries(n_rows, n_cols, shape, e));
}

template <class T> CsrMatrix<T> to_csr(const TripletMatrix &m) {
  return csr_from_entries(m.n_rows, m.n_cols, typed_entries<T>(m));
}

template <class T> CooMatrix<T> to_coo(const TripletMatrix &m) {
  return coo_from_entries(m.n_rows, m.n_cols, typed_entries<T>(m));
}

template <class T> BcsrMatrix<T> to_bcsr(const TripletMatrix &m, BlockShape shape) {
  return bcsr_from_entries(m.n_rows, m.n_cols, shape, typed_entries<T>(m));
}

template <class T> BcooMatrix<T> to_bcoo(const TripletMatrix &m, BlockShape shape) {
  return bcoo_from_bcsr(to_bcsr<T>(m, shape));
}

template <class T> AnyMatrix<T> encode(const TripletMatrix &m, Format f, BlockShape shape) {
  return encode_entries(m.n_rows, m.n_cols, typed_entries<T>(m), f, shape);
}

namespace {

template <class T, class M>
void append_block_entries(const M &m, std::size_t k, std::size_t br, std::vector<Entry<T>> &out) {
  const std::size_t r = m.shape.r, c = m.shape.c;
  const std::size_t base = k * r * c;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (m.bmask[base + i * c + j]) {
        out.push_back({br * r + i, m.bcolind[k] * c + j, m.bvalues[base + i * c + j]});
      }
    }
  }
}

template <class T> void sort_entries(std::vector<Entry<T>> &e) {
  std::sort(e.begin(), e.end(), [](const Entry<T> &a, const Entry<T> &b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
}

} // namespace

template <class T> std::vector<Entry<T>> entries_of(const AnyMatrix<T> &any) {
  std::vector<Entry<T>> out;
  out.reserve(nnz_of(any));
  switch (format_of(any)) {
  case Format::csr: {
    const auto &m = std::get<CsrMatrix<T>>(any);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
      for (std::size_t k = m.rowptr[i]; k < m.rowptr[i + 1]; ++k) {
        out.push_back({i, m.colind[k], m.values[k]});
      }
    }
    return out;
  }
  case Format::coo: {
    for (const auto &t : std::get<CooMatrix<T>>(any).tuples) out.push_back({t.row, t.col, t.value});
    return out;
  }
  case Format::bcsr: {
    const auto &m = std::get<BcsrMatrix<T>>(any);
    for (std::size_t br = 0; br < m.n_block_rows(); ++br) {
      for (std::size_t k = m.browptr[br]; k < m.browptr[br + 1]; ++k) {
        append_block_entries<T>(m, k, br, out);
      }
    }
    break;
  }
  case Format::bcoo: {
    const auto &m = std::get<BcooMatrix<T>>(any);
    for (std::size_t k = 0; k < m.n_blocks(); ++k) append_block_entries<T>(m, k, m.browind[k], out);
    break;
  }
  }
  sort_entries(out);
  return out;
}

template <class T> std::vector<T> to_dense(const AnyMatrix<T> &any) {
  const std::size_t nr = rows_of(any), nc = cols_of(any);
  std::vector<T> d(nr * nc, T{});
  auto put_block = [&](const auto &m, std::size_t k, std::size_t br) {
    const std::size_t r = m.shape.r, c = m.shape.c;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t row = br * r + i, col = m.bcolind[k] * c + j;
        const T v = m.bvalues[k * r * c + i * c + j];
        if (row < nr && col < nc) {
          d[row * nc + col] = v;
        } else if (v != T{}) {
          throw Error("nonzero stored in block padding");
        }
      }
    }
  };
  switch (format_of(any)) {
  case Format::csr:
  case Format::coo:
    for (const Entry<T> &e : entries_of(any)) d[e.row * nc + e.col] = e.value;
    break;
  case Format::bcsr: {
    const auto &m = std::get<BcsrMatrix<T>>(any);
    for (std::size_t br = 0; br < m.n_block_rows(); ++br) {
      for (std::size_t k = m.browptr[br]; k < m.browptr[br + 1]; ++k) put_block(m, k, br);
    }
    break;
  }
  case Format::bcoo: {
    const auto &m = std::get<BcooMatrix<T>>(any);
    for (std::size_t k = 0; k < m.n_blocks(); ++k) put_block(m, k, m.browind[k]);
    break;
  }
  }
  return d;
}

template <class T>
AnyMatrix<T> slice_tile(const AnyMatrix<T> &any, std::size_t row_begin, std::size_t row_end,
                        std::size_t col_begin, std::size_t col_end) {
  if (row_begin > row_end || col_begin > col_end) throw SchemeError("inverted slice range");
  if (row_end > rows_of(any) || col_end > cols_of(any)) {
    throw SchemeError("slice range outside matrix bounds");
  }
  const std::size_t nr = row_end - row_begin, nc = col_end - col_begin;
  const bool full_width = col_begin == 0 && col_end == cols_of(any);

  if (format_of(any) == Format::csr) {
    const auto &m = std::get<CsrMatrix<T>>(any);
    CsrMatrix<T> out;
    out.n_rows = nr;
    out.n_cols = nc;
    out.rowptr.assign(nr + 1, 0);
    for (std::size_t i = row_begin; i < row_end; ++i) {
      auto first = m.colind.begin() + static_cast<std::ptrdiff_t>(m.rowptr[i]);
      auto last = m.colind.begin() + static_cast<std::ptrdiff_t>(m.rowptr[i + 1]);
      auto lo = full_width ? first : std::lower_bound(first, last, col_begin);
      auto hi = full_width ? last : std::lower_bound(lo, last, col_end);
      for (auto it = lo; it != hi; ++it) {
        out.colind.push_back(*it - col_begin);
        out.values.push_back(m.values[static_cast<std::size_t>(it - m.colind.begin())]);
      }
      out.rowptr[i - row_begin + 1] = out.colind.size();
    }
    return out;
  }
  if (format_of(any) == Format::coo) {
    const auto &m = std::get<CooMatrix<T>>(any);
    CooMatrix<T> out;
    out.n_rows = nr;
    out.n_cols = nc;
    auto lo = std::lower_bound(m.tuples.begin(), m.tuples.end(), row_begin,
                               [](const CooTuple<T> &t, std::size_t r) { return t.row < r; });
    for (auto it = lo; it != m.tuples.end() && it->row < row_end; ++it) {
      if (it->col >= col_begin && it->col < col_end) {
        out.tuples.push_back({it->row - row_begin, it->col - col_begin, it->value});
      }
    }
    return out;
  }
  std::vector<Entry<T>> sub;
  for (const Entry<T> &e : entries_of(any)) {
    if (e.row >= row_begin && e.row < row_end && e.col >= col_begin && e.col < col_end) {
      sub.push_back({e.row - row_begin, e.col - col_begin, e.value});
    }
  }
  const BlockShape shape = std::visit(
      [](const auto &m) -> BlockShape {
        if constexpr (requires { m.shape; }) return m.shape;
        else return {};
      },
      any);
  return encode_entries(nr, nc, sub, format_of(any), shape);
}

template <class T>
AnyMatrix<T> slice_rows(const AnyMatrix<T> &m, std::size_t row_begin, std::size_t row_end) {
  return slice_tile(m, row_begin, row_end, 0, cols_of(m));
}

template <class T> std::size_t blocks_of(const AnyMatrix<T> &m) {
  return std::visit(
      [](const auto &x) -> std::size_t {
        if constexpr (requires { x.n_blocks(); }) return x.n_blocks();
        else return 0;
      },
      m);
}

template <class T> void dump_dense(std::ostream &out, const AnyMatrix<T> &m) {
  const std::size_t nr = rows_of(m), nc = cols_of(m);
  std::vector<std::uint8_t> present(nr * nc, 0);
  for (const Entry<T> &e : entries_of(m)) present[e.row * nc + e.col] = 1;
  const std::vector<T> d = to_dense(m);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (j) out << ' ';
      if (present[i * nc + j]) {
        if constexpr (sizeof(T) == 1) out << static_cast<int>(d[i * nc + j]);
        else out << d[i * nc + j];
      } else {
        out << '.';
      }
    }
    out << '\n';
  }
}

#define SPARSEP_INSTANTIATE_FORMATS(T)                                                     \
  template struct BcsrMatrix<T>;                                                           \
  template struct BcooMatrix<T>;                                                           \
  template std::vector<Entry<T>> typed_entries<T>(const TripletMatrix &);                   \
  template CsrMatrix<T> to_csr<T>(const TripletMatrix &);                                  \
  template CooMatrix<T> to_coo<T>(const TripletMatrix &);                                  \
  template BcsrMatrix<T> to_bcsr<T>(const TripletMatrix &, BlockShape);                    \
  template BcooMatrix<T> to_bcoo<T>(const TripletMatrix &, BlockShape);                    \
  template AnyMatrix<T> encode<T>(const TripletMatrix &, Format, BlockShape);              \
  template CsrMatrix<T> csr_from_entries<T>(std::size_t, std::size_t,                       \
                                            const std::vector<Entry<T>> &);                 \
  template CooMatrix<T> coo_from_entries<T>(std::size_t, std::size_t,                       \
                                            const std::vector<Entry<T>> &);                 \
  template BcsrMatrix<T> bcsr_from_entries<T>(std::size_t, std::size_t, BlockShape,         \
                                              const std::vector<Entry<T>> &);               \
  template BcooMatrix<T> bcoo_from_bcsr<T>(const BcsrMatrix<T> &);                          \
  template AnyMatrix<T> encode_entries<T>(std::size_t, std::size_t,                         \
                                          const std::vector<Entry<T>> &, Format, BlockShape); \
  template std::vector<Entry<T>> entries_of<T>(const AnyMatrix<T> &);                       \
  template std::vector<T> to_dense<T>(const AnyMatrix<T> &);                                \
  template AnyMatrix<T> slice_rows<T>(const AnyMatrix<T> &, std::size_t, std::size_t);      \
  template AnyMatrix<T> slice_tile<T>(const AnyMatrix<T> &, std::size_t, std::size_t,       \
                                      std::size_t, std::size_t);                            \
  template std::size_t blocks_of<T>(const AnyMatrix<T> &);                                  \
  template void dump_dense<T>(std::ostream &, const AnyMatrix<T> &);

SPARSEP_INSTANTIATE_FORMATS(std::int8_t)
SPARSEP_INSTANTIATE_FORMATS(std::int16_t)
SPARSEP_INSTANTIATE_FORMATS(std::int32_t)
SPARSEP_INSTANTIATE_FORMATS(std::int64_t)
SPARSEP_INSTANTIATE_FORMATS(float)
SPARSEP_INSTANTIATE_FORMATS(double)

} // namespace sparsep
