#pragma once

#include <vector>

#include "sparsep/formats.hpp"
#include "sparsep/scheme.hpp"
#include "sparsep/split.hpp"

namespace sparsep {

/// The piece of the matrix one core works on.
template <class T> struct CoreFragment {
  std::size_t row_begin = 0; ///< output rows [row_begin, row_end)
  std::size_t row_end = 0;
  std::size_t col_begin = 0; ///< input slice [col_begin, col_end)
  std::size_t col_end = 0;
  std::size_t nnz = 0;
  std::size_t blocks = 0;
  AnyMatrix<T> matrix; ///< local indices, (row_end - row_begin) x (col_end - col_begin)

  std::size_t n_rows() const { return row_end - row_begin; }
  std::size_t n_cols() const { return col_end - col_begin; }
};

/// An output row computed partly by two cores.
struct SplitRow {
  std::size_t row = 0;
  std::size_t core_a = 0;
  std::size_t core_b = 0;
  friend bool operator==(const SplitRow &, const SplitRow &) = default;
};

template <class T> struct OneDPlan {
  const KernelInfo *kernel = nullptr;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  BlockShape shape{};
  std::vector<CoreFragment<T>> cores;
  std::vector<SplitRow> split_rows;
};

/// Nonzeros grouped into the work items of a format: single nonzeros for
/// CSR/COO, blocks (relative to the origin) for BCSR/BCOO.
template <class T> struct WorkItems {
  std::vector<Entry<T>> entries;          ///< item order
  std::vector<std::size_t> entry_begin;   ///< per item, plus a final end
  std::vector<std::size_t> item_nnz;
  ItemList list;
};

/// Builds work items from canonically sorted entries. `weight_by_count`
/// weights each item as 1 instead of by its nonzeros.
template <class T>
WorkItems<T> make_work_items(std::size_t n_rows, std::vector<Entry<T>> entries, Format f,
                             BlockShape shape, bool weight_by_count);

/// Row-splits a (sub)matrix over `parts` cores. Entries are canonical and
/// local to the column slice starting at `col_begin`; fragments record
/// global coordinates. Split rows name cores by index within this call.
template <class T>
std::vector<CoreFragment<T>> partition_rows(std::size_t n_rows, std::size_t col_begin,
                                            std::size_t col_end,
                                            const std::vector<Entry<T>> &entries, Format f,
                                            BlockShape shape, Balance balance, std::size_t parts,
                                            std::vector<SplitRow> *split_rows);

/// Horizontal partitioning for a 1D kernel. The matrix format must match
/// the kernel's format.
template <class T>
OneDPlan<T> plan_1d(const AnyMatrix<T> &m, const KernelInfo &kernel, std::size_t n_cores);

} // namespace sparsep
