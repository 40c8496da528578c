#include "sparsep/part1d.hpp"

#include <algorithm>

namespace sparsep {

template <class T>
WorkItems<T> make_work_items(std::size_t n_rows, std::vector<Entry<T>> entries, Format f,
                             BlockShape shape, bool weight_by_count) {
  WorkItems<T> w;
  if (!is_blocked(f)) {
    const std::size_t n = entries.size();
    w.entries = std::move(entries);
    w.list.n_units = n_rows;
    w.list.unit_row.resize(n);
    w.list.weight.assign(n, 1);
    w.item_nnz.assign(n, 1);
    w.entry_begin.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      w.list.unit_row[i] = w.entries[i].row;
      w.entry_begin[i] = i;
    }
    w.entry_begin[n] = n;
    return w;
  }

  // Stable grouping by (block row, block col) keeps (row, col) order inside a block.
  std::stable_sort(entries.begin(), entries.end(), [&](const Entry<T> &a, const Entry<T> &b) {
    const std::size_t ba = a.row / shape.r, bb = b.row / shape.r;
    if (ba != bb) return ba < bb;
    return a.col / shape.c < b.col / shape.c;
  });
  w.entries = std::move(entries);
  w.list.n_units = ceil_div(n_rows, shape.r);
  for (std::size_t i = 0; i < w.entries.size();) {
    const std::size_t br = w.entries[i].row / shape.r;
    const std::size_t bc = w.entries[i].col / shape.c;
    std::size_t j = i;
    while (j < w.entries.size() && w.entries[j].row / shape.r == br &&
           w.entries[j].col / shape.c == bc) {
      ++j;
    }
    w.entry_begin.push_back(i);
    w.item_nnz.push_back(j - i);
    w.list.unit_row.push_back(br);
    w.list.weight.push_back(weight_by_count ? 1 : j - i);
    i = j;
  }
  w.entry_begin.push_back(w.entries.size());
  return w;
}

template <class T>
std::vector<CoreFragment<T>> partition_rows(std::size_t n_rows, std::size_t col_begin,
                                            std::size_t col_end,
                                            const std::vector<Entry<T>> &entries, Format f,
                                            BlockShape shape, Balance balance, std::size_t parts,
                                            std::vector<SplitRow> *split_rows) {
  const SplitMode mode = split_mode(f, balance);
  const bool by_count = f == Format::bcsr && balance == Balance::blocks;
  const WorkItems<T> w = make_work_items(n_rows, entries, f, shape, by_count);
  const Split s = split_items(w.list, mode, parts);
  const std::size_t unit_rows = is_blocked(f) ? shape.r : 1;
  const std::size_t n_cols = col_end - col_begin;

  std::vector<CoreFragment<T>> out(parts);
  for (std::size_t k = 0; k < parts; ++k) {
    const PartRange &p = s.parts[k];
    CoreFragment<T> &c = out[k];
    c.row_begin = std::min(n_rows, p.unit_begin * unit_rows);
    c.row_end = std::min(n_rows, p.unit_end * unit_rows);
    c.col_begin = col_begin;
    c.col_end = col_end;
    c.blocks = is_blocked(f) ? p.items() : 0;

    std::vector<Entry<T>> local(w.entries.begin() + static_cast<std::ptrdiff_t>(w.entry_begin[p.item_begin]),
                                w.entries.begin() + static_cast<std::ptrdiff_t>(w.entry_begin[p.item_end]));
    for (auto &e : local) e.row -= c.row_begin;
    if (is_blocked(f)) {
      std::sort(local.begin(), local.end(), [](const Entry<T> &a, const Entry<T> &b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
    }
    c.nnz = local.size();
    c.matrix = encode_entries(c.n_rows(), n_cols, local, f, shape);
  }
  if (split_rows) {
    for (const SplitUnit &u : s.split_units) {
      // A split block row shares up to r output rows.
      const std::size_t first = u.unit * unit_rows;
      const std::size_t last = std::min(n_rows, first + unit_rows);
      for (std::size_t r = first; r < last; ++r) split_rows->push_back({r, u.part_a, u.part_b});
    }
  }
  return out;
}

template <class T>
OneDPlan<T> plan_1d(const AnyMatrix<T> &m, const KernelInfo &kernel, std::size_t n_cores) {
  if (kernel.is_2d()) {
    throw SchemeError("kernel " + std::string(kernel.name) + " is not a 1D kernel");
  }
  if (format_of(m) != kernel.format) {
    throw SchemeError("kernel " + std::string(kernel.name) + " expects " +
                      std::string(to_string(kernel.format)) + " input, got " +
                      std::string(to_string(format_of(m))));
  }
  if (n_cores == 0) throw SchemeError("n_cores must be >= 1");

  OneDPlan<T> plan;
  plan.kernel = &kernel;
  plan.n_rows = rows_of(m);
  plan.n_cols = cols_of(m);
  if (const auto *b = std::get_if<BcsrMatrix<T>>(&m)) plan.shape = b->shape;
  if (const auto *b = std::get_if<BcooMatrix<T>>(&m)) plan.shape = b->shape;
  plan.cores = partition_rows(plan.n_rows, 0, plan.n_cols, entries_of(m), kernel.format,
                              plan.shape, kernel.core_balance, n_cores, &plan.split_rows);
  return plan;
}

#define SPARSEP_INSTANTIATE_PART1D(T)                                                        \
  template WorkItems<T> make_work_items<T>(std::size_t, std::vector<Entry<T>>, Format,        \
                                           BlockShape, bool);                                 \
  template std::vector<CoreFragment<T>> partition_rows<T>(                                    \
      std::size_t, std::size_t, std::size_t, const std::vector<Entry<T>> &, Format, BlockShape, \
      Balance, std::size_t, std::vector<SplitRow> *);                                         \
  template OneDPlan<T> plan_1d<T>(const AnyMatrix<T> &, const KernelInfo &, std::size_t);

SPARSEP_FOR_EACH_SCALAR(SPARSEP_INSTANTIATE_PART1D)

} // namespace sparsep
