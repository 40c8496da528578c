#include "sparsep/part2d.hpp"

#include <algorithm>

namespace sparsep {

namespace {

std::vector<std::size_t> even_bounds(std::size_t n, std::size_t parts) {
  std::vector<std::size_t> b(parts + 1);
  for (std::size_t k = 0; k <= parts; ++k) b[k] = even_start(n, parts, k);
  return b;
}

std::size_t locate(const std::vector<std::size_t> &bounds, std::size_t v) {
  // Last k with bounds[k] <= v among nonempty ranges.
  auto it = std::upper_bound(bounds.begin(), bounds.end(), v);
  return static_cast<std::size_t>(it - bounds.begin()) - 1;
}

} // namespace

std::vector<std::size_t> variable_column_bounds(const std::vector<std::size_t> &col_nnz,
                                                std::size_t n_vertical) {
  std::vector<std::size_t> prefix(col_nnz.size() + 1, 0);
  for (std::size_t j = 0; j < col_nnz.size(); ++j) prefix[j + 1] = prefix[j] + col_nnz[j];
  return nearest_boundaries(prefix, n_vertical);
}

template <class T>
TwoDPlan<T> plan_2d(const TripletMatrix &m, const KernelInfo &kernel, std::size_t n_cores,
                    std::size_t n_vertical, BlockShape shape, Balance balance) {
  if (!kernel.is_2d()) {
    throw SchemeError("kernel " + std::string(kernel.name) + " is not a 2D kernel");
  }
  if (n_vertical == 0 || n_vertical > n_cores || n_cores % n_vertical != 0) {
    throw SchemeError("n_vertical must divide n_cores (got " + std::to_string(n_vertical) +
                      " for " + std::to_string(n_cores) + " cores)");
  }
  TwoDPlan<T> plan;
  plan.kernel = &kernel;
  plan.n_rows = m.n_rows;
  plan.n_cols = m.n_cols;
  plan.n_vertical = n_vertical;
  plan.shape = shape;
  const std::size_t tiles = n_cores / n_vertical;
  const std::vector<Entry<T>> entries = typed_entries<T>(m);

  if (kernel.partitioning == Partitioning::variable_sized) {
    plan.col_bounds = variable_column_bounds(col_counts(m), n_vertical);
  } else {
    plan.col_bounds = even_bounds(m.n_cols, n_vertical);
  }

  if (kernel.partitioning == Partitioning::equally_sized) {
    const std::vector<std::size_t> row_bounds = even_bounds(m.n_rows, tiles);
    std::vector<std::vector<Entry<T>>> buckets(n_cores);
    for (const Entry<T> &e : entries) {
      const std::size_t v = locate(plan.col_bounds, e.col);
      const std::size_t i = locate(row_bounds, e.row);
      buckets[v * tiles + i].push_back({e.row - row_bounds[i], e.col - plan.col_bounds[v], e.value});
    }
    plan.cores.resize(n_cores);
    for (std::size_t v = 0; v < n_vertical; ++v) {
      for (std::size_t i = 0; i < tiles; ++i) {
        CoreFragment<T> &c = plan.cores[v * tiles + i];
        c.row_begin = row_bounds[i];
        c.row_end = row_bounds[i + 1];
        c.col_begin = plan.col_bounds[v];
        c.col_end = plan.col_bounds[v + 1];
        const auto &local = buckets[v * tiles + i];
        c.nnz = local.size();
        c.matrix = encode_entries(c.n_rows(), c.n_cols(), local, kernel.format, shape);
        c.blocks = blocks_of(c.matrix);
      }
    }
    return plan;
  }

  // Equally-wide and variable-sized: row-split each vertical partition.
  std::vector<std::vector<Entry<T>>> partitions(n_vertical);
  for (const Entry<T> &e : entries) {
    const std::size_t v = locate(plan.col_bounds, e.col);
    partitions[v].push_back({e.row, e.col - plan.col_bounds[v], e.value});
  }
  plan.cores.reserve(n_cores);
  for (std::size_t v = 0; v < n_vertical; ++v) {
    std::vector<SplitRow> splits;
    auto part = partition_rows(m.n_rows, plan.col_bounds[v], plan.col_bounds[v + 1], partitions[v],
                               kernel.format, shape, balance, tiles, &splits);
    for (auto &c : part) plan.cores.push_back(std::move(c));
    for (SplitRow s : splits) {
      plan.split_rows.push_back({s.row, v * tiles + s.core_a, v * tiles + s.core_b});
    }
  }
  return plan;
}

template <class T>
TwoDPlan<T> plan_2d(const TripletMatrix &m, const KernelInfo &kernel, std::size_t n_cores,
                    std::size_t n_vertical, BlockShape shape) {
  return plan_2d<T>(m, kernel, n_cores, n_vertical, shape, kernel.core_balance);
}

template <class T> std::vector<std::size_t> merge_requirements(const TwoDPlan<T> &plan) {
  std::vector<std::size_t> out(plan.cores.size());
  for (std::size_t k = 0; k < plan.cores.size(); ++k) out[k] = plan.cores[k].n_rows();
  return out;
}

#define SPARSEP_INSTANTIATE_PART2D(T)                                                        \
  template TwoDPlan<T> plan_2d<T>(const TripletMatrix &, const KernelInfo &, std::size_t,     \
                                  std::size_t, BlockShape);                                   \
  template TwoDPlan<T> plan_2d<T>(const TripletMatrix &, const KernelInfo &, std::size_t,     \
                                  std::size_t, BlockShape, Balance);                          \
  template std::vector<std::size_t> merge_requirements<T>(const TwoDPlan<T> &);

SPARSEP_FOR_EACH_SCALAR(SPARSEP_INSTANTIATE_PART2D)

} // namespace sparsep
