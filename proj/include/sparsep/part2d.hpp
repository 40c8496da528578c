#pragma once

#include <vector>

#include "sparsep/part1d.hpp"

namespace sparsep {

/// Tile grid over n_cores cores: n_vertical column partitions, each split
/// into n_cores / n_vertical tiles. Core index = partition * tiles_per_partition + tile.
template <class T> struct TwoDPlan {
  const KernelInfo *kernel = nullptr;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::size_t n_vertical = 1;
  BlockShape shape{};
  std::vector<std::size_t> col_bounds; ///< n_vertical + 1 partition boundaries
  std::vector<CoreFragment<T>> cores;
  /// Rows shared by two tiles of one partition (equally-wide/variable-sized
  /// COO and BCOO). Core indices are global.
  std::vector<SplitRow> split_rows;

  std::size_t tiles_per_partition() const { return cores.size() / n_vertical; }
  std::size_t partition_of(std::size_t core) const { return core / tiles_per_partition(); }
};

/// 2D partitioning for a 2D kernel using the kernel's per-partition balance.
template <class T>
TwoDPlan<T> plan_2d(const TripletMatrix &m, const KernelInfo &kernel, std::size_t n_cores,
                    std::size_t n_vertical, BlockShape shape = {});

/// Same with an explicit per-partition balance (ignored for equally-sized tiles).
template <class T>
TwoDPlan<T> plan_2d(const TripletMatrix &m, const KernelInfo &kernel, std::size_t n_cores,
                    std::size_t n_vertical, BlockShape shape, Balance balance);

/// Per-core partial-result lengths (tile heights) returned to the host.
template <class T> std::vector<std::size_t> merge_requirements(const TwoDPlan<T> &plan);

/// Column boundaries for n_vertical partitions balancing column nonzeros.
std::vector<std::size_t> variable_column_bounds(const std::vector<std::size_t> &col_nnz,
                                                std::size_t n_vertical);

} // namespace sparsep
