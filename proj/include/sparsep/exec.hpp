#pragma once

#include <span>
#include <vector>

#include "sparsep/formats.hpp"
#include "sparsep/machine.hpp"
#include "sparsep/scheme.hpp"
#include "sparsep/split.hpp"

namespace sparsep {

/// Work of one tasklet. Units are rows (CSR/COO) or block rows (BCSR/BCOO);
/// items are nonzeros or blocks.
struct TaskletWork {
  std::size_t unit_begin = 0;
  std::size_t unit_end = 0;
  std::size_t item_begin = 0;
  std::size_t item_end = 0;
};

struct ThreadSchedule {
  Balance balance = Balance::rows;
  /// Rows per aligned chunk: 8 / scalar width (row-balanced CSR/COO only).
  std::size_t alignment_chunk = 1;
  /// True when a unit may be shared by two tasklets.
  bool splits_units = false;
  std::vector<TaskletWork> per_tasklet;
};

/// Divides a fragment among `n_tasklets` tasklets. Row balances hand out rows
/// in aligned chunks; BCSR is balanced at block-row granularity.
template <class T>
ThreadSchedule schedule_threads(const AnyMatrix<T> &fragment, Balance balance,
                                std::size_t n_tasklets);

struct SyncConfig {
  SyncMode mode = SyncMode::none;
  std::size_t n_mutexes = 32; ///< lb-fg only; a power of two
};

/// Mutex guarding the 8-byte word at `byte_offset` in the output array.
inline std::size_t fine_mutex(std::size_t byte_offset, std::size_t n_mutexes) {
  return (byte_offset >> 3) & (n_mutexes - 1);
}

struct TaskletCounters {
  std::size_t nnz_processed = 0;
  std::size_t rows_processed = 0;
  std::size_t segments = 0; ///< output write runs
  std::size_t lock_acquisitions = 0;
  std::size_t mul_ops = 0;
  std::size_t mram_read_bytes = 0;
  std::size_t mram_write_bytes = 0;
  std::size_t scratchpad_peak_bytes = 0;
};

struct CoreCounters {
  std::vector<TaskletCounters> tasklets;
  /// Acquisitions per mutex: one entry for lb-cg, n_mutexes for lb-fg.
  std::vector<std::size_t> mutex_acquisitions;
  std::size_t lf_buffered = 0;  ///< partial results parked in scratchpad
  std::size_t lf_additions = 0; ///< additions done by the merging tasklet

  std::size_t nnz() const;
  std::size_t rows() const;
  std::size_t lock_acquisitions() const;
  std::size_t mul_ops() const;
  std::size_t mram_read_bytes() const;
  std::size_t mram_write_bytes() const;
  std::size_t mram_bytes() const { return mram_read_bytes() + mram_write_bytes(); }
  /// Tasklets run concurrently, so their scratchpad use adds up.
  std::size_t scratchpad_peak_bytes() const;
  CoreWork work() const { return {mul_ops(), mram_bytes()}; }
};

template <class T> struct CoreResult {
  std::vector<T> y; ///< one entry per fragment row
  CoreCounters counters;
};

/// Runs one core's SpMV: y = fragment * x. Tasklets execute in index order;
/// guarded writes land in that order, so results are reproducible.
template <class T>
CoreResult<T> run_core(const AnyMatrix<T> &fragment, std::span<const T> x,
                       const ThreadSchedule &schedule, SyncConfig sync);

/// True when BCSR block-row writes of this shape can share an 8-byte word.
inline bool bcsr_needs_locks(BlockShape shape, std::size_t scalar_width) {
  return (shape.r * scalar_width) % 8 != 0;
}

struct ImbalanceRatio {
  double max_over_mean = 1.0;
  /// Max divided by the mean of all other entries.
  double max_over_rest = 1.0;
};

ImbalanceRatio imbalance_ratio(std::span<const std::size_t> values);

struct ImbalanceMetrics {
  ImbalanceRatio nnz;
  ImbalanceRatio rows;
  ImbalanceRatio locks;
};

/// Per-tasklet imbalance of one core.
ImbalanceMetrics estimate_imbalance(const CoreCounters &counters);

/// Per-core imbalance across a run.
ImbalanceMetrics estimate_imbalance(std::span<const CoreCounters> cores);

} // namespace sparsep
