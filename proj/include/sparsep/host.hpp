#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sparsep/exec.hpp"
#include "sparsep/machine.hpp"
#include "sparsep/matio.hpp"
#include "sparsep/part1d.hpp"
#include "sparsep/scheme.hpp"

namespace sparsep {

struct PhaseTimes {
  double load = 0.0;
  double kernel = 0.0;
  double retrieve = 0.0;
  double merge = 0.0;

  /// Phases do not overlap.
  double total() const { return load + kernel + retrieve + merge; }
};

struct TransferStats {
  std::size_t useful_bytes = 0;
  std::size_t padded_bytes = 0;
  double padding_fraction = 0.0;
};

struct CoreSummary {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;
  std::size_t nnz = 0;
  std::size_t blocks = 0;
};

/// Operations per nonzero: one multiply and one add.
inline constexpr double kOpsPerNonzero = 2.0;

/// Everything a run produces except the output vector.
struct RunSummary {
  SchemeId scheme;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::size_t nnz = 0;
  PhaseTimes phase_seconds;
  TransferStats load;
  TransferStats retrieve;
  /// Retrieve padding fraction at coarse, rank and bank granularity.
  std::array<double, 3> retrieve_padding_by_granularity{};
  std::size_t merge_inputs = 0;    ///< partial elements the host receives
  std::size_t merge_additions = 0; ///< host additions to combine them
  std::size_t lock_acquisitions = 0;
  std::size_t lf_additions = 0;
  ImbalanceMetrics core_balance;

  double end_to_end() const { return phase_seconds.total(); }
  /// GOp/s with kOpsPerNonzero operations per nonzero.
  double gops() const;
};

template <class T> struct ExecutionReport {
  RunSummary summary;
  std::vector<T> y;
  std::vector<CoreSummary> cores;
  std::vector<CoreCounters> core_counters;
  std::vector<SplitRow> split_rows;
};

struct PipelineOptions {
  /// Host threads simulating cores; results do not depend on it.
  std::size_t host_workers = 1;
};

/// Load x, run every core, retrieve partial outputs, merge on the host.
template <class T>
ExecutionReport<T> run_pipeline(const TripletMatrix &m, const SchemeId &scheme,
                                const MachineConfig &cfg, std::span<const T> x,
                                const PipelineOptions &opts = {});

/// One core's contiguous slice of output rows.
template <class T> struct PartialResult {
  std::size_t row_begin = 0;
  std::span<const T> values;
};

/// Sums partials per output element in the given (ascending core) order.
/// The first contribution is taken as is. Throws when a row is uncovered.
template <class T>
std::vector<T> merge_partials(std::size_t n_rows, std::span<const PartialResult<T>> partials,
                              std::size_t *additions = nullptr);

struct SweepResult {
  std::vector<RunSummary> rows;
  std::size_t best = 0;
};

/// Runs every scheme at every core count, and every vertical count that
/// divides it for 2D kernels. The best row minimises end-to-end time; ties
/// go to fewer cores, then fewer vertical partitions.
SweepResult sweep(const TripletMatrix &m, std::span<const SchemeId> schemes,
                  std::span<const std::size_t> core_counts,
                  std::span<const std::size_t> vertical_counts, const MachineConfig &cfg,
                  std::uint64_t x_seed = 1, const PipelineOptions &opts = {});

/// Runs one scheme with the deterministic input vector for `x_seed`.
RunSummary run_summary(const TripletMatrix &m, const SchemeId &scheme, const MachineConfig &cfg,
                       std::uint64_t x_seed = 1, const PipelineOptions &opts = {});

inline constexpr std::string_view kSweepCsvVersion = "# sparsep-sweep v1";

void write_sweep_csv(std::ostream &out, const SweepResult &r);

std::string summary_json(const RunSummary &s, int indent = 2);

template <class T>
std::string report_json(const ExecutionReport<T> &r, bool include_y, bool include_cores,
                        int indent = 2);

} // namespace sparsep
