#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsep/types.hpp"

namespace sparsep {

/// Simulated near-bank PIM system. Throughputs are per core, bandwidths in
/// bytes per second.
struct MachineConfig {
  std::string profile = "pim-A";
  std::size_t n_cores = 2528;
  std::size_t cores_per_rank = 64;
  std::size_t tasklets_per_core = 16;
  std::size_t scratchpad_bytes = 64 * 1024;
  std::size_t dram_bank_bytes = 64u << 20;
  std::size_t dma_min_bytes = 8;
  std::size_t dma_max_bytes = 2048;
  /// Multiply throughput (ops/s) indexed by DType.
  std::array<double, 6> mul_throughput{};
  double bank_bandwidth = 700e6;
  /// Host bus bandwidth contributed by one rank. Calibration parameter.
  double bus_bandwidth_per_rank = 0.0;
  double core_frequency = 350e6;
  /// Host-side additions per second when merging partial results.
  double host_merge_throughput = 0.0;

  double throughput(DType t) const { return mul_throughput[static_cast<std::size_t>(t)]; }
  std::size_t n_ranks() const { return ceil_div(n_cores, cores_per_rank); }
  /// Aggregate host <-> PIM bus bandwidth of the whole system.
  double bus_bandwidth() const { return bus_bandwidth_per_rank * static_cast<double>(n_ranks()); }
  /// n_cores * mul_throughput[t]
  double peak_ops(DType t) const { return static_cast<double>(n_cores) * throughput(t); }
  double aggregate_bank_bandwidth() const {
    return static_cast<double>(n_cores) * bank_bandwidth;
  }

  void validate() const;
};

/// Built-in profiles: "pim-A" (2528 cores, 350 MHz) and "pim-B" (2048 cores,
/// 425 MHz).
MachineConfig default_machine(std::string_view profile);

/// Applies `key = value` overrides. Keys mirror the MachineConfig fields;
/// throughputs use `mul_throughput.<dtype>`. Unknown keys throw.
void apply_override(MachineConfig &cfg, std::string_view key, std::string_view value);

/// Reads a key-value config file. Lines: `key = value`, `#` comments.
/// A `profile` key, when present, selects the base profile before other keys
/// apply. Keys under `generator.` are returned untouched in `extra`.
MachineConfig load_machine_config(const std::string &path, std::string_view base_profile,
                                  std::map<std::string, std::string> *extra = nullptr);

std::map<std::string, std::string> read_key_values(const std::string &path);

enum class Direction { to_banks, to_host };
enum class Granularity { coarse, rank, bank };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view s);

/// One parallel host <-> bank transfer. Every bank in a parallel transfer
/// moves the same number of bytes, so smaller buffers are padded.
struct TransferPlan {
  Direction direction = Direction::to_banks;
  Granularity granularity = Granularity::coarse;
  std::size_t cores_per_rank = 64;
  std::vector<std::size_t> useful_bytes;
  std::vector<std::size_t> padded_bytes;

  std::size_t total_useful() const;
  std::size_t total_padded() const;
  /// (padded - useful) / padded; 0 when nothing moves.
  double padding_fraction() const;
};

TransferPlan plan_transfer(std::span<const std::size_t> sizes, Granularity granularity,
                           const MachineConfig &cfg, Direction direction = Direction::to_banks);

/// Seconds to move the padded bytes over the shared host bus.
double transfer_time(const TransferPlan &plan, const MachineConfig &cfg);

/// What the cost model needs from one core's execution.
struct CoreWork {
  std::size_t mul_ops = 0;
  std::size_t mram_bytes = 0;
};

/// Roofline estimate for one core.
double core_time_estimate(const CoreWork &w, DType t, const MachineConfig &cfg);

/// max over cores of max(mul_ops / throughput, mram_bytes / bank_bandwidth).
double kernel_time_estimate(std::span<const CoreWork> cores, DType t, const MachineConfig &cfg);

double merge_time(std::size_t additions, const MachineConfig &cfg);

} // namespace sparsep
