#include "sparsep/machine.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>

namespace sparsep {

namespace {

// Calibration parameters, not measured values. Bus bandwidth makes 1D runs at
// 2048 cores load-dominated; merge throughput is one host thread streaming
// about 3 GB/s (two reads and one write per addition).
constexpr double kBusBandwidthPerRank = 0.5e9;
constexpr double kHostMergeThroughput = 2.5e8;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("invalid number '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

std::size_t to_count(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("invalid count '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

} // namespace

void MachineConfig::validate() const {
  if (n_cores == 0) throw ConfigError("n_cores must be >= 1");
  if (cores_per_rank == 0) throw ConfigError("cores_per_rank must be >= 1");
  if (tasklets_per_core < 1 || tasklets_per_core > 24) {
    throw ConfigError("tasklets_per_core must be in [1, 24]");
  }
  if (dma_min_bytes == 0 || dma_min_bytes % 8 != 0 || dma_max_bytes % 8 != 0 ||
      dma_max_bytes < dma_min_bytes) {
    throw ConfigError("DMA sizes must be multiples of 8 with min <= max");
  }
  for (double t : mul_throughput) {
    if (!(t > 0.0)) throw ConfigError("mul_throughput entries must be positive");
  }
  if (!(bank_bandwidth > 0.0) || !(bus_bandwidth_per_rank > 0.0) ||
      !(host_merge_throughput > 0.0) || !(core_frequency > 0.0)) {
    throw ConfigError("bandwidths, frequency and merge throughput must be positive");
  }
}

MachineConfig default_machine(std::string_view profile) {
  MachineConfig c;
  c.bus_bandwidth_per_rank = kBusBandwidthPerRank;
  c.host_merge_throughput = kHostMergeThroughput;
  if (profile == "pim-A") {
    c.profile = "pim-A";
    c.n_cores = 2528;
    c.core_frequency = 350e6;
    c.bank_bandwidth = 700e6;
    c.mul_throughput = {12.941e6, 10.524e6, 8.861e6, 2.381e6, 1.847e6, 0.517e6};
  } else if (profile == "pim-B") {
    c.profile = "pim-B";
    c.n_cores = 2048;
    c.core_frequency = 425e6;
    c.bank_bandwidth = 850e6;
    c.mul_throughput = {15.656e6, 12.721e6, 10.732e6, 2.888e6, 2.259e6, 0.631e6};
  } else {
    throw ConfigError("unknown machine profile '" + std::string(profile) + "'");
  }
  return c;
}

void apply_override(MachineConfig &c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "n_cores") c.n_cores = to_count(key, value);
  else if (key == "cores_per_rank") c.cores_per_rank = to_count(key, value);
  else if (key == "tasklets_per_core") c.tasklets_per_core = to_count(key, value);
  else if (key == "scratchpad_bytes") c.scratchpad_bytes = to_count(key, value);
  else if (key == "dram_bank_bytes") c.dram_bank_bytes = to_count(key, value);
  else if (key == "dma_min_bytes") c.dma_min_bytes = to_count(key, value);
  else if (key == "dma_max_bytes") c.dma_max_bytes = to_count(key, value);
  else if (key == "bank_bandwidth") c.bank_bandwidth = to_double(key, value);
  else if (key == "bus_bandwidth_per_rank") c.bus_bandwidth_per_rank = to_double(key, value);
  else if (key == "core_frequency") c.core_frequency = to_double(key, value);
  else if (key == "host_merge_throughput") c.host_merge_throughput = to_double(key, value);
  else if (key.starts_with("mul_throughput.")) {
    DType t = parse_dtype(key.substr(std::string_view("mul_throughput.").size()));
    c.mul_throughput[static_cast<std::size_t>(t)] = to_double(key, value);
  } else {
    throw ConfigError("unknown machine key '" + std::string(key) + "'");
  }
}

std::map<std::string, std::string> read_key_values(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    kv[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
  }
  return kv;
}

MachineConfig load_machine_config(const std::string &path, std::string_view base_profile,
                                  std::map<std::string, std::string> *extra) {
  auto kv = read_key_values(path);
  std::string profile(base_profile);
  if (auto it = kv.find("profile"); it != kv.end()) profile = it->second;
  MachineConfig c = default_machine(profile);
  for (const auto &[k, v] : kv) {
    if (k == "profile") continue;
    if (k.starts_with("generator.")) {
      if (extra) (*extra)[k] = v;
      continue;
    }
    apply_override(c, k, v);
  }
  c.validate();
  return c;
}

std::string_view to_string(Granularity g) {
  switch (g) {
  case Granularity::coarse: return "coarse";
  case Granularity::rank: return "rank";
  case Granularity::bank: return "bank";
  }
  return "?";
}

Granularity parse_granularity(std::string_view s) {
  for (Granularity g : {Granularity::coarse, Granularity::rank, Granularity::bank}) {
    if (s == to_string(g)) return g;
  }
  throw SchemeError("unknown transfer granularity '" + std::string(s) + "'");
}

std::size_t TransferPlan::total_useful() const {
  return std::accumulate(useful_bytes.begin(), useful_bytes.end(), std::size_t{0});
}

std::size_t TransferPlan::total_padded() const {
  return std::accumulate(padded_bytes.begin(), padded_bytes.end(), std::size_t{0});
}

double TransferPlan::padding_fraction() const {
  const std::size_t p = total_padded();
  if (p == 0) return 0.0;
  return static_cast<double>(p - total_useful()) / static_cast<double>(p);
}

TransferPlan plan_transfer(std::span<const std::size_t> sizes, Granularity granularity,
                           const MachineConfig &cfg, Direction direction) {
  TransferPlan plan;
  plan.direction = direction;
  plan.granularity = granularity;
  plan.cores_per_rank = cfg.cores_per_rank;
  plan.useful_bytes.assign(sizes.begin(), sizes.end());
  plan.padded_bytes.resize(sizes.size());
  for (std::size_t s : sizes) {
    if (s > cfg.dram_bank_bytes) {
      throw SchemeError("transfer of " + std::to_string(s) + " bytes exceeds the " +
                        std::to_string(cfg.dram_bank_bytes) + "-byte DRAM bank");
    }
  }
  switch (granularity) {
  case Granularity::coarse: {
    std::size_t m = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
    std::fill(plan.padded_bytes.begin(), plan.padded_bytes.end(), round_up(m, 8));
    break;
  }
  case Granularity::rank: {
    for (std::size_t first = 0; first < sizes.size(); first += cfg.cores_per_rank) {
      const std::size_t last = std::min(sizes.size(), first + cfg.cores_per_rank);
      const std::size_t m = round_up(*std::max_element(sizes.begin() + first, sizes.begin() + last), 8);
      std::fill(plan.padded_bytes.begin() + first, plan.padded_bytes.begin() + last, m);
    }
    break;
  }
  case Granularity::bank:
    for (std::size_t k = 0; k < sizes.size(); ++k) plan.padded_bytes[k] = round_up(sizes[k], 8);
    break;
  }
  return plan;
}

double transfer_time(const TransferPlan &plan, const MachineConfig &cfg) {
  const std::size_t bytes = plan.total_padded();
  if (bytes == 0) return 0.0;
  return static_cast<double>(bytes) / cfg.bus_bandwidth();
}

double core_time_estimate(const CoreWork &w, DType t, const MachineConfig &cfg) {
  const double compute = static_cast<double>(w.mul_ops) / cfg.throughput(t);
  const double memory = static_cast<double>(w.mram_bytes) / cfg.bank_bandwidth;
  return std::max(compute, memory);
}

double kernel_time_estimate(std::span<const CoreWork> cores, DType t, const MachineConfig &cfg) {
  double worst = 0.0;
  for (const CoreWork &w : cores) worst = std::max(worst, core_time_estimate(w, t, cfg));
  return worst;
}

double merge_time(std::size_t additions, const MachineConfig &cfg) {
  return static_cast<double>(additions) / cfg.host_merge_throughput;
}

} // namespace sparsep
