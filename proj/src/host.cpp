#include "sparsep/host.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "sparsep/part2d.hpp"
#include "sparsep/reference.hpp"

namespace sparsep {

namespace {

template <class T> struct Partitioned {
  std::vector<CoreFragment<T>> cores;
  std::vector<SplitRow> split_rows;
};

template <class T>
Partitioned<T> partition(const TripletMatrix &m, const SchemeId &s, const KernelInfo &k) {
  Partitioned<T> p;
  if (k.is_2d()) {
    auto plan = plan_2d<T>(m, k, s.n_cores, s.n_vertical, s.block);
    p.cores = std::move(plan.cores);
    p.split_rows = std::move(plan.split_rows);
  } else {
    auto plan = plan_1d<T>(encode<T>(m, k.format, s.block), k, s.n_cores);
    p.cores = std::move(plan.cores);
    p.split_rows = std::move(plan.split_rows);
  }
  return p;
}

TransferStats stats_of(const TransferPlan &p) {
  return {p.total_useful(), p.total_padded(), p.padding_fraction()};
}

template <class F> void fan_out(std::size_t n, std::size_t workers, F &&f) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) f(i);
    });
  }
}

} // namespace

double RunSummary::gops() const {
  const double t = end_to_end();
  if (t <= 0.0) return 0.0;
  return kOpsPerNonzero * static_cast<double>(nnz) / t / 1e9;
}

template <class T>
std::vector<T> merge_partials(std::size_t n_rows, std::span<const PartialResult<T>> partials,
                              std::size_t *additions) {
  std::vector<T> y(n_rows, T{});
  std::vector<bool> covered(n_rows, false);
  std::size_t adds = 0;
  for (const PartialResult<T> &p : partials) {
    if (p.row_begin + p.values.size() > n_rows) {
      throw SchemeError("partial result extends past the output vector");
    }
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      const std::size_t r = p.row_begin + i;
      if (covered[r]) {
        y[r] = scalar::add(y[r], p.values[i]);
        ++adds;
      } else {
        y[r] = p.values[i];
        covered[r] = true;
      }
    }
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!covered[r]) throw SchemeError("output row " + std::to_string(r) + " has no partial result");
  }
  if (additions) *additions = adds;
  return y;
}

template <class T>
ExecutionReport<T> run_pipeline(const TripletMatrix &input, const SchemeId &scheme,
                                const MachineConfig &cfg, std::span<const T> x,
                                const PipelineOptions &opts) {
  validate_scheme(scheme);
  cfg.validate();
  if (scheme.dtype != dtype_v<T>) {
    throw SchemeError("scheme dtype " + std::string(to_string(scheme.dtype)) +
                      " does not match the element type " + std::string(to_string(dtype_v<T>)));
  }
  if (scheme.n_cores > cfg.n_cores) {
    throw SchemeError("scheme uses " + std::to_string(scheme.n_cores) + " cores, machine has " +
                      std::to_string(cfg.n_cores));
  }
  if (x.size() != input.n_cols) {
    throw SchemeError("input vector has " + std::to_string(x.size()) + " elements, matrix has " +
                      std::to_string(input.n_cols) + " columns");
  }
  const TripletMatrix *mp = &input;
  TripletMatrix sorted;
  if (!input.is_canonical()) {
    sorted = input;
    sorted.canonicalize();
    mp = &sorted;
  }
  const TripletMatrix &m = *mp;
  const KernelInfo &k = scheme.info();
  constexpr std::size_t wd = sizeof(T);

  Partitioned<T> parts = partition<T>(m, scheme, k);
  const std::size_t P = parts.cores.size();

  ExecutionReport<T> r;
  RunSummary &s = r.summary;
  s.scheme = scheme;
  s.n_rows = m.n_rows;
  s.n_cols = m.n_cols;
  s.nnz = m.nnz();

  // Load: 1D cores receive all of x, 2D cores their column slice.
  std::vector<std::size_t> load_sizes(P), retrieve_sizes(P);
  for (std::size_t c = 0; c < P; ++c) {
    load_sizes[c] = parts.cores[c].n_cols() * wd;
    retrieve_sizes[c] = parts.cores[c].n_rows() * wd;
  }
  const TransferPlan load = plan_transfer(load_sizes, scheme.granularity, cfg, Direction::to_banks);

  std::vector<CoreResult<T>> results(P);
  const SyncConfig sync{scheme.sync, 32};
  fan_out(P, opts.host_workers, [&](std::size_t c) {
    const CoreFragment<T> &f = parts.cores[c];
    const ThreadSchedule sched = schedule_threads(f.matrix, scheme.thread_balance, cfg.tasklets_per_core);
    results[c] = run_core(f.matrix, x.subspan(f.col_begin, f.n_cols()), sched, sync);
  });

  std::vector<CoreWork> work(P);
  for (std::size_t c = 0; c < P; ++c) {
    const CoreCounters &cc = results[c].counters;
    if (cc.scratchpad_peak_bytes() > cfg.scratchpad_bytes) {
      throw SchemeError("core " + std::to_string(c) + " needs " +
                        std::to_string(cc.scratchpad_peak_bytes()) + " scratchpad bytes");
    }
    work[c] = cc.work();
    s.lock_acquisitions += cc.lock_acquisitions();
    s.lf_additions += cc.lf_additions;
  }

  const TransferPlan retrieve =
      plan_transfer(retrieve_sizes, scheme.granularity, cfg, Direction::to_host);
  const Granularity grans[] = {Granularity::coarse, Granularity::rank, Granularity::bank};
  for (std::size_t g = 0; g < 3; ++g) {
    s.retrieve_padding_by_granularity[g] =
        plan_transfer(retrieve_sizes, grans[g], cfg, Direction::to_host).padding_fraction();
  }

  std::vector<PartialResult<T>> partials(P);
  for (std::size_t c = 0; c < P; ++c) partials[c] = {parts.cores[c].row_begin, results[c].y};
  r.y = merge_partials<T>(m.n_rows, partials, &s.merge_additions);
  s.merge_inputs = retrieve.total_useful() / wd;

  s.load = stats_of(load);
  s.retrieve = stats_of(retrieve);
  s.phase_seconds.load = transfer_time(load, cfg);
  s.phase_seconds.kernel = kernel_time_estimate(work, scheme.dtype, cfg);
  s.phase_seconds.retrieve = transfer_time(retrieve, cfg);
  s.phase_seconds.merge = merge_time(s.merge_additions, cfg);

  r.cores.reserve(P);
  r.core_counters.reserve(P);
  for (std::size_t c = 0; c < P; ++c) {
    const CoreFragment<T> &f = parts.cores[c];
    r.cores.push_back({f.row_begin, f.row_end, f.col_begin, f.col_end, f.nnz, f.blocks});
    r.core_counters.push_back(std::move(results[c].counters));
  }
  s.core_balance = estimate_imbalance(std::span<const CoreCounters>(r.core_counters));
  r.split_rows = std::move(parts.split_rows);
  return r;
}

RunSummary run_summary(const TripletMatrix &m, const SchemeId &scheme, const MachineConfig &cfg,
                       std::uint64_t x_seed, const PipelineOptions &opts) {
  return dispatch_dtype(scheme.dtype, [&](auto tag) {
    using T = typename decltype(tag)::type;
    const std::vector<T> x = make_input_vector<T>(m.n_cols, x_seed);
    return run_pipeline<T>(m, scheme, cfg, x, opts).summary;
  });
}

SweepResult sweep(const TripletMatrix &m, std::span<const SchemeId> schemes,
                  std::span<const std::size_t> core_counts,
                  std::span<const std::size_t> vertical_counts, const MachineConfig &cfg,
                  std::uint64_t x_seed, const PipelineOptions &opts) {
  SweepResult out;
  for (const SchemeId &base : schemes) {
    const bool two_d = base.info().is_2d();
    for (std::size_t p : core_counts) {
      const std::vector<std::size_t> one{1};
      std::span<const std::size_t> verticals = two_d ? vertical_counts : std::span<const std::size_t>(one);
      for (std::size_t v : verticals) {
        if (v == 0 || v > p || p % v != 0) continue;
        SchemeId s = base;
        s.n_cores = p;
        s.n_vertical = v;
        out.rows.push_back(run_summary(m, s, cfg, x_seed, opts));
      }
    }
  }
  if (out.rows.empty()) throw SchemeError("sweep has no valid configuration");
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    const RunSummary &a = out.rows[i];
    const RunSummary &b = out.rows[out.best];
    const auto key = [](const RunSummary &x) {
      return std::tuple(x.end_to_end(), x.scheme.n_cores, x.scheme.n_vertical);
    };
    if (key(a) < key(b)) out.best = i;
  }
  return out;
}

void write_sweep_csv(std::ostream &out, const SweepResult &r) {
  out << kSweepCsvVersion << '\n';
  out << "scheme,sync,thread_balance,dtype,granularity,cores,vertical,load_s,kernel_s,"
         "retrieve_s,merge_s,total_s,load_padding,retrieve_padding,gops,best\n";
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out.precision(9);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const RunSummary &s = r.rows[i];
    out << s.scheme.name() << ',' << to_string(s.scheme.sync) << ','
        << to_string(s.scheme.thread_balance) << ',' << to_string(s.scheme.dtype) << ','
        << to_string(s.scheme.granularity) << ',' << s.scheme.n_cores << ','
        << s.scheme.n_vertical << ',' << s.phase_seconds.load << ',' << s.phase_seconds.kernel
        << ',' << s.phase_seconds.retrieve << ',' << s.phase_seconds.merge << ','
        << s.end_to_end() << ',' << s.load.padding_fraction << ','
        << s.retrieve.padding_fraction << ',' << s.gops() << ',' << (i == r.best ? 1 : 0)
        << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

namespace {

nlohmann::ordered_json transfer_json(const TransferStats &t) {
  return {{"useful_bytes", t.useful_bytes},
          {"padded_bytes", t.padded_bytes},
          {"padding_fraction", t.padding_fraction}};
}

nlohmann::ordered_json ratio_json(const ImbalanceRatio &r) {
  return {{"max_over_mean", r.max_over_mean}, {"max_over_rest", r.max_over_rest}};
}

nlohmann::ordered_json summary_object(const RunSummary &s) {
  nlohmann::ordered_json j;
  j["scheme"] = s.scheme.name();
  j["kernel"] = s.scheme.kernel;
  j["sync"] = to_string(s.scheme.sync);
  j["thread_balance"] = to_string(s.scheme.thread_balance);
  j["dtype"] = to_string(s.scheme.dtype);
  j["granularity"] = to_string(s.scheme.granularity);
  j["block"] = {s.scheme.block.r, s.scheme.block.c};
  j["cores"] = s.scheme.n_cores;
  j["vertical"] = s.scheme.n_vertical;
  j["matrix"] = {{"rows", s.n_rows}, {"cols", s.n_cols}, {"nnz", s.nnz}};
  j["phase_seconds"] = {{"load", s.phase_seconds.load},
                        {"kernel", s.phase_seconds.kernel},
                        {"retrieve", s.phase_seconds.retrieve},
                        {"merge", s.phase_seconds.merge},
                        {"total", s.end_to_end()}};
  j["load"] = transfer_json(s.load);
  j["retrieve"] = transfer_json(s.retrieve);
  j["retrieve_padding_by_granularity"] = {{"coarse", s.retrieve_padding_by_granularity[0]},
                                          {"rank", s.retrieve_padding_by_granularity[1]},
                                          {"bank", s.retrieve_padding_by_granularity[2]}};
  j["merge_inputs"] = s.merge_inputs;
  j["merge_additions"] = s.merge_additions;
  j["lock_acquisitions"] = s.lock_acquisitions;
  j["lf_additions"] = s.lf_additions;
  j["core_balance"] = {{"nnz", ratio_json(s.core_balance.nnz)},
                       {"rows", ratio_json(s.core_balance.rows)},
                       {"locks", ratio_json(s.core_balance.locks)}};
  j["gops"] = s.gops();
  return j;
}

} // namespace

std::string summary_json(const RunSummary &s, int indent) { return summary_object(s).dump(indent); }

template <class T>
std::string report_json(const ExecutionReport<T> &r, bool include_y, bool include_cores,
                        int indent) {
  nlohmann::ordered_json j = summary_object(r.summary);
  if (include_cores) {
    auto cores = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < r.cores.size(); ++c) {
      const CoreSummary &cs = r.cores[c];
      const CoreCounters &cc = r.core_counters[c];
      cores.push_back({{"rows", {cs.row_begin, cs.row_end}},
                       {"cols", {cs.col_begin, cs.col_end}},
                       {"nnz", cs.nnz},
                       {"blocks", cs.blocks},
                       {"mul_ops", cc.mul_ops()},
                       {"mram_read_bytes", cc.mram_read_bytes()},
                       {"mram_write_bytes", cc.mram_write_bytes()},
                       {"lock_acquisitions", cc.lock_acquisitions()},
                       {"lf_additions", cc.lf_additions},
                       {"scratchpad_peak_bytes", cc.scratchpad_peak_bytes()}});
    }
    j["cores"] = std::move(cores);
    auto splits = nlohmann::ordered_json::array();
    for (const SplitRow &sr : r.split_rows) splits.push_back({sr.row, sr.core_a, sr.core_b});
    j["split_rows"] = std::move(splits);
  }
  if (include_y) {
    auto y = nlohmann::ordered_json::array();
    for (const T &v : r.y) {
      if constexpr (std::is_integral_v<T>) y.push_back(static_cast<std::int64_t>(v));
      else y.push_back(static_cast<double>(v));
    }
    j["y"] = std::move(y);
  }
  return j.dump(indent);
}

#define SPARSEP_INSTANTIATE_HOST(T)                                                          \
  template std::vector<T> merge_partials<T>(std::size_t, std::span<const PartialResult<T>>,   \
                                            std::size_t *);                                   \
  template ExecutionReport<T> run_pipeline<T>(const TripletMatrix &, const SchemeId &,        \
                                              const MachineConfig &, std::span<const T>,      \
                                              const PipelineOptions &);                       \
  template std::string report_json<T>(const ExecutionReport<T> &, bool, bool, int);

SPARSEP_FOR_EACH_SCALAR(SPARSEP_INSTANTIATE_HOST)

} // namespace sparsep
