#include "sparsep/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sparsep/host.hpp"
#include "sparsep/part2d.hpp"
#include "sparsep/reference.hpp"

namespace sparsep {

namespace {

/// Raised for problems the user fixes by changing flags.
class UsageError : public Error {
public:
  using Error::Error;
};

struct MatrixOptions {
  std::string path;
  std::string generate;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::size_t> nnz;
  std::optional<std::size_t> bandwidth;
  std::optional<double> exponent;
  std::optional<std::size_t> n_blocks;
  std::optional<std::string> values;
};

struct MachineOptions {
  std::string profile = "pim-A";
  std::string config;
  std::vector<std::string> overrides; ///< key=value
};

struct SchemeOptions {
  std::string dtype = "int32";
  std::string granularity = "rank";
  std::string block = "4x4";
  std::optional<std::string> thread_balance;
  std::optional<std::size_t> tasklets;
  std::size_t workers = 1;
};

void add_matrix_options(CLI::App &app, MatrixOptions &o) {
  auto *file = app.add_option("--matrix", o.path, "Matrix Market file");
  auto *gen = app.add_option("--generate", o.generate,
                             "synthetic kind: banded, uniform-random, power-law, block-pattern");
  file->excludes(gen);
  app.add_option("--seed", o.seed, "generator seed (required with --generate)");
  app.add_option("--n", o.n, "generated matrix dimension");
  app.add_option("--nnz", o.nnz, "generated nonzeros (uniform-random, power-law)");
  app.add_option("--bandwidth", o.bandwidth, "half bandwidth (banded)");
  app.add_option("--exponent", o.exponent, "zeta exponent (power-law)");
  app.add_option("--blocks", o.n_blocks, "dense blocks (block-pattern)");
  app.add_option("--values", o.values, "generated values: small-int or unit-real");
}

void add_machine_options(CLI::App &app, MachineOptions &o) {
  app.add_option("--profile", o.profile, "machine profile: pim-A or pim-B");
  app.add_option("--config", o.config,
                 std::string("key = value config file (default: $") + kConfigEnv + ")");
  app.add_option("--set", o.overrides, "machine override key=value (repeatable)");
}

void add_scheme_options(CLI::App &app, SchemeOptions &o) {
  app.add_option("--dtype", o.dtype, "int8, int16, int32, int64, fp32, fp64");
  app.add_option("--granularity", o.granularity, "transfer granularity: coarse, rank, bank");
  app.add_option("--block", o.block, "block shape RxC for BCSR/BCOO");
  app.add_option("--thread-balance", o.thread_balance, "rows, nnz-rgrn, nnz, blocks");
  app.add_option("--tasklets", o.tasklets, "tasklets per core (1-24)");
  app.add_option("--workers", o.workers, "host threads simulating cores");
}

BlockShape parse_block(const std::string &s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    const std::size_t r = std::stoul(s.substr(0, x));
    const std::size_t c = std::stoul(s.substr(x + 1));
    if (r == 0 || c == 0) throw std::invalid_argument(s);
    return {r, c};
  } catch (const std::exception &) {
    throw UsageError("block shape must look like 4x4, got '" + s + "'");
  }
}

struct Context {
  MachineConfig cfg;
  std::map<std::string, std::string> generator; ///< generator.* keys from the config file
};

Context load_context(const MachineOptions &mo, const SchemeOptions *so) {
  Context ctx;
  std::string path = mo.config;
  if (path.empty()) {
    if (const char *env = std::getenv(kConfigEnv)) path = env;
  }
  ctx.cfg = path.empty() ? default_machine(mo.profile)
                         : load_machine_config(path, mo.profile, &ctx.generator);
  for (const std::string &kv : mo.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    apply_override(ctx.cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (so && so->tasklets) ctx.cfg.tasklets_per_core = *so->tasklets;
  ctx.cfg.validate();
  return ctx;
}

template <class V>
V pick(const std::optional<V> &flag, const std::map<std::string, std::string> &cfg,
       const std::string &key, V fallback) {
  if (flag) return *flag;
  auto it = cfg.find("generator." + key);
  if (it == cfg.end()) return fallback;
  std::istringstream in(it->second);
  V v{};
  if constexpr (std::is_same_v<V, std::string>) {
    v = it->second;
  } else if (!(in >> v) || !(in >> std::ws).eof()) {
    throw ConfigError("invalid value '" + it->second + "' for generator." + key);
  }
  return v;
}

TripletMatrix load_matrix(const MatrixOptions &o, const Context &ctx) {
  std::string kind = o.generate;
  if (kind.empty() && o.path.empty()) {
    auto it = ctx.generator.find("generator.kind");
    if (it != ctx.generator.end()) kind = it->second;
  }
  if (!o.path.empty()) return read_matrix_market(o.path);
  if (kind.empty()) throw UsageError("one of --matrix or --generate is required");

  const auto seed = pick<std::uint64_t>(o.seed, ctx.generator, "seed", 0);
  if (!o.seed && !ctx.generator.count("generator.seed")) {
    throw UsageError("--seed is required with --generate");
  }
  GeneratorKind gk;
  try {
    gk = parse_generator_kind(kind);
  } catch (const GeneratorError &e) {
    throw UsageError(e.what());
  }
  GeneratorParams p;
  const std::size_t n = pick<std::size_t>(o.n, ctx.generator, "n", 256);
  p.nnz = pick<std::size_t>(o.nnz, ctx.generator, "nnz", 8 * n);
  p.bandwidth = pick<std::size_t>(o.bandwidth, ctx.generator, "bandwidth", 2);
  p.exponent = pick<double>(o.exponent, ctx.generator, "exponent", 2.1);
  p.n_blocks = pick<std::size_t>(o.n_blocks, ctx.generator, "blocks", n / 4);
  p.block_r = pick<std::size_t>(std::nullopt, ctx.generator, "block_r", 4);
  p.block_c = pick<std::size_t>(std::nullopt, ctx.generator, "block_c", 4);
  const std::string values = pick<std::string>(o.values, ctx.generator, "values", "small-int");
  if (values == "small-int") p.values = ValueKind::small_int;
  else if (values == "unit-real") p.values = ValueKind::unit_real;
  else throw UsageError("--values must be small-int or unit-real");
  return generate_synthetic(gk, n, p, seed);
}

SchemeId make_scheme(const std::string &name, const SchemeOptions &o, std::size_t cores,
                     std::size_t vertical) {
  SchemeId s = parse_scheme(name);
  s.dtype = parse_dtype(o.dtype);
  s.granularity = parse_granularity(o.granularity);
  s.block = parse_block(o.block);
  if (o.thread_balance) s.thread_balance = parse_balance(*o.thread_balance);
  s.n_cores = cores;
  s.n_vertical = s.info().is_2d() ? vertical : 1;
  validate_scheme(s);
  return s;
}

void write_to(const std::string &path, std::ostream &fallback, const std::string &text) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

/// Per-core geometry and work, one row per core.
template <class T> std::string plan_csv(const ExecutionReport<T> &r) {
  std::ostringstream out;
  out << "core,partition,row_begin,row_end,col_begin,col_end,nnz,blocks,mul_ops,mram_bytes\n";
  const std::size_t per_partition = r.cores.size() / r.summary.scheme.n_vertical;
  for (std::size_t c = 0; c < r.cores.size(); ++c) {
    const CoreSummary &s = r.cores[c];
    out << c << ',' << c / per_partition << ',' << s.row_begin << ',' << s.row_end << ','
        << s.col_begin << ',' << s.col_end << ',' << s.nnz << ',' << s.blocks << ','
        << r.core_counters[c].mul_ops() << ',' << r.core_counters[c].mram_bytes() << '\n';
  }
  return out.str();
}

int cmd_run(const MatrixOptions &mo, const MachineOptions &ma, const SchemeOptions &so,
            const std::string &scheme_name, std::size_t cores, std::size_t vertical,
            const std::string &out_path, const std::string &plan_path, bool with_y,
            bool with_cores, std::ostream &out) {
  const Context ctx = load_context(ma, &so);
  const SchemeId s = make_scheme(scheme_name, so, cores, vertical);
  const TripletMatrix m = load_matrix(mo, ctx);
  const std::uint64_t x_seed = mo.seed.value_or(1);
  return dispatch_dtype(s.dtype, [&](auto tag) {
    using T = typename decltype(tag)::type;
    const std::vector<T> x = make_input_vector<T>(m.n_cols, x_seed);
    const auto report = run_pipeline<T>(m, s, ctx.cfg, x, {so.workers});
    write_to(out_path, out, report_json(report, with_y, with_cores) + "\n");
    if (!plan_path.empty()) write_to(plan_path, out, plan_csv(report));
    return kExitOk;
  });
}

std::vector<std::size_t> parse_counts(const std::vector<std::string> &items) {
  std::vector<std::size_t> out;
  for (const std::string &item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        const std::size_t v = std::stoul(tok, &used);
        if (used != tok.size() || v == 0) throw std::invalid_argument(tok);
        out.push_back(v);
      } catch (const std::exception &) {
        throw UsageError("expected a positive count, got '" + tok + "'");
      }
    }
  }
  return out;
}

std::vector<std::string> split_names(const std::vector<std::string> &items) {
  std::vector<std::string> out;
  for (const std::string &item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(tok);
    }
  }
  return out;
}

int cmd_sweep(const MatrixOptions &mo, const MachineOptions &ma, const SchemeOptions &so,
              const std::vector<std::string> &scheme_names,
              const std::vector<std::string> &core_list,
              const std::vector<std::string> &vertical_list, const std::string &out_path,
              std::ostream &out) {
  const Context ctx = load_context(ma, &so);
  std::vector<SchemeId> schemes;
  std::vector<std::string> names = split_names(scheme_names);
  if (names.empty()) {
    for (const KernelInfo &k : kernel_registry()) names.emplace_back(k.name);
  }
  for (const std::string &n : names) {
    SchemeId s = make_scheme(n, so, 1, 1);
    schemes.push_back(s);
  }
  const auto cores = parse_counts(core_list);
  const auto verticals = parse_counts(vertical_list);
  for (std::size_t p : cores) {
    if (p > ctx.cfg.n_cores) {
      throw UsageError("core count " + std::to_string(p) + " exceeds the machine's " +
                       std::to_string(ctx.cfg.n_cores));
    }
  }
  const TripletMatrix m = load_matrix(mo, ctx);
  const SweepResult r = sweep(m, schemes, cores, verticals, ctx.cfg, mo.seed.value_or(1), {so.workers});
  std::ostringstream csv;
  write_sweep_csv(csv, r);
  const RunSummary &b = r.rows[r.best];
  std::ostringstream best;
  best << "# best: " << b.scheme.name() << " cores=" << b.scheme.n_cores
       << " vertical=" << b.scheme.n_vertical << " total_s=" << std::setprecision(9)
       << b.end_to_end() << " gops=" << b.gops() << '\n';
  write_to(out_path, out, csv.str() + best.str());
  if (!out_path.empty() && out_path != "-") out << best.str();
  return kExitOk;
}

int cmd_verify(const MatrixOptions &mo, const MachineOptions &ma, const SchemeOptions &so,
               const std::vector<std::string> &dtypes, std::size_t cores, std::size_t vertical,
               std::ostream &out) {
  const Context ctx = load_context(ma, &so);
  const TripletMatrix m = load_matrix(mo, ctx);
  if (cores % vertical != 0 || vertical > cores) {
    throw UsageError("--vertical must divide --cores");
  }
  std::vector<std::string> types = split_names(dtypes);
  if (types.empty()) types = {"int64"};
  std::size_t checked = 0, failed = 0;
  for (const std::string &dt : types) {
    const DType t = parse_dtype(dt);
    for (SchemeId s : expand_all_variants()) {
      s.dtype = t;
      s.granularity = parse_granularity(so.granularity);
      s.block = parse_block(so.block);
      s.n_cores = cores;
      s.n_vertical = s.info().is_2d() ? vertical : 1;
      const bool ok = dispatch_dtype(t, [&](auto tag) {
        using T = typename decltype(tag)::type;
        const std::vector<T> x = make_input_vector<T>(m.n_cols, mo.seed.value_or(1));
        const std::vector<T> want = reference_spmv<T>(m, x);
        const auto got = run_pipeline<T>(m, s, ctx.cfg, x, {so.workers});
        return outputs_match<T>(got.y, want);
      });
      ++checked;
      if (!ok) ++failed;
      out << (ok ? "PASS " : "FAIL ") << s.name() << " threads=" << to_string(s.thread_balance)
          << " dtype=" << to_string(t) << '\n';
    }
  }
  out << "verified " << checked << " scheme variants over " << kernel_registry().size()
      << " kernels: " << failed << " mismatches\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_stats(const MatrixOptions &mo, const MachineOptions &ma, std::ostream &out) {
  const Context ctx = load_context(ma, nullptr);
  const TripletMatrix m = load_matrix(mo, ctx);
  const MatrixStats s = compute_stats(m);
  std::string name = mo.path.empty() ? mo.generate : mo.path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (name.size() > 4 && name.ends_with(".mtx")) name.resize(name.size() - 4);
  out << "name,rows,cols,nnz,sparsity,nnz_r_std,nnz_c_std,max_row_nnz,max_col_nnz,empty_rows\n";
  char sparsity[32];
  std::snprintf(sparsity, sizeof(sparsity), "%.2e", s.sparsity);
  char rstd[32], cstd[32];
  std::snprintf(rstd, sizeof(rstd), "%.2f", s.nnz_r_std);
  std::snprintf(cstd, sizeof(cstd), "%.2f", s.nnz_c_std);
  out << name << ',' << s.n_rows << ',' << s.n_cols << ',' << s.nnz << ',' << sparsity << ','
      << rstd << ',' << cstd << ',' << s.max_row_nnz << ',' << s.max_col_nnz << ','
      << s.empty_row_count << '\n';
  return kExitOk;
}

} // namespace

int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Sparse matrix-vector multiplication on a simulated near-bank PIM system",
               "sparsep"};
  app.require_subcommand(1);

  MatrixOptions mo;
  MachineOptions ma;
  SchemeOptions so;

  auto *run = app.add_subcommand("run", "run one scheme end to end and print a JSON report");
  std::string run_scheme = "COO.nnz", run_out, plan_out;
  std::size_t run_cores = 64, run_vertical = 2;
  bool with_y = false, with_cores = false;
  add_matrix_options(*run, mo);
  add_machine_options(*run, ma);
  add_scheme_options(*run, so);
  run->add_option("--scheme", run_scheme, "scheme, e.g. COO.nnz-lf, DCOO, RBDBCSR.nnz-lb-fg");
  run->add_option("--cores", run_cores, "simulated cores");
  run->add_option("--vertical", run_vertical, "vertical partitions (2D kernels)");
  run->add_option("--out", run_out, "JSON report path (default stdout)");
  run->add_option("--plan-out", plan_out, "per-core plan CSV path");
  run->add_flag("--with-y", with_y, "include the output vector");
  run->add_flag("--with-cores", with_cores, "include per-core counters and split rows");

  auto *sw = app.add_subcommand("sweep", "evaluate schemes over core and vertical counts");
  std::vector<std::string> sw_schemes, sw_cores{"64,128,256,512,1024,2048"},
      sw_vertical{"2,4,8,16,32"};
  std::string sw_out;
  add_matrix_options(*sw, mo);
  add_machine_options(*sw, ma);
  add_scheme_options(*sw, so);
  sw->add_option("--scheme", sw_schemes, "schemes (repeatable or comma separated; default all)");
  sw->add_option("--cores", sw_cores, "core counts");
  sw->add_option("--vertical", sw_vertical, "vertical partition counts (2D kernels)");
  sw->add_option("--out", sw_out, "CSV path (default stdout)");

  auto *ver = app.add_subcommand("verify", "check every scheme against the dense oracle");
  std::vector<std::string> ver_dtypes;
  std::size_t ver_cores = 16, ver_vertical = 2;
  add_matrix_options(*ver, mo);
  add_machine_options(*ver, ma);
  add_scheme_options(*ver, so);
  ver->add_option("--dtypes", ver_dtypes, "scalar types to verify (default int64)");
  ver->add_option("--cores", ver_cores, "simulated cores");
  ver->add_option("--vertical", ver_vertical, "vertical partitions (2D kernels)");

  auto *st = app.add_subcommand("stats", "print matrix statistics");
  add_matrix_options(*st, mo);
  add_machine_options(*st, ma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) {
      return cmd_run(mo, ma, so, run_scheme, run_cores, run_vertical, run_out, plan_out, with_y,
                     with_cores, out);
    }
    if (*sw) return cmd_sweep(mo, ma, so, sw_schemes, sw_cores, sw_vertical, sw_out, out);
    if (*ver) return cmd_verify(mo, ma, so, ver_dtypes, ver_cores, ver_vertical, out);
    if (*st) return cmd_stats(mo, ma, out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SchemeError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

} // namespace sparsep
