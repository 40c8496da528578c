#include "sparsep/scheme.hpp"

#include <algorithm>

namespace sparsep {

namespace {

using enum Balance;
using F = Format;
using P = Partitioning;
using S = SyncMode;

const std::vector<S> kNoSync{S::none};
const std::vector<S> kAllLocks{S::lb_cg, S::lb_fg, S::lf};
const std::vector<S> kLockBased{S::lb_cg, S::lb_fg};

std::vector<KernelInfo> build_registry() {
  const std::vector<Balance> row_threads{rows, nnz_rgrn};
  const std::vector<Balance> nnz_threads{nnz};
  const std::vector<Balance> block_threads{blocks, nnz};

  std::vector<KernelInfo> r;
  auto add = [&](std::string_view name, F f, P p, Balance core, const std::vector<Balance> &tb,
                 Balance tdef, const std::vector<S> &sync, S sdef) {
    r.push_back(KernelInfo{name, f, p, core, tb, tdef, sync, sdef});
  };

  add("CSR.row", F::csr, P::one_d, rows, row_threads, rows, kNoSync, S::none);
  add("CSR.nnz", F::csr, P::one_d, nnz_rgrn, row_threads, nnz_rgrn, kNoSync, S::none);
  add("COO.row", F::coo, P::one_d, rows, row_threads, rows, kNoSync, S::none);
  add("COO.nnz-rgrn", F::coo, P::one_d, nnz_rgrn, row_threads, nnz_rgrn, kNoSync, S::none);
  add("COO.nnz", F::coo, P::one_d, nnz, nnz_threads, nnz, kAllLocks, S::lf);
  add("BCSR.block", F::bcsr, P::one_d, blocks, block_threads, blocks, kLockBased, S::lb_cg);
  add("BCSR.nnz", F::bcsr, P::one_d, nnz, block_threads, nnz, kLockBased, S::lb_cg);
  add("BCOO.block", F::bcoo, P::one_d, blocks, block_threads, blocks, kAllLocks, S::lb_cg);
  add("BCOO.nnz", F::bcoo, P::one_d, nnz, block_threads, nnz, kAllLocks, S::lb_cg);

  // Equally-sized tiles have no core balancing; the core_balance field is inert.
  add("DCSR", F::csr, P::equally_sized, rows, row_threads, rows, kNoSync, S::none);
  add("DCOO", F::coo, P::equally_sized, nnz, nnz_threads, nnz, kAllLocks, S::lf);
  add("DBCSR", F::bcsr, P::equally_sized, blocks, block_threads, blocks, kLockBased, S::lb_cg);
  add("DBCOO", F::bcoo, P::equally_sized, blocks, block_threads, blocks, kLockBased, S::lb_cg);

  add("RBDCSR", F::csr, P::equally_wide, nnz_rgrn, row_threads, rows, kNoSync, S::none);
  add("RBDCOO", F::coo, P::equally_wide, nnz, nnz_threads, nnz, kAllLocks, S::lf);
  add("RBDBCSR.block", F::bcsr, P::equally_wide, blocks, block_threads, blocks, kLockBased, S::lb_cg);
  add("RBDBCSR.nnz", F::bcsr, P::equally_wide, nnz, block_threads, nnz, kLockBased, S::lb_cg);
  add("RBDBCOO.block", F::bcoo, P::equally_wide, blocks, block_threads, blocks, kLockBased, S::lb_cg);
  add("RBDBCOO.nnz", F::bcoo, P::equally_wide, nnz, block_threads, nnz, kLockBased, S::lb_cg);

  add("BDCSR", F::csr, P::variable_sized, nnz_rgrn, row_threads, rows, kNoSync, S::none);
  add("BDCOO", F::coo, P::variable_sized, nnz, nnz_threads, nnz, kAllLocks, S::lf);
  add("BDBCSR.block", F::bcsr, P::variable_sized, blocks, block_threads, blocks, kLockBased, S::lb_cg);
  add("BDBCSR.nnz", F::bcsr, P::variable_sized, nnz, block_threads, nnz, kLockBased, S::lb_cg);
  add("BDBCOO.block", F::bcoo, P::variable_sized, blocks, block_threads, blocks, kLockBased, S::lb_cg);
  add("BDBCOO.nnz", F::bcoo, P::variable_sized, nnz, block_threads, nnz, kLockBased, S::lb_cg);
  return r;
}

const std::vector<KernelInfo> &registry() {
  static const std::vector<KernelInfo> r = build_registry();
  return r;
}

const KernelInfo *lookup(std::string_view name) {
  for (const auto &k : registry()) {
    if (k.name == name) return &k;
  }
  for (std::string_view alias : {"RBDBCSR", "RBDBCOO", "BDBCSR", "BDBCOO"}) {
    if (name == alias) return lookup(std::string(alias) + ".block");
  }
  return nullptr;
}

} // namespace

std::string_view to_string(Partitioning p) {
  switch (p) {
  case P::one_d: return "1D";
  case P::equally_sized: return "equally-sized";
  case P::equally_wide: return "equally-wide";
  case P::variable_sized: return "variable-sized";
  }
  return "?";
}

std::string_view to_string(Balance b) {
  switch (b) {
  case rows: return "rows";
  case nnz_rgrn: return "nnz-rgrn";
  case nnz: return "nnz";
  case blocks: return "blocks";
  }
  return "?";
}

std::string_view to_string(SyncMode s) {
  switch (s) {
  case S::none: return "none";
  case S::lb_cg: return "lb-cg";
  case S::lb_fg: return "lb-fg";
  case S::lf: return "lf";
  }
  return "?";
}

Balance parse_balance(std::string_view s) {
  for (Balance b : {rows, nnz_rgrn, nnz, blocks}) {
    if (s == to_string(b)) return b;
  }
  throw SchemeError("unknown balance '" + std::string(s) + "'");
}

SyncMode parse_sync(std::string_view s) {
  for (S m : {S::none, S::lb_cg, S::lb_fg, S::lf}) {
    if (s == to_string(m)) return m;
  }
  throw SchemeError("unknown sync mode '" + std::string(s) + "'");
}

bool KernelInfo::allows(SyncMode s) const {
  return std::find(sync_modes.begin(), sync_modes.end(), s) != sync_modes.end();
}

bool KernelInfo::allows(Balance b) const {
  return std::find(thread_balances.begin(), thread_balances.end(), b) != thread_balances.end();
}

std::span<const KernelInfo> kernel_registry() { return registry(); }

const KernelInfo &find_kernel(std::string_view name) {
  if (const KernelInfo *k = lookup(name)) return *k;
  throw SchemeError("unknown kernel '" + std::string(name) + "'");
}

std::string SchemeId::name() const {
  const KernelInfo &k = info();
  std::string out(k.name);
  if (k.sync_modes.size() > 1) {
    out += '-';
    out += to_string(sync);
  }
  return out;
}

SchemeId default_scheme(const KernelInfo &k) {
  SchemeId s;
  s.kernel = std::string(k.name);
  s.sync = k.default_sync;
  s.thread_balance = k.default_thread_balance;
  s.n_vertical = k.is_2d() ? 2 : 1;
  return s;
}

SchemeId parse_scheme(std::string_view name) {
  // Longest kernel name or alias that prefixes `name`; the rest is the sync suffix.
  std::string_view best;
  for (const auto &k : registry()) {
    if (name.starts_with(k.name) && k.name.size() > best.size()) best = k.name;
  }
  for (std::string_view alias : {"RBDBCSR", "RBDBCOO", "BDBCSR", "BDBCOO"}) {
    if (name.starts_with(alias) && alias.size() > best.size()) best = alias;
  }
  if (best.empty()) throw SchemeError("unknown scheme '" + std::string(name) + "'");

  const KernelInfo &k = find_kernel(best);
  SchemeId s = default_scheme(k);
  std::string_view rest = name.substr(best.size());
  if (rest.empty()) return s;
  if (rest.front() != '-') throw SchemeError("unknown scheme '" + std::string(name) + "'");
  rest.remove_prefix(1);
  SyncMode m;
  try {
    m = parse_sync(rest);
  } catch (const SchemeError &) {
    throw SchemeError("unknown scheme '" + std::string(name) + "'");
  }
  if (!k.allows(m)) {
    throw SchemeError("kernel " + std::string(k.name) + " does not support " + std::string(rest));
  }
  s.sync = m;
  return s;
}

std::vector<SchemeId> expand_all_variants() {
  std::vector<SchemeId> out;
  for (const auto &k : registry()) {
    for (S m : k.sync_modes) {
      for (Balance b : k.thread_balances) {
        SchemeId s = default_scheme(k);
        s.sync = m;
        s.thread_balance = b;
        out.push_back(s);
      }
    }
  }
  return out;
}

SplitMode split_mode(Format f, Balance b) {
  switch (f) {
  case Format::csr:
  case Format::coo:
    if (b == Balance::rows) return SplitMode::units_even;
    if (b == Balance::nnz_rgrn) return SplitMode::units_greedy;
    if (b == Balance::nnz && f == Format::coo) return SplitMode::items_even;
    break;
  case Format::bcsr:
    if (b == Balance::blocks || b == Balance::nnz) return SplitMode::units_greedy;
    break;
  case Format::bcoo:
    if (b == Balance::blocks) return SplitMode::items_even;
    if (b == Balance::nnz) return SplitMode::items_greedy;
    break;
  }
  throw SchemeError("balance " + std::string(to_string(b)) + " is not defined for " +
                    std::string(to_string(f)));
}

void validate_scheme(const SchemeId &s) {
  const KernelInfo &k = find_kernel(s.kernel);
  if (!k.allows(s.sync)) {
    throw SchemeError("kernel " + std::string(k.name) + " does not support sync " +
                      std::string(to_string(s.sync)));
  }
  if (!k.allows(s.thread_balance)) {
    throw SchemeError("kernel " + std::string(k.name) + " does not support thread balance " +
                      std::string(to_string(s.thread_balance)));
  }
  if (s.n_cores == 0) throw SchemeError("n_cores must be >= 1");
  if (s.block.r == 0 || s.block.c == 0) throw SchemeError("block dimensions must be >= 1");
  if (!k.is_2d() && s.n_vertical != 1) {
    throw SchemeError("1D kernel " + std::string(k.name) + " requires n_vertical = 1");
  }
  if (k.is_2d()) {
    if (s.n_vertical == 0 || s.n_vertical > s.n_cores || s.n_cores % s.n_vertical != 0) {
      throw SchemeError("n_vertical must divide n_cores (got " + std::to_string(s.n_vertical) +
                        " for " + std::to_string(s.n_cores) + " cores)");
    }
  }
}

} // namespace sparsep
