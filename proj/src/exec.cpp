#include "sparsep/exec.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace sparsep {

namespace {

constexpr std::size_t kChunk = 256;  // structure fetch granularity
constexpr std::size_t kIndexBytes = 4;

std::size_t chunked(std::size_t bytes) { return round_up(bytes, kChunk); }

template <class T> ItemList fragment_items(const AnyMatrix<T> &m, Balance balance) {
  ItemList l;
  std::visit(
      [&](const auto &a) {
        using M = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<M, CsrMatrix<T>>) {
          l.n_units = a.n_rows;
          for (std::size_t i = 0; i < a.n_rows; ++i) {
            l.unit_row.insert(l.unit_row.end(), a.row_nnz(i), i);
          }
          l.weight.assign(a.nnz(), 1);
        } else if constexpr (std::is_same_v<M, CooMatrix<T>>) {
          l.n_units = a.n_rows;
          for (const auto &t : a.tuples) l.unit_row.push_back(t.row);
          l.weight.assign(a.nnz(), 1);
        } else {
          l.n_units = a.n_block_rows();
          for (std::size_t b = 0; b < a.n_blocks(); ++b) {
            l.weight.push_back(balance == Balance::blocks ? 1 : a.block_nnz[b]);
          }
          if constexpr (std::is_same_v<M, BcsrMatrix<T>>) {
            for (std::size_t br = 0; br < a.n_block_rows(); ++br) {
              l.unit_row.insert(l.unit_row.end(), a.browptr[br + 1] - a.browptr[br], br);
            }
          } else {
            l.unit_row = a.browind;
          }
        }
      },
      m);
  return l;
}

/// A run of consecutive output rows produced by one tasklet.
struct Segment {
  std::size_t row = 0;
  std::size_t len = 0;
  std::size_t value_offset = 0;
};

template <class T> struct TaskletOutput {
  std::vector<Segment> segments;
  std::vector<T> values;
  TaskletCounters counters;

  void emit(std::size_t row, std::span<const T> v) {
    segments.push_back({row, v.size(), values.size()});
    values.insert(values.end(), v.begin(), v.end());
  }
};

template <class T>
void run_csr(const CsrMatrix<T> &a, std::span<const T> x, const TaskletWork &w,
             TaskletOutput<T> &out) {
  constexpr std::size_t wd = sizeof(T);
  for (std::size_t i = w.unit_begin; i < w.unit_end; ++i) {
    T acc{};
    for (std::size_t j = a.rowptr[i]; j < a.rowptr[i + 1]; ++j) {
      acc = scalar::mac(acc, a.values[j], x[a.colind[j]]);
    }
    out.emit(i, std::span<const T>(&acc, 1));
  }
  const std::size_t nnz = w.item_end - w.item_begin;
  auto &c = out.counters;
  c.nnz_processed = c.mul_ops = nnz;
  c.rows_processed = w.unit_end - w.unit_begin;
  if (c.rows_processed > 0) {
    c.mram_read_bytes += chunked((c.rows_processed + 1) * kIndexBytes);
  }
  c.mram_read_bytes += chunked(nnz * kIndexBytes) + chunked(nnz * wd) + 8 * nnz;
  c.scratchpad_peak_bytes = 3 * kChunk + 8 + 8;
}

template <class T>
void run_coo(const CooMatrix<T> &a, std::span<const T> x, const TaskletWork &w,
             TaskletOutput<T> &out) {
  constexpr std::size_t wd = sizeof(T);
  for (std::size_t k = w.item_begin; k < w.item_end;) {
    const std::size_t row = a.tuples[k].row;
    T acc{};
    for (; k < w.item_end && a.tuples[k].row == row; ++k) {
      acc = scalar::mac(acc, a.tuples[k].value, x[a.tuples[k].col]);
    }
    out.emit(row, std::span<const T>(&acc, 1));
  }
  const std::size_t nnz = w.item_end - w.item_begin;
  auto &c = out.counters;
  c.nnz_processed = c.mul_ops = nnz;
  c.mram_read_bytes += chunked(nnz * round_up(2 * kIndexBytes + wd, 8)) + 8 * nnz;
  c.scratchpad_peak_bytes = kChunk + 8 + 8;
}

/// Accumulates block `b` (row-major r x c) into acc[0..r).
template <class T>
void block_mac(const std::vector<T> &bvalues, std::size_t b, BlockShape s, std::size_t col0,
               std::size_t n_cols, std::span<const T> x, std::vector<T> &acc) {
  const T *v = bvalues.data() + b * s.r * s.c;
  for (std::size_t i = 0; i < s.r; ++i) {
    for (std::size_t j = 0; j < s.c; ++j) {
      const std::size_t col = col0 + j;
      if (col < n_cols) acc[i] = scalar::mac(acc[i], v[i * s.c + j], x[col]);
    }
  }
}

template <class M>
void block_counters(const M &a, const TaskletWork &w, std::size_t index_arrays_bytes,
                    TaskletCounters &c, std::size_t wd) {
  const BlockShape s = a.shape;
  const std::size_t nb = w.item_end - w.item_begin;
  for (std::size_t b = w.item_begin; b < w.item_end; ++b) c.nnz_processed += a.block_nnz[b];
  c.mul_ops = nb * s.r * s.c;
  c.mram_read_bytes += index_arrays_bytes + nb * round_up(s.r * s.c * wd, 8) +
                       nb * round_up(s.c * wd, 8);
  c.scratchpad_peak_bytes =
      2 * kChunk + round_up(s.r * s.c * wd, 8) + round_up(s.c * wd, 8) + round_up(s.r * wd, 8);
}

template <class T>
void run_bcsr(const BcsrMatrix<T> &a, std::span<const T> x, const TaskletWork &w,
              TaskletOutput<T> &out) {
  const BlockShape s = a.shape;
  std::vector<T> acc(s.r);
  for (std::size_t br = w.unit_begin; br < w.unit_end; ++br) {
    std::fill(acc.begin(), acc.end(), T{});
    for (std::size_t b = a.browptr[br]; b < a.browptr[br + 1]; ++b) {
      block_mac(a.bvalues, b, s, a.bcolind[b] * s.c, a.n_cols, x, acc);
    }
    const std::size_t row = br * s.r;
    out.emit(row, std::span<const T>(acc.data(), std::min(s.r, a.n_rows - row)));
  }
  auto &c = out.counters;
  const std::size_t nbr = w.unit_end - w.unit_begin;
  const std::size_t nb = w.item_end - w.item_begin;
  const std::size_t idx = (nbr > 0 ? chunked((nbr + 1) * kIndexBytes) : 0) + chunked(nb * kIndexBytes);
  block_counters(a, w, idx, c, sizeof(T));
  c.rows_processed =
      std::min(a.n_rows, w.unit_end * s.r) - std::min(a.n_rows, w.unit_begin * s.r);
}

template <class T>
void run_bcoo(const BcooMatrix<T> &a, std::span<const T> x, const TaskletWork &w,
              TaskletOutput<T> &out) {
  const BlockShape s = a.shape;
  std::vector<T> acc(s.r);
  for (std::size_t b = w.item_begin; b < w.item_end;) {
    const std::size_t br = a.browind[b];
    std::fill(acc.begin(), acc.end(), T{});
    for (; b < w.item_end && a.browind[b] == br; ++b) {
      block_mac(a.bvalues, b, s, a.bcolind[b] * s.c, a.n_cols, x, acc);
    }
    const std::size_t row = br * s.r;
    out.emit(row, std::span<const T>(acc.data(), std::min(s.r, a.n_rows - row)));
  }
  const std::size_t nb = w.item_end - w.item_begin;
  block_counters(a, w, 2 * chunked(nb * kIndexBytes), out.counters, sizeof(T));
}

/// Word range [lo, hi) touched by a segment.
std::pair<std::size_t, std::size_t> words_of(const Segment &s, std::size_t wd) {
  return {s.row * wd / 8, ceil_div((s.row + s.len) * wd, 8)};
}

bool overlaps(std::pair<std::size_t, std::size_t> a, std::pair<std::size_t, std::size_t> b) {
  return a.first < b.second && b.first < a.second;
}

} // namespace

template <class T>
ThreadSchedule schedule_threads(const AnyMatrix<T> &fragment, Balance balance,
                                std::size_t n_tasklets) {
  if (n_tasklets < 1 || n_tasklets > 24) {
    throw SchemeError("tasklet count must be in [1, 24], got " + std::to_string(n_tasklets));
  }
  const Format f = format_of(fragment);
  const SplitMode mode = split_mode(f, balance);
  ThreadSchedule s;
  s.balance = balance;
  if (!is_blocked(f) && mode != SplitMode::items_even) {
    s.alignment_chunk = sizeof(T) < 8 ? 8 / sizeof(T) : 1;
  }
  s.splits_units = mode == SplitMode::items_even || mode == SplitMode::items_greedy;
  const Split split = split_items(fragment_items(fragment, balance), mode, n_tasklets,
                                  s.alignment_chunk);
  s.per_tasklet.reserve(n_tasklets);
  for (const PartRange &p : split.parts) {
    s.per_tasklet.push_back({p.unit_begin, p.unit_end, p.item_begin, p.item_end});
  }
  return s;
}

template <class T>
CoreResult<T> run_core(const AnyMatrix<T> &fragment, std::span<const T> x,
                       const ThreadSchedule &schedule, SyncConfig sync) {
  constexpr std::size_t wd = sizeof(T);
  const Format f = format_of(fragment);
  const std::size_t n_rows = rows_of(fragment);
  if (x.size() != cols_of(fragment)) {
    throw SchemeError("input slice has " + std::to_string(x.size()) + " elements, fragment has " +
                      std::to_string(cols_of(fragment)) + " columns");
  }
  if (sync.mode == SyncMode::lb_fg &&
      (sync.n_mutexes == 0 || (sync.n_mutexes & (sync.n_mutexes - 1)) != 0)) {
    throw SchemeError("mutex count must be a power of two");
  }
  if (f == Format::bcsr && sync.mode == SyncMode::lf) {
    throw SchemeError("BCSR kernels support only lb-cg and lb-fg synchronization");
  }
  if (schedule.splits_units && sync.mode == SyncMode::none) {
    throw SchemeError("a schedule that splits rows needs a synchronization mode");
  }

  const std::size_t n_t = schedule.per_tasklet.size();
  std::vector<TaskletOutput<T>> outs(n_t);
  for (std::size_t t = 0; t < n_t; ++t) {
    const TaskletWork &w = schedule.per_tasklet[t];
    std::visit(
        [&](const auto &a) {
          using M = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<M, CsrMatrix<T>>) run_csr(a, x, w, outs[t]);
          else if constexpr (std::is_same_v<M, CooMatrix<T>>) run_coo(a, x, w, outs[t]);
          else if constexpr (std::is_same_v<M, BcsrMatrix<T>>) run_bcsr(a, x, w, outs[t]);
          else run_bcoo(a, x, w, outs[t]);
        },
        fragment);
  }

  BlockShape shape{1, 1};
  if (const auto *b = std::get_if<BcsrMatrix<T>>(&fragment)) shape = b->shape;
  if (const auto *b = std::get_if<BcooMatrix<T>>(&fragment)) shape = b->shape;
  const std::size_t write_bytes = is_blocked(f) ? round_up(shape.r * wd, 8) : 8;

  // Item-granular schedules count the rows they actually touch.
  if (schedule.splits_units) {
    for (auto &o : outs) {
      std::size_t rows = 0;
      for (const Segment &s : o.segments) rows += s.len;
      o.counters.rows_processed = rows;
    }
  }

  bool locked = false;
  if (sync.mode == SyncMode::lb_cg || sync.mode == SyncMode::lb_fg) {
    locked = f == Format::bcsr ? bcsr_needs_locks(shape, wd) : true;
  }

  // lf: a segment whose output word is also touched by another tasklet is
  // parked in scratchpad and merged by tasklet 0.
  std::vector<std::vector<bool>> buffered(n_t);
  if (sync.mode == SyncMode::lf) {
    std::vector<std::size_t> nonempty;
    for (std::size_t t = 0; t < n_t; ++t) {
      buffered[t].assign(outs[t].segments.size(), false);
      if (!outs[t].segments.empty()) nonempty.push_back(t);
    }
    for (std::size_t i = 0; i + 1 < nonempty.size(); ++i) {
      auto &a = outs[nonempty[i]];
      auto &b = outs[nonempty[i + 1]];
      const std::size_t la = a.segments.size() - 1;
      if (overlaps(words_of(a.segments[la], wd), words_of(b.segments[0], wd))) {
        buffered[nonempty[i]][la] = true;
        buffered[nonempty[i + 1]][0] = true;
      }
    }
  }

  CoreResult<T> res;
  res.y.assign(n_rows, T{});
  CoreCounters &cc = res.counters;
  if (sync.mode == SyncMode::lb_cg) cc.mutex_acquisitions.assign(1, 0);
  if (sync.mode == SyncMode::lb_fg) cc.mutex_acquisitions.assign(sync.n_mutexes, 0);

  // Row -> contributions in tasklet order.
  std::map<std::size_t, std::vector<T>> parked;
  std::map<std::size_t, std::size_t> parked_segments; // first row -> segment length
  for (std::size_t t = 0; t < n_t; ++t) {
    TaskletOutput<T> &o = outs[t];
    TaskletCounters &c = o.counters;
    c.segments = o.segments.size();
    for (std::size_t k = 0; k < o.segments.size(); ++k) {
      const Segment &s = o.segments[k];
      const T *v = o.values.data() + s.value_offset;
      if (sync.mode == SyncMode::lf && buffered[t][k]) {
        for (std::size_t i = 0; i < s.len; ++i) parked[s.row + i].push_back(v[i]);
        parked_segments.emplace(s.row, s.len);
        ++cc.lf_buffered;
        continue;
      }
      if (locked) {
        for (std::size_t i = 0; i < s.len; ++i) res.y[s.row + i] = scalar::add(res.y[s.row + i], v[i]);
        ++c.lock_acquisitions;
        const std::size_t m =
            sync.mode == SyncMode::lb_fg ? fine_mutex(s.row * wd, sync.n_mutexes) : 0;
        ++cc.mutex_acquisitions[m];
        c.mram_read_bytes += write_bytes;
      } else {
        for (std::size_t i = 0; i < s.len; ++i) res.y[s.row + i] = v[i];
      }
      c.mram_write_bytes += write_bytes;
    }
  }

  if (!parked.empty()) {
    TaskletCounters &c0 = outs[0].counters;
    for (auto &[row, parts] : parked) {
      T sum = parts[0];
      for (std::size_t i = 1; i < parts.size(); ++i) sum = scalar::add(sum, parts[i]);
      res.y[row] = sum;
      cc.lf_additions += parts.size() - 1;
    }
    // One read-modify-write per distinct parked segment.
    c0.mram_read_bytes += parked_segments.size() * write_bytes;
    c0.mram_write_bytes += parked_segments.size() * write_bytes;
    for (auto &o : outs) {
      o.counters.scratchpad_peak_bytes += 2 * write_bytes;
    }
  }

  cc.tasklets.reserve(n_t);
  for (auto &o : outs) cc.tasklets.push_back(o.counters);
  return res;
}

namespace {

template <class F> std::size_t sum_of(const std::vector<TaskletCounters> &v, F f) {
  std::size_t s = 0;
  for (const auto &t : v) s += f(t);
  return s;
}

} // namespace

std::size_t CoreCounters::nnz() const {
  return sum_of(tasklets, [](const auto &t) { return t.nnz_processed; });
}
std::size_t CoreCounters::rows() const {
  return sum_of(tasklets, [](const auto &t) { return t.rows_processed; });
}
std::size_t CoreCounters::lock_acquisitions() const {
  return sum_of(tasklets, [](const auto &t) { return t.lock_acquisitions; });
}
std::size_t CoreCounters::mul_ops() const {
  return sum_of(tasklets, [](const auto &t) { return t.mul_ops; });
}
std::size_t CoreCounters::mram_read_bytes() const {
  return sum_of(tasklets, [](const auto &t) { return t.mram_read_bytes; });
}
std::size_t CoreCounters::mram_write_bytes() const {
  return sum_of(tasklets, [](const auto &t) { return t.mram_write_bytes; });
}
std::size_t CoreCounters::scratchpad_peak_bytes() const {
  return sum_of(tasklets, [](const auto &t) { return t.scratchpad_peak_bytes; });
}

ImbalanceRatio imbalance_ratio(std::span<const std::size_t> values) {
  ImbalanceRatio r;
  if (values.size() < 2) return r;
  const auto it = std::max_element(values.begin(), values.end());
  const double max = static_cast<double>(*it);
  const double total = static_cast<double>(std::accumulate(values.begin(), values.end(), std::size_t{0}));
  if (total == 0.0) return r;
  const double n = static_cast<double>(values.size());
  r.max_over_mean = max / (total / n);
  const double rest = (total - max) / (n - 1.0);
  r.max_over_rest = rest > 0.0 ? max / rest : std::numeric_limits<double>::infinity();
  return r;
}

ImbalanceMetrics estimate_imbalance(const CoreCounters &counters) {
  std::vector<std::size_t> nnz, rows, locks;
  for (const auto &t : counters.tasklets) {
    nnz.push_back(t.nnz_processed);
    rows.push_back(t.rows_processed);
    locks.push_back(t.lock_acquisitions);
  }
  return {imbalance_ratio(nnz), imbalance_ratio(rows), imbalance_ratio(locks)};
}

ImbalanceMetrics estimate_imbalance(std::span<const CoreCounters> cores) {
  std::vector<std::size_t> nnz, rows, locks;
  for (const auto &c : cores) {
    nnz.push_back(c.nnz());
    rows.push_back(c.rows());
    locks.push_back(c.lock_acquisitions());
  }
  return {imbalance_ratio(nnz), imbalance_ratio(rows), imbalance_ratio(locks)};
}

#define SPARSEP_INSTANTIATE_EXEC(T)                                                          \
  template ThreadSchedule schedule_threads<T>(const AnyMatrix<T> &, Balance, std::size_t);    \
  template CoreResult<T> run_core<T>(const AnyMatrix<T> &, std::span<const T>,               \
                                     const ThreadSchedule &, SyncConfig);

SPARSEP_FOR_EACH_SCALAR(SPARSEP_INSTANTIATE_EXEC)

} // namespace sparsep
