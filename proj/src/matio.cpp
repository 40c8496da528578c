#include "sparsep/matio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace sparsep {

std::string_view to_string(DType t) {
  switch (t) {
  case DType::i8: return "int8";
  case DType::i16: return "int16";
  case DType::i32: return "int32";
  case DType::i64: return "int64";
  case DType::f32: return "fp32";
  case DType::f64: return "fp64";
  }
  return "?";
}

DType parse_dtype(std::string_view s) {
  for (DType t : kAllDTypes) {
    if (s == to_string(t)) return t;
  }
  throw SchemeError("unknown data type '" + std::string(s) + "'");
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tok;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tok.push_back(line.substr(i, j - i));
    i = j;
  }
  return tok;
}

std::size_t parse_count(std::string_view s, std::size_t line, const char *what) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

double parse_value(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError(line, "invalid value '" + std::string(s) + "'");
  }
  return v;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

} // namespace

void TripletMatrix::canonicalize() {
  for (const Triplet &t : entries) {
    if (t.row >= n_rows || t.col >= n_cols) {
      throw Error("entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                  ") out of range for " + std::to_string(n_rows) + "x" +
                  std::to_string(n_cols) + " matrix");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet &a, const Triplet &b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const Triplet &a, const Triplet &b) {
                                  return a.row == b.row && a.col == b.col;
                                });
  if (dup != entries.end()) {
    throw Error("duplicate entry (" + std::to_string(dup->row) + ", " +
                std::to_string(dup->col) + ")");
  }
}

bool TripletMatrix::is_canonical() const {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Triplet &t = entries[k];
    if (t.row >= n_rows || t.col >= n_cols) return false;
    if (k > 0) {
      const Triplet &p = entries[k - 1];
      if (p.row > t.row || (p.row == t.row && p.col >= t.col)) return false;
    }
  }
  return true;
}

TripletMatrix parse_matrix_market(std::istream &in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(1, "empty input");
  ++lineno;
  auto head = split_ws(line);
  if (head.size() != 5 || lower(head[0]) != "%%matrixmarket") {
    throw ParseError(lineno, "missing %%MatrixMarket header");
  }
  if (lower(head[1]) != "matrix") throw ParseError(lineno, "object must be 'matrix'");
  if (lower(head[2]) != "coordinate") {
    throw ParseError(lineno, "only coordinate format is supported");
  }
  TripletMatrix m;
  m.meta.field = lower(head[3]);
  m.meta.symmetry = lower(head[4]);
  const bool pattern = m.meta.field == "pattern";
  if (m.meta.field != "real" && m.meta.field != "integer" && m.meta.field != "double" &&
      !pattern) {
    throw ParseError(lineno, "unsupported field '" + m.meta.field + "'");
  }
  const bool symmetric = m.meta.symmetry == "symmetric";
  if (!symmetric && m.meta.symmetry != "general") {
    throw ParseError(lineno, "unsupported symmetry '" + m.meta.symmetry + "'");
  }

  // size line
  std::size_t declared = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    auto tok = split_ws(line);
    if (tok.size() != 3) throw ParseError(lineno, "size line needs rows, cols, entries");
    m.n_rows = parse_count(tok[0], lineno, "row count");
    m.n_cols = parse_count(tok[1], lineno, "column count");
    declared = parse_count(tok[2], lineno, "entry count");
    have_size = true;
    break;
  }
  if (!have_size) throw ParseError(lineno, "missing size line");
  m.meta.stored_entries = declared;

  std::vector<std::size_t> origin; // source line of each entry
  m.entries.reserve(symmetric ? 2 * declared : declared);
  origin.reserve(m.entries.capacity());
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    auto tok = split_ws(line);
    if (tok.size() != (pattern ? 2u : 3u)) {
      throw ParseError(lineno, "expected " + std::to_string(pattern ? 2 : 3) + " fields");
    }
    if (seen == declared) throw ParseError(lineno, "more entries than declared");
    std::size_t i = parse_count(tok[0], lineno, "row index");
    std::size_t j = parse_count(tok[1], lineno, "column index");
    if (i < 1 || i > m.n_rows || j < 1 || j > m.n_cols) {
      throw ParseError(lineno, "index (" + std::to_string(i) + ", " + std::to_string(j) +
                                   ") out of declared bounds");
    }
    double v = pattern ? 1.0 : parse_value(tok[2], lineno);
    m.entries.push_back({i - 1, j - 1, v});
    origin.push_back(lineno);
    if (symmetric && i != j) {
      m.entries.push_back({j - 1, i - 1, v});
      origin.push_back(lineno);
    }
    ++seen;
  }
  if (seen != declared) {
    throw ParseError(lineno, "expected " + std::to_string(declared) + " entries, found " +
                                 std::to_string(seen));
  }

  std::vector<std::size_t> order(m.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Triplet &x = m.entries[a];
    const Triplet &y = m.entries[b];
    if (x.row != y.row) return x.row < y.row;
    if (x.col != y.col) return x.col < y.col;
    return origin[a] < origin[b];
  });
  std::vector<Triplet> sorted;
  sorted.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Triplet &t = m.entries[order[k]];
    if (!sorted.empty() && sorted.back().row == t.row && sorted.back().col == t.col) {
      throw ParseError(origin[order[k]], "duplicate entry (" + std::to_string(t.row + 1) +
                                             ", " + std::to_string(t.col + 1) + ")");
    }
    sorted.push_back(t);
  }
  m.entries = std::move(sorted);
  return m;
}

TripletMatrix parse_matrix_market(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_matrix_market(in);
}

TripletMatrix read_matrix_market(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_matrix_market(in);
}

void write_matrix_market(std::ostream &out, const TripletMatrix &m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.n_rows << ' ' << m.n_cols << ' ' << m.nnz() << '\n';
  char buf[64];
  for (const Triplet &t : m.entries) {
    auto res = std::to_chars(buf, buf + sizeof(buf), t.value);
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << std::string_view(buf, res.ptr - buf)
        << '\n';
  }
}

std::string_view to_string(GeneratorKind k) {
  switch (k) {
  case GeneratorKind::banded: return "banded";
  case GeneratorKind::uniform_random: return "uniform-random";
  case GeneratorKind::power_law: return "power-law";
  case GeneratorKind::block_pattern: return "block-pattern";
  }
  return "?";
}

GeneratorKind parse_generator_kind(std::string_view s) {
  for (GeneratorKind k : {GeneratorKind::banded, GeneratorKind::uniform_random,
                          GeneratorKind::power_law, GeneratorKind::block_pattern}) {
    if (s == to_string(k)) return k;
  }
  throw GeneratorError("unknown generator kind '" + std::string(s) + "'");
}

namespace {

class ValueSource {
public:
  ValueSource(const GeneratorParams &p, std::mt19937_64 &rng) : p_(p), rng_(rng) {
    if (p.values == ValueKind::small_int && p.max_abs_int < 1) {
      throw GeneratorError("max_abs_int must be >= 1");
    }
  }

  double next() {
    if (p_.values == ValueKind::unit_real) {
      return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_);
    }
    int mag = std::uniform_int_distribution<int>(1, p_.max_abs_int)(rng_);
    return (rng_() & 1u) ? mag : -mag;
  }

private:
  const GeneratorParams &p_;
  std::mt19937_64 &rng_;
};

// Floyd's sampling: `k` distinct values from [0, n), returned sorted.
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, std::mt19937_64 &rng) {
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(k * 2);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    std::size_t pick = chosen.count(t) ? j : t;
    chosen.insert(pick);
    out.push_back(pick);
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TripletMatrix generate_synthetic(GeneratorKind kind, std::size_t n, const GeneratorParams &p,
                                 std::uint64_t seed) {
  if (n < 1) throw GeneratorError("matrix dimension must be >= 1");
  std::mt19937_64 rng(seed);
  ValueSource values(p, rng);
  TripletMatrix m;
  m.n_rows = n;
  m.n_cols = n;
  m.meta.field = p.values == ValueKind::unit_real ? "real" : "integer";

  switch (kind) {
  case GeneratorKind::banded: {
    if (p.bandwidth >= n) throw GeneratorError("bandwidth must be < n");
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = i >= p.bandwidth ? i - p.bandwidth : 0;
      std::size_t hi = std::min(n - 1, i + p.bandwidth);
      for (std::size_t j = lo; j <= hi; ++j) m.entries.push_back({i, j, values.next()});
    }
    break;
  }
  case GeneratorKind::uniform_random: {
    if (p.nnz == 0) throw GeneratorError("zero nonzeros requested");
    if (p.nnz > n * n) throw GeneratorError("more nonzeros requested than matrix cells");
    for (std::size_t key : sample_distinct(n * n, p.nnz, rng)) {
      m.entries.push_back({key / n, key % n, 0.0});
    }
    for (Triplet &t : m.entries) t.value = values.next();
    break;
  }
  case GeneratorKind::power_law: {
    if (p.nnz == 0) throw GeneratorError("zero nonzeros requested");
    if (!(p.exponent > 1.0)) throw GeneratorError("power-law exponent must be > 1");
    // per-row degree ~ zeta(exponent) truncated to [1, n]
    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      acc += std::pow(static_cast<double>(k), -p.exponent);
      cdf[k - 1] = acc;
    }
    std::vector<std::size_t> degree(n);
    std::size_t drawn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double u = std::uniform_real_distribution<double>(0.0, acc)(rng);
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      degree[i] = std::min<std::size_t>(n, static_cast<std::size_t>(it - cdf.begin()) + 1);
      drawn += degree[i];
    }
    const double scale = static_cast<double>(p.nnz) / static_cast<double>(drawn);
    for (std::size_t i = 0; i < n; ++i) {
      auto d = static_cast<std::size_t>(std::llround(static_cast<double>(degree[i]) * scale));
      degree[i] = std::min(n, d);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (degree[i] == 0) continue;
      for (std::size_t j : sample_distinct(n, degree[i], rng)) {
        m.entries.push_back({i, j, values.next()});
      }
    }
    if (m.entries.empty()) throw GeneratorError("power-law draw produced no nonzeros");
    break;
  }
  case GeneratorKind::block_pattern: {
    if (p.block_r < 1 || p.block_c < 1 || p.block_r > n || p.block_c > n) {
      throw GeneratorError("block dimensions must be in [1, n]");
    }
    const std::size_t grid_r = n / p.block_r;
    const std::size_t grid_c = n / p.block_c;
    if (p.n_blocks == 0) throw GeneratorError("zero blocks requested");
    if (p.n_blocks > grid_r * grid_c) throw GeneratorError("more blocks than block slots");
    for (std::size_t key : sample_distinct(grid_r * grid_c, p.n_blocks, rng)) {
      std::size_t br = key / grid_c;
      std::size_t bc = key % grid_c;
      for (std::size_t i = 0; i < p.block_r; ++i) {
        for (std::size_t j = 0; j < p.block_c; ++j) {
          m.entries.push_back({br * p.block_r + i, bc * p.block_c + j, values.next()});
        }
      }
    }
    break;
  }
  }
  m.meta.stored_entries = m.entries.size();
  m.canonicalize();
  return m;
}

std::vector<std::size_t> row_counts(const TripletMatrix &m) {
  std::vector<std::size_t> c(m.n_rows, 0);
  for (const Triplet &t : m.entries) ++c[t.row];
  return c;
}

std::vector<std::size_t> col_counts(const TripletMatrix &m) {
  std::vector<std::size_t> c(m.n_cols, 0);
  for (const Triplet &t : m.entries) ++c[t.col];
  return c;
}

namespace {

double population_std(const std::vector<std::size_t> &counts, std::size_t total) {
  // n^2 * var = n * sum(k^2) - total^2, evaluated exactly
  unsigned __int128 sum_sq = 0;
  for (std::size_t k : counts) sum_sq += static_cast<unsigned __int128>(k) * k;
  const auto n = static_cast<unsigned __int128>(counts.size());
  const auto t = static_cast<unsigned __int128>(total);
  unsigned __int128 num = n * sum_sq - t * t;
  return std::sqrt(static_cast<long double>(num)) / static_cast<long double>(counts.size());
}

} // namespace

MatrixStats compute_stats(const TripletMatrix &m) {
  if (m.n_rows == 0 || m.n_cols == 0 || m.entries.empty()) {
    throw Error("statistics of an empty matrix are undefined");
  }
  MatrixStats s;
  s.n_rows = m.n_rows;
  s.n_cols = m.n_cols;
  s.nnz = m.nnz();
  s.sparsity = static_cast<double>(s.nnz) /
               (static_cast<double>(m.n_rows) * static_cast<double>(m.n_cols));
  auto rc = row_counts(m);
  auto cc = col_counts(m);
  s.nnz_r_std = population_std(rc, s.nnz);
  s.nnz_c_std = population_std(cc, s.nnz);
  s.max_row_nnz = *std::max_element(rc.begin(), rc.end());
  s.max_col_nnz = *std::max_element(cc.begin(), cc.end());
  s.empty_row_count = static_cast<std::size_t>(std::count(rc.begin(), rc.end(), 0u));
  return s;
}

} // namespace sparsep
