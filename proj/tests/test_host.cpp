#include <doctest.h>

#include <cstring>
#include <numeric>
#include <sstream>

#include "oracle.hpp"
#include "sparsep/host.hpp"
#include "sparsep/reference.hpp"
#include "suite.hpp"

using namespace sparsep;

namespace {

TripletMatrix identity(std::size_t n) {
  TripletMatrix m{n, n, {}, {}};
  for (std::size_t i = 0; i < n; ++i) m.entries.push_back({i, i, 1.0});
  return m;
}

SchemeId scheme(std::string_view name, std::size_t cores, std::size_t vertical,
                DType t = DType::i32) {
  SchemeId s = parse_scheme(name);
  s.n_cores = cores;
  s.n_vertical = s.info().is_2d() ? vertical : 1;
  s.dtype = t;
  return s;
}

} // namespace

TEST_CASE("pipeline: identity returns x for every scheme variant") {
  const TripletMatrix m = identity(64);
  const MachineConfig cfg = default_machine("pim-A");
  std::vector<std::int32_t> x(64);
  std::iota(x.begin(), x.end(), 1);
  for (SchemeId s : expand_all_variants()) {
    CAPTURE(s.name());
    s.n_cores = 16;
    s.n_vertical = s.info().is_2d() ? 4 : 1;
    const auto r = run_pipeline<std::int32_t>(m, s, cfg, x);
    CHECK(r.y == x);
    if (s.kernel == "COO.nnz") CHECK(r.summary.merge_additions <= s.n_cores);
  }
}

TEST_CASE("pipeline: every variant matches the oracle on the suite (int32)") {
  const MachineConfig cfg = default_machine("pim-A");
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    const auto x = make_input_vector<std::int32_t>(m.n_cols, 7);
    const auto want = oracle::spmv<std::int32_t>(m, x);
    for (SchemeId s : expand_all_variants()) {
      CAPTURE(s.name());
      s.n_cores = 48;
      s.n_vertical = s.info().is_2d() ? 3 : 1;
      CHECK(run_pipeline<std::int32_t>(m, s, cfg, x).y == want);
    }
  }
}

TEST_CASE("pipeline: 1D load bytes are P N w exactly") {
  const MachineConfig cfg = default_machine("pim-A");
  const TripletMatrix m = suite::matrices()[9].m;
  const auto x = make_input_vector<float>(m.n_cols, 1);
  for (std::size_t p : {64, 128, 256}) {
    const auto r = run_pipeline<float>(m, scheme("COO.nnz", p, 1, DType::f32), cfg, x);
    CHECK(r.summary.load.useful_bytes == p * m.n_cols * 4);
  }
}

TEST_CASE("pipeline: equally-sized merge needs V-1 additions per row") {
  const MachineConfig cfg = default_machine("pim-A");
  const TripletMatrix m = suite::matrices()[4].m;
  const auto x = make_input_vector<std::int64_t>(m.n_cols, 1);
  for (std::size_t v : {1, 2, 4, 8}) {
    const auto r = run_pipeline<std::int64_t>(m, scheme("DCSR", 32, v, DType::i64), cfg, x);
    CHECK(r.summary.merge_additions == (v - 1) * m.n_rows);
    CHECK(r.summary.retrieve.useful_bytes == v * m.n_rows * 8);
  }
}

TEST_CASE("pipeline: 1D retrieve bytes are rows plus split-row extras") {
  const MachineConfig cfg = default_machine("pim-A");
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    const auto x = make_input_vector<std::int32_t>(m.n_cols, 1);
    const auto r = run_pipeline<std::int32_t>(m, scheme("COO.nnz", 64, 1), cfg, x);
    CHECK(r.summary.retrieve.useful_bytes == (m.n_rows + r.split_rows.size()) * 4);
    CHECK(r.summary.merge_additions == r.split_rows.size());
    CHECK(r.summary.merge_additions <= 64);
  }
}

TEST_CASE("pipeline: values do not depend on the machine or on host workers") {
  const TripletMatrix m = suite::matrices(ValueKind::unit_real)[13].m;
  const auto x = make_input_vector<float>(m.n_cols, 2);
  const SchemeId s = scheme("RBDCOO", 64, 4, DType::f32);
  MachineConfig slow = default_machine("pim-A");
  slow.bus_bandwidth_per_rank = 1e6;
  slow.host_merge_throughput = 1e3;
  const auto a = run_pipeline<float>(m, s, default_machine("pim-A"), x);
  const auto b = run_pipeline<float>(m, s, default_machine("pim-B"), x);
  const auto c = run_pipeline<float>(m, s, slow, x, {8});
  CHECK(std::memcmp(a.y.data(), b.y.data(), a.y.size() * sizeof(float)) == 0);
  CHECK(std::memcmp(a.y.data(), c.y.data(), a.y.size() * sizeof(float)) == 0);
  CHECK(c.summary.end_to_end() > a.summary.end_to_end());
  const auto d = run_pipeline<float>(m, s, default_machine("pim-A"), x, {8});
  CHECK(summary_json(a.summary) == summary_json(d.summary));
}

TEST_CASE("pipeline: end to end time is the sum of phases and GOp/s uses 2 nnz") {
  const MachineConfig cfg = default_machine("pim-A");
  const TripletMatrix m = suite::matrices()[8].m;
  const RunSummary s = run_summary(m, scheme("BDCOO", 128, 4), cfg);
  const auto &p = s.phase_seconds;
  CHECK(s.end_to_end() == p.load + p.kernel + p.retrieve + p.merge);
  CHECK(p.load > 0.0);
  CHECK(p.kernel > 0.0);
  CHECK(p.retrieve > 0.0);
  CHECK(p.merge > 0.0);
  CHECK(s.gops() == doctest::Approx(2.0 * m.nnz() / s.end_to_end() / 1e9));
}

TEST_CASE("pipeline: retrieve padding by granularity is ordered") {
  const MachineConfig cfg = default_machine("pim-A");
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    for (std::string_view k : {"DCOO", "RBDCOO", "BDCSR", "RBDBCOO.nnz"}) {
      const RunSummary s = run_summary(m, scheme(k, 256, 8), cfg);
      const auto &g = s.retrieve_padding_by_granularity;
      CHECK(g[2] <= g[1]);
      CHECK(g[1] <= g[0]);
    }
  }
}

TEST_CASE("pipeline: invalid requests are rejected") {
  const MachineConfig cfg = default_machine("pim-B");
  const TripletMatrix m = identity(8);
  const std::vector<std::int32_t> x(8, 1), short_x(7, 1);
  CHECK_THROWS_AS(run_pipeline<std::int32_t>(m, scheme("COO.nnz", 4096, 1), cfg, x), SchemeError);
  CHECK_THROWS_AS(run_pipeline<std::int32_t>(m, scheme("COO.nnz", 4, 1), cfg, short_x), SchemeError);
  CHECK_THROWS_AS(run_pipeline<std::int32_t>(m, scheme("COO.nnz", 4, 1, DType::f32), cfg, x),
                  SchemeError);
}

TEST_CASE("merge_partials: pass-through, split rows and gaps") {
  const std::vector<std::int32_t> a{1, 2, 3}, b{4, 5};
  std::size_t adds = 99;
  const PartialResult<std::int32_t> one[] = {{0, a}};
  CHECK(merge_partials<std::int32_t>(3, one, &adds) == a);
  CHECK(adds == 0);
  const PartialResult<std::int32_t> split[] = {{0, a}, {2, b}};
  CHECK(merge_partials<std::int32_t>(4, split, &adds) == std::vector<std::int32_t>{1, 2, 7, 5});
  CHECK(adds == 1);
  CHECK_THROWS_AS(merge_partials<std::int32_t>(6, split), Error);
}

TEST_CASE("merge_partials: V partials per element sum in core order") {
  const TripletMatrix m = suite::matrices(ValueKind::unit_real)[7].m;
  const auto x = make_input_vector<double>(m.n_cols, 3);
  const auto r = run_pipeline<double>(m, scheme("DCOO", 64, 8, DType::f64), default_machine("pim-A"), x);
  CHECK(outputs_match<double>(r.y, oracle::spmv<double>(m, x)));
}

TEST_CASE("sweep: a single candidate is the best") {
  const TripletMatrix m = suite::matrices()[3].m;
  const SchemeId one[] = {scheme("CSR.nnz", 64, 1)};
  const std::size_t cores[] = {64}, verticals[] = {2};
  const SweepResult r = sweep(m, one, cores, verticals, default_machine("pim-A"));
  REQUIRE(r.rows.size() == 1);
  CHECK(r.best == 0);
}

TEST_CASE("sweep: grid, ordering, tie-breaks and CSV") {
  const TripletMatrix m = suite::matrices()[9].m;
  const SchemeId schemes[] = {scheme("COO.nnz", 64, 1), scheme("DCOO", 64, 2)};
  const std::size_t cores[] = {64, 128}, verticals[] = {2, 4, 3};
  const SweepResult r = sweep(m, schemes, cores, verticals, default_machine("pim-A"));
  // COO.nnz: 2 core counts; DCOO: 2 core counts x 2 dividing verticals.
  CHECK(r.rows.size() == 6);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto &b = r.rows[r.best];
    const auto &o = r.rows[i];
    CHECK(std::tuple(b.end_to_end(), b.scheme.n_cores, b.scheme.n_vertical) <=
          std::tuple(o.end_to_end(), o.scheme.n_cores, o.scheme.n_vertical));
  }
  std::ostringstream a, b;
  write_sweep_csv(a, r);
  write_sweep_csv(b, sweep(m, schemes, cores, verticals, default_machine("pim-A"), 1, {4}));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind(std::string(kSweepCsvVersion), 0) == 0);
  std::size_t lines = 0;
  for (char ch : a.str()) lines += ch == '\n';
  CHECK(lines == 2 + r.rows.size());
}

TEST_CASE("report json carries the output and per-core data on request") {
  const TripletMatrix m = identity(16);
  const std::vector<std::int64_t> x(16, 2);
  const auto r = run_pipeline<std::int64_t>(m, scheme("COO.nnz", 4, 1, DType::i64),
                                            default_machine("pim-A"), x);
  const std::string with = report_json(r, true, true);
  const std::string without = report_json(r, false, false);
  CHECK(with.find("\"y\"") != std::string::npos);
  CHECK(with.find("\"cores\"") != std::string::npos);
  CHECK(without.find("\"y\"") == std::string::npos);
  CHECK(without.find("\"phase_seconds\"") != std::string::npos);
}
