#include <doctest.h>

#include <algorithm>

#include "oracle.hpp"
#include "sparsep/part2d.hpp"
#include "suite.hpp"

using namespace sparsep;

namespace {

TripletMatrix identity(std::size_t n) {
  TripletMatrix m{n, n, {}, {}};
  for (std::size_t i = 0; i < n; ++i) m.entries.push_back({i, i, 1.0});
  return m;
}

template <class T = std::int64_t>
TwoDPlan<T> plan(const TripletMatrix &m, std::string_view kernel, std::size_t cores,
                 std::size_t vertical, BlockShape b = {}) {
  return plan_2d<T>(m, find_kernel(kernel), cores, vertical, b);
}

std::vector<std::string_view> two_d_kernels() {
  std::vector<std::string_view> out;
  for (const KernelInfo &k : kernel_registry()) {
    if (k.is_2d()) out.push_back(k.name);
  }
  return out;
}

} // namespace

TEST_CASE("equally-sized: 4x4 identity on four cores and two partitions") {
  const auto p = plan(identity(4), "DCOO", 4, 2);
  REQUIRE(p.cores.size() == 4);
  CHECK(p.col_bounds == std::vector<std::size_t>{0, 2, 4});
  std::vector<std::size_t> nnz;
  for (const auto &f : p.cores) {
    CHECK(f.n_rows() == 2);
    CHECK(f.n_cols() == 2);
    nnz.push_back(f.nnz);
  }
  // Core order is partition major: cores 0 and 3 hold the diagonal tiles.
  CHECK(nnz == std::vector<std::size_t>{2, 0, 0, 2});
  CHECK(merge_requirements(p) == std::vector<std::size_t>{2, 2, 2, 2});
}

TEST_CASE("variable-sized: column weights [6,2,2,6] cut after column 1") {
  CHECK(variable_column_bounds({6, 2, 2, 6}, 2) == std::vector<std::size_t>{0, 2, 4});
  TripletMatrix m{6, 4, {}, {}};
  const std::size_t counts[] = {6, 2, 2, 6};
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < counts[j]; ++i) m.entries.push_back({i, j, 1.0});
  }
  m.canonicalize();
  const auto p = plan(m, "BDCOO", 2, 2);
  CHECK(p.col_bounds == std::vector<std::size_t>{0, 2, 4});
  CHECK(p.cores[0].nnz == 8);
  CHECK(p.cores[1].nnz == 8);
}

TEST_CASE("equally-wide COO: one partition of 8 nonzeros over 2 tiles splits 4/4") {
  TripletMatrix m{3, 8, {}, {}};
  for (std::size_t j = 0; j < 7; ++j) m.entries.push_back({0, j, 1.0});
  m.entries.push_back({2, 0, 1.0});
  const auto p = plan(m, "RBDCOO", 2, 1);
  CHECK(p.cores[0].nnz == 4);
  CHECK(p.cores[1].nnz == 4);
  REQUIRE(p.split_rows.size() == 1);
  CHECK(p.split_rows[0] == SplitRow{0, 0, 1});
}

TEST_CASE("2D: conservation, tile geometry and reassembly for every kernel") {
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    const std::vector<std::int64_t> want = oracle::dense<std::int64_t>(m);
    for (std::string_view k : two_d_kernels()) {
      CAPTURE(k);
      for (auto [cores, vertical] : {std::pair{4, 2}, {12, 3}, {64, 16}, {30, 1}}) {
        const auto p = plan(m, k, cores, vertical);
        REQUIRE(p.cores.size() == std::size_t(cores));
        REQUIRE(p.col_bounds.size() == std::size_t(vertical) + 1);
        CHECK(p.col_bounds.front() == 0);
        CHECK(p.col_bounds.back() == m.n_cols);
        std::vector<std::int64_t> got(m.n_rows * m.n_cols, 0);
        std::size_t total = 0;
        for (std::size_t c = 0; c < p.cores.size(); ++c) {
          const auto &f = p.cores[c];
          const std::size_t v = p.partition_of(c);
          CHECK(f.col_begin == p.col_bounds[v]);
          CHECK(f.col_end == p.col_bounds[v + 1]);
          CHECK(f.row_end <= m.n_rows);
          CHECK(nnz_of(f.matrix) == f.nnz);
          total += f.nnz;
          for (const auto &e : entries_of(f.matrix)) {
            got[(f.row_begin + e.row) * m.n_cols + f.col_begin + e.col] += e.value;
          }
        }
        CHECK(total == m.nnz());
        CHECK(got == want);
        const auto heights = merge_requirements(p);
        for (std::size_t c = 0; c < heights.size(); ++c) CHECK(heights[c] == p.cores[c].n_rows());
      }
    }
  }
}

TEST_CASE("equally-sized: retrieve length is V times the row count") {
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    for (std::size_t v : {1, 2, 4, 8}) {
      const auto h = merge_requirements(plan(m, "DCSR", 32, v));
      std::size_t sum = 0;
      for (std::size_t x : h) sum += x;
      CHECK(sum == v * m.n_rows);
    }
  }
}

TEST_CASE("equally-wide COO: tiles within a partition differ by at most one nonzero") {
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    for (std::size_t v : {1, 2, 4}) {
      for (std::size_t tiles = 1; tiles <= 17; ++tiles) {
        const auto p = plan(m, "RBDCOO", tiles * v, v);
        for (std::size_t part = 0; part < v; ++part) {
          std::size_t lo = SIZE_MAX, hi = 0;
          for (std::size_t i = 0; i < tiles; ++i) {
            lo = std::min(lo, p.cores[part * tiles + i].nnz);
            hi = std::max(hi, p.cores[part * tiles + i].nnz);
          }
          CHECK(hi - lo <= 1);
        }
      }
    }
  }
}

TEST_CASE("more vertical partitions never shrink the retrieved partials") {
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    for (std::string_view k : two_d_kernels()) {
      std::size_t prev = 0;
      for (std::size_t v : {1, 2, 4, 8, 16}) {
        const auto h = merge_requirements(plan(m, k, 64, v));
        std::size_t sum = 0;
        for (std::size_t x : h) sum += x;
        CHECK(sum >= prev);
        prev = sum;
      }
    }
  }
}

TEST_CASE("one vertical partition reproduces the matching 1D plan") {
  const std::pair<std::string_view, std::string_view> pairs[] = {
      {"RBDCSR", "CSR.nnz"},         {"RBDCOO", "COO.nnz"},        {"RBDBCSR.block", "BCSR.block"},
      {"RBDBCSR.nnz", "BCSR.nnz"},   {"RBDBCOO.block", "BCOO.block"}, {"RBDBCOO.nnz", "BCOO.nnz"},
      {"BDCSR", "CSR.nnz"},          {"BDCOO", "COO.nnz"}};
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    for (const auto &[two, one] : pairs) {
      CAPTURE(two);
      const KernelInfo &k1 = find_kernel(one);
      for (std::size_t cores : {1, 5, 32}) {
        const auto p2 = plan(m, two, cores, 1);
        const auto p1 = plan_1d<std::int64_t>(encode<std::int64_t>(m, k1.format), k1, cores);
        REQUIRE(p1.cores.size() == p2.cores.size());
        for (std::size_t c = 0; c < cores; ++c) {
          CHECK(p1.cores[c].row_begin == p2.cores[c].row_begin);
          CHECK(p1.cores[c].row_end == p2.cores[c].row_end);
          CHECK(p1.cores[c].nnz == p2.cores[c].nnz);
        }
        CHECK(p1.split_rows == p2.split_rows);
      }
    }
  }
}

TEST_CASE("2D: invalid grids and 1D kernels are rejected") {
  const TripletMatrix m = identity(8);
  CHECK_THROWS_AS(plan(m, "DCOO", 6, 4), SchemeError);
  CHECK_THROWS_AS(plan(m, "DCOO", 4, 0), SchemeError);
  CHECK_THROWS_AS(plan(m, "DCOO", 2, 4), SchemeError);
  CHECK_THROWS_AS(plan(m, "COO.nnz", 4, 2), SchemeError);
}

TEST_CASE("2D: empty tiles stay assigned to idle cores") {
  const auto p = plan(identity(64), "DCSR", 64, 8);
  std::size_t idle = 0;
  for (const auto &f : p.cores) idle += f.nnz == 0;
  CHECK(idle == 56);
}
