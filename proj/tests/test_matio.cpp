#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "oracle.hpp"
#include "sparsep/formats.hpp"
#include "sparsep/matio.hpp"
#include "suite.hpp"

using namespace sparsep;

TEST_CASE("parse: general real file is transcribed zero based") {
  const TripletMatrix m =
      parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 5\n2 2 7\n");
  CHECK(m.n_rows == 2);
  CHECK(m.n_cols == 2);
  REQUIRE(m.nnz() == 2);
  CHECK(m.entries[0] == Triplet{0, 0, 5.0});
  CHECK(m.entries[1] == Triplet{1, 1, 7.0});
}

TEST_CASE("parse: symmetric off-diagonal entry expands to both triangles") {
  const TripletMatrix m =
      parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 3\n");
  REQUIRE(m.nnz() == 2);
  CHECK(m.entries[0] == Triplet{0, 1, 3.0});
  CHECK(m.entries[1] == Triplet{1, 0, 3.0});
  CHECK(m.meta.stored_entries == 1);
}

TEST_CASE("parse: symmetric diagonal is not duplicated") {
  const TripletMatrix m = parse_matrix_market(
      "%%MatrixMarket matrix coordinate integer symmetric\n3 3 3\n1 1 2\n3 1 4\n3 3 1\n");
  CHECK(m.nnz() == 4);
}

TEST_CASE("parse: pattern entries get value one and comments are skipped") {
  const TripletMatrix m = parse_matrix_market(
      "%%MatrixMarket matrix coordinate pattern general\n% note\n\n3 4 2\n1 4\n3 2\n");
  CHECK(m.n_cols == 4);
  REQUIRE(m.nnz() == 2);
  CHECK(m.entries[0] == Triplet{0, 3, 1.0});
  CHECK(m.entries[1] == Triplet{2, 1, 1.0});
}

TEST_CASE("parse: malformed input is rejected") {
  CHECK_THROWS_AS(parse_matrix_market(""), ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1\n"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_matrix_market("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"),
      ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n"),
      ParseError);
  CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1\n"),
                  ParseError);
}

TEST_CASE("parse: errors carry the offending line") {
  try {
    parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n9 1 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("round trip: write then parse reproduces the canonical triplets") {
  for (const auto &[name, m] : suite::matrices(ValueKind::unit_real)) {
    CAPTURE(name);
    std::ostringstream out;
    write_matrix_market(out, m);
    const TripletMatrix back = parse_matrix_market(out.str());
    CHECK(back.n_rows == m.n_rows);
    CHECK(back.n_cols == m.n_cols);
    CHECK(back.entries == m.entries);
  }
}

TEST_CASE("generate: banded with zero bandwidth is the identity pattern") {
  GeneratorParams p;
  p.bandwidth = 0;
  const TripletMatrix m = generate_synthetic(GeneratorKind::banded, 4, p, 99);
  REQUIRE(m.nnz() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.entries[i].row == i);
    CHECK(m.entries[i].col == i);
  }
}

TEST_CASE("generate: power-law rows are more skewed than uniform rows") {
  GeneratorParams p;
  p.nnz = 5000;
  p.exponent = 2.1;
  const auto pl = compute_stats(generate_synthetic(GeneratorKind::power_law, 1000, p, 7));
  const auto ur = compute_stats(generate_synthetic(GeneratorKind::uniform_random, 1000, p, 7));
  CHECK(pl.nnz_r_std > ur.nnz_r_std);
}

TEST_CASE("generate: block pattern nonzeros fill whole dense blocks") {
  GeneratorParams p;
  p.n_blocks = 2;
  const TripletMatrix m = generate_synthetic(GeneratorKind::block_pattern, 8, p, 5);
  CHECK(m.nnz() == 32);
  // Independent blocker: distinct (row / 4, col / 4) pairs.
  std::vector<bool> seen(4, false);
  for (const auto &t : m.entries) seen[(t.row / 4) * 2 + t.col / 4] = true;
  CHECK(std::count(seen.begin(), seen.end(), true) == 2);
  CHECK(to_bcsr<std::int32_t>(m).n_blocks() == 2);
}

TEST_CASE("generate: deterministic for a seed and sensitive to it") {
  GeneratorParams p;
  p.nnz = 3000;
  const auto a = generate_synthetic(GeneratorKind::power_law, 400, p, 3);
  const auto b = generate_synthetic(GeneratorKind::power_law, 400, p, 3);
  const auto c = generate_synthetic(GeneratorKind::power_law, 400, p, 4);
  CHECK(a.entries == b.entries);
  CHECK_FALSE(a.entries == c.entries);
  const auto sa = compute_stats(a), sb = compute_stats(b);
  CHECK(std::memcmp(&sa, &sb, sizeof sa) == 0);
}

TEST_CASE("generate: degenerate parameters are rejected") {
  GeneratorParams p;
  CHECK_THROWS_AS(generate_synthetic(GeneratorKind::uniform_random, 10, p, 1), GeneratorError);
  CHECK_THROWS_AS(generate_synthetic(GeneratorKind::power_law, 10, p, 1), GeneratorError);
  CHECK_THROWS_AS(generate_synthetic(GeneratorKind::block_pattern, 10, p, 1), GeneratorError);
  p.bandwidth = 10;
  CHECK_THROWS_AS(generate_synthetic(GeneratorKind::banded, 10, p, 1), GeneratorError);
  p.nnz = 10;
  p.exponent = 1.0;
  CHECK_THROWS_AS(generate_synthetic(GeneratorKind::power_law, 10, p, 1), GeneratorError);
  CHECK_THROWS_AS(parse_generator_kind("lattice"), GeneratorError);
  CHECK(parse_generator_kind("power-law") == GeneratorKind::power_law);
}

TEST_CASE("generate: suite matrices respect the size envelope") {
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    CHECK(m.n_rows <= 512);
    CHECK(m.nnz() <= 20000);
    CHECK(m.nnz() > 0);
    CHECK(m.is_canonical());
  }
}

TEST_CASE("stats: identity") {
  GeneratorParams p;
  const auto s = compute_stats(generate_synthetic(GeneratorKind::banded, 4, p, 1));
  CHECK(s.sparsity == doctest::Approx(0.25));
  CHECK(s.nnz_r_std == 0.0);
  CHECK(s.nnz_c_std == 0.0);
}

TEST_CASE("stats: population standard deviation of row counts") {
  TripletMatrix m{4, 8, {}, {}};
  for (std::size_t j = 0; j < 5; ++j) m.entries.push_back({0, j, 1.0});
  for (std::size_t i = 1; i < 4; ++i) m.entries.push_back({i, 0, 1.0});
  m.canonicalize();
  const auto s = compute_stats(m);
  CHECK(s.nnz_r_std == doctest::Approx(std::sqrt(3.0)));
  CHECK(s.max_row_nnz == 5);
  CHECK(s.max_col_nnz == 4);
  CHECK(s.empty_row_count == 0);
}

TEST_CASE("stats: matches direct counts on the suite") {
  for (const auto &[name, m] : suite::matrices()) {
    CAPTURE(name);
    const auto s = compute_stats(m);
    const auto rc = oracle::row_nnz(m);
    double mean = static_cast<double>(m.nnz()) / m.n_rows, var = 0.0;
    for (std::size_t c : rc) var += (c - mean) * (c - mean);
    CHECK(s.nnz_r_std == doctest::Approx(std::sqrt(var / m.n_rows)));
    CHECK(s.sparsity == doctest::Approx(double(m.nnz()) / (double(m.n_rows) * m.n_cols)));
    CHECK(row_counts(m) == rc);
  }
}

TEST_CASE("stats: empty matrix is an error") {
  TripletMatrix m{3, 3, {}, {}};
  CHECK_THROWS_AS(compute_stats(m), Error);
}

TEST_CASE("canonicalize: sorts and rejects duplicates and out of range entries") {
  TripletMatrix m{2, 2, {{1, 0, 1.0}, {0, 1, 2.0}}, {}};
  CHECK_FALSE(m.is_canonical());
  m.canonicalize();
  CHECK(m.is_canonical());
  CHECK(m.entries[0].row == 0);
  TripletMatrix d{2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}, {}};
  CHECK_THROWS_AS(d.canonicalize(), Error);
  TripletMatrix o{2, 2, {{2, 0, 1.0}}, {}};
  CHECK_THROWS_AS(o.canonicalize(), Error);
}
