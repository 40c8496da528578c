#include <doctest.h>

#include <set>

#include "sparsep/scheme.hpp"

using namespace sparsep;

TEST_CASE("registry: 25 kernels with unique names, 1D first") {
  const auto reg = kernel_registry();
  REQUIRE(reg.size() == 25);
  std::set<std::string_view> names;
  for (const KernelInfo &k : reg) names.insert(k.name);
  CHECK(names.size() == 25);
  std::size_t one_d = 0;
  for (const KernelInfo &k : reg) one_d += !k.is_2d();
  CHECK(one_d == 9);
  for (std::size_t i = 0; i < one_d; ++i) CHECK_FALSE(reg[i].is_2d());
}

TEST_CASE("registry: partition counts per 2D family") {
  std::size_t es = 0, ew = 0, vs = 0;
  for (const KernelInfo &k : kernel_registry()) {
    es += k.partitioning == Partitioning::equally_sized;
    ew += k.partitioning == Partitioning::equally_wide;
    vs += k.partitioning == Partitioning::variable_sized;
    CHECK(k.allows(k.default_sync));
    CHECK(k.allows(k.default_thread_balance));
  }
  CHECK(es == 4);
  CHECK(ew == 6);
  CHECK(vs == 6);
}

TEST_CASE("parse_scheme: suffixes and aliases") {
  SchemeId s = parse_scheme("COO.nnz-lb-fg");
  CHECK(s.kernel == "COO.nnz");
  CHECK(s.sync == SyncMode::lb_fg);
  CHECK(s.name() == "COO.nnz-lb-fg");
  CHECK(parse_scheme("COO.nnz").sync == SyncMode::lf);
  CHECK(parse_scheme("RBDBCSR").kernel == "RBDBCSR.block");
  CHECK(parse_scheme("BDBCOO.nnz-lb-cg").kernel == "BDBCOO.nnz");
  CHECK(parse_scheme("DCOO").n_vertical == 2);
  CHECK(parse_scheme("CSR.row").n_vertical == 1);
  CHECK(parse_scheme("CSR.row").name() == "CSR.row");
  CHECK_THROWS_AS(parse_scheme("CSR.row-lf"), SchemeError);
  CHECK_THROWS_AS(parse_scheme("ELL"), SchemeError);
  CHECK_THROWS_AS(parse_scheme("BCSR.nnz-lf"), SchemeError);
  CHECK_THROWS_AS(parse_scheme("COO.nnz-xx"), SchemeError);
}

TEST_CASE("scheme names round trip for every variant") {
  const auto all = expand_all_variants();
  CHECK(all.size() > 25);
  std::set<std::pair<std::string, Balance>> seen;
  for (const SchemeId &s : all) {
    CAPTURE(s.name());
    const SchemeId back = parse_scheme(s.name());
    CHECK(back.kernel == s.kernel);
    CHECK(back.sync == s.sync);
    validate_scheme(s);
    CHECK(seen.insert({s.name(), s.thread_balance}).second);
  }
}

TEST_CASE("validate_scheme: rejects unsupported combinations") {
  SchemeId s = parse_scheme("CSR.row");
  s.thread_balance = Balance::nnz;
  CHECK_THROWS_AS(validate_scheme(s), SchemeError);
  s = parse_scheme("DCOO");
  s.n_cores = 10;
  s.n_vertical = 4;
  CHECK_THROWS_AS(validate_scheme(s), SchemeError);
  s = parse_scheme("COO.nnz");
  s.n_vertical = 2;
  CHECK_THROWS_AS(validate_scheme(s), SchemeError);
  s = parse_scheme("COO.nnz");
  s.n_cores = 0;
  CHECK_THROWS_AS(validate_scheme(s), SchemeError);
}

TEST_CASE("split_mode: format and balance pairs") {
  CHECK(split_mode(Format::csr, Balance::rows) == SplitMode::units_even);
  CHECK(split_mode(Format::coo, Balance::nnz_rgrn) == SplitMode::units_greedy);
  CHECK(split_mode(Format::coo, Balance::nnz) == SplitMode::items_even);
  CHECK(split_mode(Format::bcsr, Balance::blocks) == SplitMode::units_greedy);
  CHECK(split_mode(Format::bcoo, Balance::blocks) == SplitMode::items_even);
  CHECK(split_mode(Format::bcoo, Balance::nnz) == SplitMode::items_greedy);
  CHECK_THROWS_AS(split_mode(Format::csr, Balance::nnz), SchemeError);
  CHECK_THROWS_AS(split_mode(Format::bcsr, Balance::rows), SchemeError);
}

TEST_CASE("enum names round trip") {
  for (Balance b : {Balance::rows, Balance::nnz_rgrn, Balance::nnz, Balance::blocks}) {
    CHECK(parse_balance(to_string(b)) == b);
  }
  for (SyncMode s : {SyncMode::none, SyncMode::lb_cg, SyncMode::lb_fg, SyncMode::lf}) {
    CHECK(parse_sync(to_string(s)) == s);
  }
  for (DType t : kAllDTypes) CHECK(parse_dtype(to_string(t)) == t);
}
