#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sparsep/types.hpp"

namespace sparsep {

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet &, const Triplet &) = default;
};

/// Where a matrix came from. Symmetric inputs keep the stored entry count
/// alongside the expanded one.
struct MatrixMeta {
  std::string field = "real";
  std::string symmetry = "general";
  std::size_t stored_entries = 0;
};

/// Raw nonzero set before format encoding.
struct TripletMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<Triplet> entries;
  MatrixMeta meta;

  std::size_t nnz() const { return entries.size(); }

  /// Sorts entries by (row, col). Throws on out-of-range indices or
  /// duplicate coordinates.
  void canonicalize();
  bool is_canonical() const;
};

struct MatrixStats {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::size_t nnz = 0;
  double sparsity = 0.0;
  double nnz_r_std = 0.0;
  double nnz_c_std = 0.0;
  std::size_t max_row_nnz = 0;
  std::size_t max_col_nnz = 0;
  std::size_t empty_row_count = 0;
};

/// Parses MatrixMarket coordinate data (real/integer/pattern, general or
/// symmetric). Symmetric input is expanded to full storage; pattern entries
/// get value 1.
TripletMatrix parse_matrix_market(std::istream &in);
TripletMatrix parse_matrix_market(std::string_view text);
TripletMatrix read_matrix_market(const std::string &path);

/// Writes the canonical triplets as a general real coordinate file.
void write_matrix_market(std::ostream &out, const TripletMatrix &m);

enum class GeneratorKind { banded, uniform_random, power_law, block_pattern };

std::string_view to_string(GeneratorKind k);
GeneratorKind parse_generator_kind(std::string_view s);

enum class ValueKind {
  small_int, ///< nonzero integers in [-max_abs_int, max_abs_int]
  unit_real  ///< uniform reals in [-1, 1]
};

struct GeneratorParams {
  std::size_t nnz = 0;       ///< target nonzeros (uniform-random, power-law)
  std::size_t bandwidth = 0; ///< half bandwidth for banded
  double exponent = 2.1;     ///< zeta exponent for power-law, must be > 1
  std::size_t block_r = 4;
  std::size_t block_c = 4;
  std::size_t n_blocks = 0; ///< dense blocks for block-pattern
  ValueKind values = ValueKind::small_int;
  int max_abs_int = 3;
};

/// Deterministic synthetic n x n matrix for a fixed seed.
TripletMatrix generate_synthetic(GeneratorKind kind, std::size_t n,
                                 const GeneratorParams &params, std::uint64_t seed);

/// Exact structure statistics with population standard deviations.
MatrixStats compute_stats(const TripletMatrix &m);

std::vector<std::size_t> row_counts(const TripletMatrix &m);
std::vector<std::size_t> col_counts(const TripletMatrix &m);

} // namespace sparsep
