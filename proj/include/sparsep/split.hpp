#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sparsep {

/// Work items in row order. An item is a nonzero (CSR/COO) or a block
/// (BCSR/BCOO); its unit row is the row or block row it belongs to.
struct ItemList {
  std::size_t n_units = 0;             ///< rows or block rows
  std::vector<std::size_t> unit_row;   ///< per item, nondecreasing
  std::vector<std::size_t> weight;     ///< per item, used for greedy balancing
};

enum class SplitMode {
  units_even,   ///< equal unit counts (in chunks), items follow their rows
  units_greedy, ///< weight balanced at unit granularity (in chunks)
  items_even,   ///< equal item counts; a unit may straddle parts
  items_greedy  ///< weight balanced at item granularity; a unit may straddle parts
};

struct PartRange {
  std::size_t unit_begin = 0;
  std::size_t unit_end = 0;
  std::size_t item_begin = 0;
  std::size_t item_end = 0;

  std::size_t units() const { return unit_end - unit_begin; }
  std::size_t items() const { return item_end - item_begin; }
};

/// A unit shared by two adjacent parts.
struct SplitUnit {
  std::size_t unit = 0;
  std::size_t part_a = 0;
  std::size_t part_b = 0;
  friend bool operator==(const SplitUnit &, const SplitUnit &) = default;
};

struct Split {
  std::vector<PartRange> parts;
  std::vector<SplitUnit> split_units;
};

/// Start of part k when `n` things are divided evenly into `parts`; the first
/// n % parts parts get one extra.
std::size_t even_start(std::size_t n, std::size_t parts, std::size_t k);

/// Boundaries b_0 = 0 <= ... <= b_parts = prefix.size() - 1 where b_k is the
/// smallest i with prefix[i] * parts >= k * total. A unit that exactly
/// reaches a target stays with the earlier part.
std::vector<std::size_t> greedy_boundaries(std::span<const std::size_t> prefix, std::size_t parts);

/// Boundaries minimising |prefix[i] * parts - k * total|, ties to the smaller i.
std::vector<std::size_t> nearest_boundaries(std::span<const std::size_t> prefix, std::size_t parts);

/// Splits items into `parts` contiguous ranges.
///
/// Unit ranges are contiguous, ordered, and cover [0, n_units). In the item
/// modes, a part's units run from its first item's unit to one past its last
/// item's unit; the next part starts on that last unit when it continues it,
/// and otherwise right after. Empty parts get empty unit ranges, except that
/// the last part always extends to n_units. `chunk` (unit modes only) aligns
/// every interior unit boundary to a multiple of it.
Split split_items(const ItemList &items, SplitMode mode, std::size_t parts, std::size_t chunk = 1);

} // namespace sparsep
