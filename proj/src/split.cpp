#include "sparsep/split.hpp"

#include <algorithm>

#include "sparsep/types.hpp"

namespace sparsep {

namespace {

std::vector<std::size_t> prefix_sums(std::span<const std::size_t> w) {
  std::vector<std::size_t> p(w.size() + 1, 0);
  for (std::size_t i = 0; i < w.size(); ++i) p[i + 1] = p[i] + w[i];
  return p;
}

std::size_t first_item_at_or_after(const ItemList &items, std::size_t unit) {
  return static_cast<std::size_t>(
      std::lower_bound(items.unit_row.begin(), items.unit_row.end(), unit) -
      items.unit_row.begin());
}

Split from_unit_boundaries(const ItemList &items, const std::vector<std::size_t> &ub) {
  Split s;
  const std::size_t parts = ub.size() - 1;
  s.parts.resize(parts);
  for (std::size_t k = 0; k < parts; ++k) {
    PartRange &p = s.parts[k];
    p.unit_begin = ub[k];
    p.unit_end = ub[k + 1];
    p.item_begin = first_item_at_or_after(items, p.unit_begin);
    p.item_end = first_item_at_or_after(items, p.unit_end);
  }
  return s;
}

Split from_item_boundaries(const ItemList &items, const std::vector<std::size_t> &ib) {
  Split s;
  const std::size_t parts = ib.size() - 1;
  s.parts.resize(parts);

  std::size_t prev_end = 0;
  std::size_t prev_part = parts; // last nonempty part, none yet
  for (std::size_t k = 0; k < parts; ++k) {
    PartRange &p = s.parts[k];
    p.item_begin = ib[k];
    p.item_end = ib[k + 1];
    if (p.items() == 0) continue;
    const std::size_t first = items.unit_row[p.item_begin];
    const std::size_t last = items.unit_row[p.item_end - 1];
    if (prev_part != parts && first + 1 == prev_end) {
      p.unit_begin = first;
      s.split_units.push_back({first, prev_part, k});
    } else {
      p.unit_begin = prev_end;
    }
    p.unit_end = std::max(last + 1, p.unit_begin);
    prev_end = p.unit_end;
    prev_part = k;
  }

  // Empty parts sit at the start of the next nonempty part, or after the last one.
  std::size_t next_begin = prev_end;
  for (std::size_t k = parts; k-- > 0;) {
    PartRange &p = s.parts[k];
    if (p.items() == 0) {
      p.unit_begin = p.unit_end = next_begin;
    } else {
      next_begin = p.unit_begin;
    }
  }
  if (parts > 0) s.parts.back().unit_end = items.n_units;
  return s;
}

} // namespace

std::size_t even_start(std::size_t n, std::size_t parts, std::size_t k) {
  const std::size_t q = n / parts;
  const std::size_t rem = n % parts;
  return k * q + std::min(k, rem);
}

std::vector<std::size_t> greedy_boundaries(std::span<const std::size_t> prefix, std::size_t parts) {
  const std::size_t n = prefix.size() - 1;
  const std::size_t total = prefix.back();
  std::vector<std::size_t> b(parts + 1, 0);
  b[parts] = n;
  for (std::size_t k = 1; k < parts; ++k) {
    const auto target = static_cast<unsigned __int128>(k) * total;
    auto it = std::partition_point(prefix.begin(), prefix.end(), [&](std::size_t v) {
      return static_cast<unsigned __int128>(v) * parts < target;
    });
    b[k] = std::min(n, static_cast<std::size_t>(it - prefix.begin()));
  }
  return b;
}

std::vector<std::size_t> nearest_boundaries(std::span<const std::size_t> prefix, std::size_t parts) {
  const std::size_t n = prefix.size() - 1;
  const std::size_t total = prefix.back();
  std::vector<std::size_t> b(parts + 1, 0);
  b[parts] = n;
  auto dist = [&](std::size_t i, __int128 target) {
    const __int128 d = static_cast<__int128>(prefix[i]) * static_cast<__int128>(parts) - target;
    return d < 0 ? -d : d;
  };
  for (std::size_t k = 1; k < parts; ++k) {
    const __int128 target = static_cast<__int128>(k) * static_cast<__int128>(total);
    auto it = std::partition_point(prefix.begin(), prefix.end(), [&](std::size_t v) {
      return static_cast<__int128>(v) * static_cast<__int128>(parts) < target;
    });
    std::size_t i = std::min(n, static_cast<std::size_t>(it - prefix.begin()));
    if (i > 0 && dist(i - 1, target) <= dist(i, target)) --i;
    b[k] = std::max(i, b[k - 1]);
  }
  return b;
}

Split split_items(const ItemList &items, SplitMode mode, std::size_t parts, std::size_t chunk) {
  if (parts == 0) throw SchemeError("cannot split into zero parts");
  if (chunk == 0) chunk = 1;
  const std::size_t n_items = items.unit_row.size();

  switch (mode) {
  case SplitMode::units_even: {
    const std::size_t n_chunks = ceil_div(items.n_units, chunk);
    std::vector<std::size_t> ub(parts + 1);
    for (std::size_t k = 0; k <= parts; ++k) {
      ub[k] = std::min(items.n_units, even_start(n_chunks, parts, k) * chunk);
    }
    return from_unit_boundaries(items, ub);
  }
  case SplitMode::units_greedy: {
    const std::size_t n_chunks = ceil_div(items.n_units, chunk);
    std::vector<std::size_t> w(n_chunks, 0);
    for (std::size_t i = 0; i < n_items; ++i) w[items.unit_row[i] / chunk] += items.weight[i];
    auto ub = greedy_boundaries(prefix_sums(w), parts);
    for (auto &b : ub) b = std::min(items.n_units, b * chunk);
    return from_unit_boundaries(items, ub);
  }
  case SplitMode::items_even: {
    std::vector<std::size_t> ib(parts + 1);
    for (std::size_t k = 0; k <= parts; ++k) ib[k] = even_start(n_items, parts, k);
    return from_item_boundaries(items, ib);
  }
  case SplitMode::items_greedy:
    return from_item_boundaries(items, greedy_boundaries(prefix_sums(items.weight), parts));
  }
  throw SchemeError("unknown split mode");
}

} // namespace sparsep
