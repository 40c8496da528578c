#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsep/formats.hpp"
#include "sparsep/machine.hpp"
#include "sparsep/split.hpp"
#include "sparsep/types.hpp"

namespace sparsep {

enum class Partitioning { one_d, equally_sized, equally_wide, variable_sized };

/// How work is balanced across cores or tasklets.
///  rows      equal row counts (CSR/COO)
///  nnz_rgrn  nonzeros balanced at row granularity (CSR/COO)
///  nnz       nonzeros; exact for COO, per block row for BCSR, per block for BCOO
///  blocks    block counts; per block row for BCSR, per block for BCOO
enum class Balance { rows, nnz_rgrn, nnz, blocks };

enum class SyncMode { none, lb_cg, lb_fg, lf };

std::string_view to_string(Partitioning p);
std::string_view to_string(Balance b);
std::string_view to_string(SyncMode s);
Balance parse_balance(std::string_view s);
SyncMode parse_sync(std::string_view s);

/// One registered SpMV kernel.
struct KernelInfo {
  std::string_view name;
  Format format;
  Partitioning partitioning;
  /// Balance across cores (within a vertical partition for 2D). Unused for
  /// equally-sized tiles.
  Balance core_balance;
  std::vector<Balance> thread_balances; ///< first entry unless overridden
  Balance default_thread_balance;
  std::vector<SyncMode> sync_modes;     ///< {none} for kernels without shared writes
  SyncMode default_sync;

  bool is_2d() const { return partitioning != Partitioning::one_d; }
  bool allows(SyncMode s) const;
  bool allows(Balance b) const;
};

/// The 25 kernels, 1D first, then equally-sized, equally-wide, variable-sized.
std::span<const KernelInfo> kernel_registry();

/// Looks a kernel up by name. Block-format 2D names without a suffix
/// (e.g. "RBDBCSR") resolve to their ".block" variant.
const KernelInfo &find_kernel(std::string_view name);

/// A point in the design space.
struct SchemeId {
  std::string kernel = "COO.nnz";
  SyncMode sync = SyncMode::lf;
  Balance thread_balance = Balance::nnz;
  Granularity granularity = Granularity::rank;
  DType dtype = DType::i32;
  BlockShape block{};
  std::size_t n_cores = 64;
  std::size_t n_vertical = 1;

  const KernelInfo &info() const { return find_kernel(kernel); }
  /// Kernel name plus sync suffix when the kernel has a choice, e.g. "COO.nnz-lf".
  std::string name() const;
};

/// Parses `<kernel>[-lb-cg|-lb-fg|-lf]`; unset fields take the kernel defaults.
SchemeId parse_scheme(std::string_view name);

/// Scheme with every kernel default applied.
SchemeId default_scheme(const KernelInfo &k);

/// Every kernel crossed with every allowed sync mode and thread balance.
std::vector<SchemeId> expand_all_variants();

/// How a (format, balance) pair splits work, across cores or tasklets.
SplitMode split_mode(Format f, Balance b);

/// Throws SchemeError when the combination is not supported.
void validate_scheme(const SchemeId &s);

} // namespace sparsep
