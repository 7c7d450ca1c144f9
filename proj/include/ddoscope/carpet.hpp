#pragma once

#include <span>
#include <vector>

#include "ddoscope/model.hpp"
#include "ddoscope/prefix_table.hpp"

namespace ddoscope {

struct CarpetOptions {
  double concurrency_gap_s = 60;
  std::size_t min_targets = 2;
  int min_prefix_len = 11;
  int max_prefix_len = 28;
};

/// Merges concurrent attacks on nearby addresses into one prefix-level event.
///
/// Events are grouped per (observatory, attack type) into temporal clusters:
/// sorted by start, an event joins the running cluster when it starts no
/// later than concurrency_gap_s after the cluster's latest end. Inside a
/// cluster, targets are grouped by the allocation block containing them;
/// targets outside every block never merge. For each group with at least
/// min_targets distinct targets, the most specific routed prefix covering all
/// of them is looked up; if its length lies in [min_prefix_len,
/// max_prefix_len] the group becomes one event targeting that prefix (span
/// united, packets summed, sensors unioned, member targets recorded).
/// Otherwise the group is split on the first bit after its common prefix and
/// each half is tried again. Unmerged events pass through unchanged, and
/// events that already carry members are never merged again.
///
/// Empty routed or allocation tables throw ConfigError.
std::vector<AttackEvent> aggregate_carpet(std::span<const AttackEvent> events, const RoutedPrefixTable& routed,
                                          const AllocationTable& alloc, const CarpetOptions& options = {});

}  // namespace ddoscope
