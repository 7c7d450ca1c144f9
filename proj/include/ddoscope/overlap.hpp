#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "ddoscope/model.hpp"
#include "ddoscope/prefix_table.hpp"

namespace ddoscope {

enum class TargetMode {
  StartDate,  // one tuple per event: (UTC date of start, host)
  PerDay,     // one tuple per UTC day the event's span touches
};

/// Target tuples of a set of events, sorted and deduplicated. Aggregated
/// events contribute their recorded member hosts; a prefix target without
/// members contributes its network address.
std::vector<TargetTuple> build_targets(std::span<const AttackEvent> events, TargetMode mode);

inline constexpr std::size_t kMaxObservatories = 10;

/// Target sets of up to ten observatories; labels unique, sets deduplicated.
class TargetSetSystem {
 public:
  TargetSetSystem() = default;
  TargetSetSystem(std::vector<std::string> labels, std::vector<std::vector<TargetTuple>> sets);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<TargetTuple>& set(std::size_t i) const { return sets_[i]; }

  /// Membership bitmask (bit i = observatory i) for every tuple in the union.
  std::vector<std::pair<TargetTuple, std::uint32_t>> memberships() const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<TargetTuple>> sets_;
};

/// Observatory labels of a subset mask joined with '&', in system order.
std::string subset_label(const TargetSetSystem& sys, std::uint32_t mask);

/// Exclusive intersection sizes: element `mask` counts the tuples present in
/// exactly the observatories of `mask`. Index 0 is unused and always zero.
std::vector<std::uint64_t> upset_exclusive(const TargetSetSystem& sys);

struct OverlapSeries {
  WeeklySeries a;
  WeeklySeries b;
  WeeklySeries both;
};

/// Weekly sums of daily distinct tuples for two per-day tuple sets and their
/// intersection, over the weeks spanned by either set.
OverlapSeries overlap_timeseries(std::span<const TargetTuple> a, std::span<const TargetTuple> b);

struct NewRecurringWeek {
  Date week;
  std::uint64_t new_targets = 0;
  std::uint64_t recurring = 0;
  std::uint64_t cumulative_new = 0;
};

/// A tuple is new when its address was not seen on any earlier date.
std::vector<NewRecurringWeek> new_vs_recurring(std::span<const TargetTuple> tuples);

struct AsShare {
  enum class Kind { Asn, Other, Unrouted };
  Kind kind = Kind::Asn;
  std::uint32_t asn = 0;  // meaningful for Kind::Asn
  std::uint64_t tuples = 0;
  double share = 0;
};

/// Maps tuples to origin ASNs by longest-prefix match and ranks ASNs by tuple
/// count (ties by ASN). The top_n ASNs are listed, followed by an Other row
/// for the remaining ASNs and an Unrouted row, each only when non-empty.
std::vector<AsShare> as_attribution(std::span<const TargetTuple> tuples, const RoutedPrefixTable& routed,
                                    std::size_t top_n = 10);

/// Lowercase hex SHA-256 of "salt|YYYY-MM-DD|a.b.c.d".
std::string target_digest(const TargetTuple& tuple, std::string_view salt);
std::vector<std::string> hash_targets(std::span<const TargetTuple> tuples, std::string_view salt);

struct SubsetConfirmation {
  std::uint32_t mask = 0;
  std::uint64_t tuples = 0;
  std::uint64_t confirmed = 0;
  double share = 0;  // 0 for empty subsets
};

/// For every non-empty subset, the share of its exclusive tuples whose digest
/// appears in `external`. A salt mismatch cannot be detected and simply
/// yields zero matches.
std::vector<SubsetConfirmation> federated_confirm(const TargetSetSystem& local,
                                                  const std::unordered_set<std::string>& external,
                                                  std::string_view salt);

}  // namespace ddoscope
