#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ddoscope/ip.hpp"

namespace ddoscope {

struct RoutedEntry {
  Prefix prefix;
  std::uint32_t asn = 0;

  bool operator==(const RoutedEntry&) const = default;
};

/// Routed prefixes with origin ASNs. Overlapping prefixes are allowed and the
/// most specific one wins a lookup. When a prefix appears more than once the
/// lowest origin ASN is kept.
class RoutedPrefixTable {
 public:
  RoutedPrefixTable() = default;
  explicit RoutedPrefixTable(const std::vector<RoutedEntry>& entries);

  std::optional<RoutedEntry> longest_match(Ipv4 ip) const;
  /// Most specific entry that contains the whole of `prefix`.
  std::optional<RoutedEntry> longest_covering(const Prefix& prefix) const;

  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }
  std::vector<RoutedEntry> entries() const;

 private:
  // One hash map per prefix length, keyed by network address.
  std::array<std::unordered_map<std::uint32_t, std::uint32_t>, 33> by_length_;
  std::uint64_t present_lengths_ = 0;  // bit i set when by_length_[i] is non-empty
  std::size_t size_ = 0;
};

inline std::optional<RoutedEntry> longest_prefix_match(const RoutedPrefixTable& table, Ipv4 ip) {
  return table.longest_match(ip);
}

struct AllocationBlock {
  Prefix prefix;
  std::string registry;

  bool operator==(const AllocationBlock&) const = default;
};

/// Registry allocations; blocks must be pairwise disjoint (DataError otherwise).
class AllocationTable {
 public:
  AllocationTable() = default;
  explicit AllocationTable(std::vector<AllocationBlock> blocks);

  /// Block that fully contains `prefix`, if any.
  std::optional<AllocationBlock> find(const Prefix& prefix) const;

  bool empty() const { return blocks_.empty(); }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<AllocationBlock>& blocks() const { return blocks_; }

 private:
  std::vector<AllocationBlock> blocks_;  // sorted by network address
};

}  // namespace ddoscope
