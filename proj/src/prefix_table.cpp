#include "ddoscope/prefix_table.hpp"

#include <algorithm>

#include "ddoscope/error.hpp"

namespace ddoscope {

RoutedPrefixTable::RoutedPrefixTable(const std::vector<RoutedEntry>& entries) {
  for (const auto& e : entries) {
    auto& bucket = by_length_[e.prefix.length()];
    auto [it, inserted] = bucket.try_emplace(e.prefix.network().value, e.asn);
    if (inserted) {
      ++size_;
    } else {
      it->second = std::min(it->second, e.asn);
    }
    present_lengths_ |= std::uint64_t{1} << e.prefix.length();
  }
}

std::optional<RoutedEntry> RoutedPrefixTable::longest_match(Ipv4 ip) const {
  return longest_covering(Prefix::host(ip));
}

std::optional<RoutedEntry> RoutedPrefixTable::longest_covering(const Prefix& prefix) const {
  for (int len = prefix.length(); len >= 0; --len) {
    if (!(present_lengths_ >> len & 1u)) continue;
    const auto net = prefix.network().value & prefix_mask(len);
    const auto& bucket = by_length_[len];
    if (auto it = bucket.find(net); it != bucket.end()) {
      return RoutedEntry{Prefix{Ipv4{net}, len}, it->second};
    }
  }
  return std::nullopt;
}

std::vector<RoutedEntry> RoutedPrefixTable::entries() const {
  std::vector<RoutedEntry> out;
  out.reserve(size_);
  for (int len = 0; len <= 32; ++len) {
    for (const auto& [net, asn] : by_length_[len]) {
      out.push_back({Prefix{Ipv4{net}, len}, asn});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.prefix < b.prefix; });
  return out;
}

AllocationTable::AllocationTable(std::vector<AllocationBlock> blocks) : blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) {
    return a.prefix.network() < b.prefix.network();
  });
  for (std::size_t i = 1; i < blocks_.size(); ++i) {
    if (blocks_[i].prefix.network().value <= blocks_[i - 1].prefix.last().value) {
      throw DataError("allocation blocks overlap: " + to_string(blocks_[i - 1].prefix) + " and " +
                      to_string(blocks_[i].prefix));
    }
  }
}

std::optional<AllocationBlock> AllocationTable::find(const Prefix& prefix) const {
  // Last block whose network address is <= the prefix's network address.
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), prefix.network(),
                             [](Ipv4 ip, const AllocationBlock& b) { return ip < b.prefix.network(); });
  if (it == blocks_.begin()) return std::nullopt;
  --it;
  if (it->prefix.contains(prefix)) return *it;
  return std::nullopt;
}

}  // namespace ddoscope
