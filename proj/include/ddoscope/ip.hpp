#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace ddoscope {

/// IPv4 address in host byte order.
struct Ipv4 {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const Ipv4&) const = default;
};

/// Parses a dotted quad. IPv6 literals and anything malformed throw DataError.
Ipv4 parse_ipv4(std::string_view text);
std::string to_string(Ipv4 ip);

constexpr std::uint32_t prefix_mask(int length) {
  return length == 0 ? 0u : ~std::uint32_t{0} << (32 - length);
}

/// IPv4 prefix; the network address is always stored with host bits cleared.
class Prefix {
 public:
  constexpr Prefix() = default;
  constexpr Prefix(Ipv4 addr, int length)
      : network_{addr.value & prefix_mask(length)}, length_{static_cast<std::uint8_t>(length)} {}

  static constexpr Prefix host(Ipv4 ip) { return {ip, 32}; }

  constexpr Ipv4 network() const { return network_; }
  constexpr int length() const { return length_; }
  constexpr Ipv4 last() const { return Ipv4{network_.value | ~prefix_mask(length_)}; }
  constexpr std::uint64_t size() const { return std::uint64_t{1} << (32 - length_); }

  constexpr bool contains(Ipv4 ip) const {
    return (ip.value & prefix_mask(length_)) == network_.value;
  }
  constexpr bool contains(const Prefix& other) const {
    return other.length_ >= length_ && contains(other.network_);
  }

  constexpr auto operator<=>(const Prefix&) const = default;

 private:
  Ipv4 network_{};
  std::uint8_t length_ = 0;
};

/// Accepts "a.b.c.d/n" or a bare address (taken as /32). Host bits are masked.
Prefix parse_prefix(std::string_view text);
std::string to_string(const Prefix& prefix);

/// Longest prefix containing every address. Precondition: non-empty input.
Prefix covering_prefix(std::span<const Ipv4> ips);
/// Longest prefix containing every given prefix. Precondition: non-empty input.
Prefix covering_prefix(std::span<const Prefix> prefixes);

}  // namespace ddoscope

template <>
struct std::hash<ddoscope::Ipv4> {
  std::size_t operator()(ddoscope::Ipv4 ip) const noexcept { return std::hash<std::uint32_t>{}(ip.value); }
};
