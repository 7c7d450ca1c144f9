#include "ddoscope/ip.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <stdexcept>

#include "ddoscope/error.hpp"

namespace ddoscope {

Ipv4 parse_ipv4(std::string_view text) {
  if (text.find(':') != std::string_view::npos) {
    throw DataError("IPv6 address not supported: '" + std::string(text) + "'");
  }
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') {
        throw DataError("malformed IPv4 address: '" + std::string(text) + "'");
      }
      ++p;
    }
    unsigned part = 0;
    auto [next, ec] = std::from_chars(p, end, part);
    if (ec != std::errc{} || next == p || next - p > 3 || part > 255) {
      throw DataError("malformed IPv4 address: '" + std::string(text) + "'");
    }
    value = (value << 8) | part;
    p = next;
  }
  if (p != end) {
    throw DataError("malformed IPv4 address: '" + std::string(text) + "'");
  }
  return Ipv4{value};
}

std::string to_string(Ipv4 ip) {
  std::string out;
  out.reserve(15);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out += std::to_string((ip.value >> shift) & 0xffu);
    if (shift > 0) out += '.';
  }
  return out;
}

Prefix parse_prefix(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Prefix::host(parse_ipv4(text));
  }
  const auto addr = parse_ipv4(text.substr(0, slash));
  const auto len_text = text.substr(slash + 1);
  int length = -1;
  auto [next, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), length);
  if (ec != std::errc{} || next != len_text.data() + len_text.size() || length < 0 || length > 32) {
    throw DataError("malformed prefix length: '" + std::string(text) + "'");
  }
  return Prefix{addr, length};
}

std::string to_string(const Prefix& prefix) {
  return to_string(prefix.network()) + "/" + std::to_string(prefix.length());
}

namespace {

int common_length(std::uint32_t a, std::uint32_t b) {
  return std::countl_zero(a ^ b);  // 32 when equal
}

}  // namespace

Prefix covering_prefix(std::span<const Ipv4> ips) {
  if (ips.empty()) throw std::invalid_argument("covering_prefix: empty set");
  const auto first = ips.front().value;
  int length = 32;
  for (const auto ip : ips) {
    length = std::min(length, common_length(first, ip.value));
  }
  return Prefix{ips.front(), length};
}

Prefix covering_prefix(std::span<const Prefix> prefixes) {
  if (prefixes.empty()) throw std::invalid_argument("covering_prefix: empty set");
  const auto first = prefixes.front().network().value;
  int length = 32;
  for (const auto& p : prefixes) {
    length = std::min({length, p.length(), common_length(first, p.network().value)});
  }
  return Prefix{prefixes.front().network(), length};
}

}  // namespace ddoscope
