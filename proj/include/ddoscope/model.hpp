#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddoscope/ip.hpp"
#include "ddoscope/time.hpp"

namespace ddoscope {

inline constexpr std::uint8_t kProtoIcmp = 1;
inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoUdp = 17;

namespace tcp {
inline constexpr std::uint8_t kSyn = 0x1;
inline constexpr std::uint8_t kAck = 0x2;
inline constexpr std::uint8_t kRst = 0x4;
inline constexpr std::uint8_t kFin = 0x8;
}  // namespace tcp

/// Letters from {S,A,R,F} in canonical order; "" when no flags are set.
std::string format_tcp_flags(std::uint8_t flags);
std::uint8_t parse_tcp_flags(std::string_view text);

/// One packet or request observed at a sensor.
struct PacketRecord {
  Micros ts = 0;
  std::uint8_t protocol = 0;
  Ipv4 src_ip;
  std::uint16_t src_port = 0;
  Ipv4 dst_ip;
  std::uint16_t dst_port = 0;
  std::uint32_t len_bytes = 20;
  std::uint8_t tcp_flags = 0;

  bool operator==(const PacketRecord&) const = default;
};

/// Throws DataError when a record breaks the packet invariants.
void validate(const PacketRecord& packet);

enum class AttackType { RSDoS, RA, DP };

std::string_view to_string(AttackType type);
AttackType parse_attack_type(std::string_view text);

enum class KeyField { Protocol, SrcIp, SrcPrefix, SrcPort, DstIp, DstPort };

std::string_view to_string(KeyField field);
KeyField parse_key_field(std::string_view text);

struct RateThreshold {
  std::uint64_t packets = 30;
  double window_s = 60;
  double slide_s = 10;
};

/// Parameterized flow-based detection rule.
struct AttackDefinition {
  std::vector<KeyField> key_fields;
  double timeout_s = 300;
  std::uint64_t pkt_threshold = 1;
  std::optional<double> duration_threshold_s;
  std::optional<RateThreshold> rate_threshold;
  std::optional<std::uint32_t> port_threshold;
  int src_prefix_len = 24;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

struct AttackEvent {
  std::string observatory;
  AttackType attack_type = AttackType::RSDoS;
  Prefix target;
  Micros start_ts = 0;
  Micros end_ts = 0;
  std::uint64_t packets = 0;
  std::optional<std::uint64_t> bytes;
  std::vector<Ipv4> sensors;  // sorted, unique
  std::optional<std::uint64_t> source_ips;
  // Host targets an aggregated event was built from; empty for plain events.
  std::vector<Prefix> members;

  bool operator==(const AttackEvent&) const = default;
};

/// Total order used for every emitted event list: start, target, end, then
/// the remaining fields.
bool canonical_less(const AttackEvent& a, const AttackEvent& b);
void sort_canonical(std::vector<AttackEvent>& events);

struct TargetTuple {
  Date date;
  Ipv4 ip;

  friend bool operator==(const TargetTuple& a, const TargetTuple& b) {
    return a.date == b.date && a.ip == b.ip;
  }
  friend bool operator<(const TargetTuple& a, const TargetTuple& b) {
    return a.date != b.date ? a.date < b.date : a.ip < b.ip;
  }
};

/// Week-indexed values; std::nullopt marks missing data and is never imputed.
struct WeeklySeries {
  Date start_week;
  std::vector<std::optional<double>> values;
  std::string label;

  std::size_t size() const { return values.size(); }
  Date week(std::size_t index) const { return start_week + std::chrono::days{7 * static_cast<long>(index)}; }
};

}  // namespace ddoscope

template <>
struct std::hash<ddoscope::TargetTuple> {
  std::size_t operator()(const ddoscope::TargetTuple& t) const noexcept {
    const auto day = static_cast<std::uint64_t>(t.date.time_since_epoch().count());
    return std::hash<std::uint64_t>{}((day << 32) ^ t.ip.value);
  }
};
