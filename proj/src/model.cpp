#include "ddoscope/model.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "ddoscope/error.hpp"

namespace ddoscope {

std::string format_tcp_flags(std::uint8_t flags) {
  std::string out;
  if (flags & tcp::kSyn) out += 'S';
  if (flags & tcp::kAck) out += 'A';
  if (flags & tcp::kRst) out += 'R';
  if (flags & tcp::kFin) out += 'F';
  return out;
}

std::uint8_t parse_tcp_flags(std::string_view text) {
  std::uint8_t flags = 0;
  for (char c : text) {
    switch (c) {
      case 'S': flags |= tcp::kSyn; break;
      case 'A': flags |= tcp::kAck; break;
      case 'R': flags |= tcp::kRst; break;
      case 'F': flags |= tcp::kFin; break;
      default: throw DataError("unknown TCP flag '" + std::string(1, c) + "' in '" + std::string(text) + "'");
    }
  }
  return flags;
}

void validate(const PacketRecord& p) {
  if (p.ts < 0) throw DataError("negative timestamp");
  if (p.len_bytes < 20) throw DataError("len_bytes below 20");
  const bool ported = p.protocol == kProtoTcp || p.protocol == kProtoUdp;
  if (!ported && (p.src_port != 0 || p.dst_port != 0)) {
    throw DataError("non-zero port for protocol " + std::to_string(p.protocol));
  }
  if (p.protocol != kProtoTcp && p.tcp_flags != 0) {
    throw DataError("TCP flags set on protocol " + std::to_string(p.protocol));
  }
}

std::string_view to_string(AttackType type) {
  switch (type) {
    case AttackType::RSDoS: return "RSDoS";
    case AttackType::RA: return "RA";
    case AttackType::DP: return "DP";
  }
  return "?";
}

AttackType parse_attack_type(std::string_view text) {
  if (text == "RSDoS") return AttackType::RSDoS;
  if (text == "RA") return AttackType::RA;
  if (text == "DP") return AttackType::DP;
  throw DataError("unknown attack type '" + std::string(text) + "'");
}

namespace {
constexpr std::array<std::pair<KeyField, std::string_view>, 6> kKeyFieldNames{{
    {KeyField::Protocol, "protocol"},
    {KeyField::SrcIp, "src_ip"},
    {KeyField::SrcPrefix, "src_prefix"},
    {KeyField::SrcPort, "src_port"},
    {KeyField::DstIp, "dst_ip"},
    {KeyField::DstPort, "dst_port"},
}};
}  // namespace

std::string_view to_string(KeyField field) {
  for (const auto& [f, name] : kKeyFieldNames) {
    if (f == field) return name;
  }
  return "?";
}

KeyField parse_key_field(std::string_view text) {
  for (const auto& [f, name] : kKeyFieldNames) {
    if (name == text) return f;
  }
  throw ConfigError("unknown key field '" + std::string(text) + "'");
}

void AttackDefinition::validate() const {
  if (key_fields.empty()) throw ConfigError("attack definition needs at least one key field");
  if (!(timeout_s > 0)) throw ConfigError("timeout must be positive");
  if (pkt_threshold < 1) throw ConfigError("pkt_threshold must be >= 1");
  if (duration_threshold_s && *duration_threshold_s < 0) throw ConfigError("duration_threshold must be >= 0");
  if (rate_threshold) {
    const auto& r = *rate_threshold;
    if (!(r.slide_s > 0 && r.window_s > r.slide_s)) throw ConfigError("rate threshold needs window > slide > 0");
    if (r.packets < 1) throw ConfigError("rate threshold packets must be >= 1");
  }
  if (port_threshold && *port_threshold < 1) throw ConfigError("port_threshold must be >= 1");
  const bool has_prefix =
      std::find(key_fields.begin(), key_fields.end(), KeyField::SrcPrefix) != key_fields.end();
  if (has_prefix && (src_prefix_len < 11 || src_prefix_len > 32)) {
    throw ConfigError("src_prefix_len must lie in [11, 32]");
  }
}

bool canonical_less(const AttackEvent& a, const AttackEvent& b) {
  return std::tie(a.start_ts, a.target, a.end_ts, a.attack_type, a.observatory, a.packets, a.bytes,
                  a.sensors, a.source_ips, a.members) <
         std::tie(b.start_ts, b.target, b.end_ts, b.attack_type, b.observatory, b.packets, b.bytes,
                  b.sensors, b.source_ips, b.members);
}

void sort_canonical(std::vector<AttackEvent>& events) {
  std::sort(events.begin(), events.end(), canonical_less);
}

}  // namespace ddoscope
