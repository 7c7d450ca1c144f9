#include "ddoscope/flow.hpp"

namespace ddoscope {

const std::set<std::uint16_t>& default_amplification_ports() {
  static const std::set<std::uint16_t> ports{17, 19, 53, 111, 123, 161, 389, 1900, 11211};
  return ports;
}

std::optional<AttackEvent> classify_flow(const FlowSummary& flow, const std::set<std::uint16_t>& ampl_ports,
                                         const FlowThresholds& thresholds, const std::string& observatory) {
  if (flow.distinct_src_ips < thresholds.min_sources) return std::nullopt;

  std::optional<AttackType> type;
  if (flow.protocol == kProtoUdp && ampl_ports.contains(flow.src_port) && flow.bitrate_bps > thresholds.ra_min_bps) {
    type = AttackType::RA;
  } else if (flow.protocol == kProtoTcp && flow.bitrate_bps > thresholds.dp_min_bps) {
    type = AttackType::DP;
  }
  if (!type) return std::nullopt;

  AttackEvent ev;
  ev.observatory = observatory;
  ev.attack_type = *type;
  ev.target = Prefix::host(flow.target_ip);
  ev.start_ts = flow.start_ts;
  ev.end_ts = flow.end_ts;
  ev.source_ips = flow.distinct_src_ips;
  const double seconds = static_cast<double>(flow.end_ts - flow.start_ts) / kMicrosPerSecond;
  ev.bytes = static_cast<std::uint64_t>(flow.bitrate_bps * seconds / 8.0);
  return ev;
}

std::vector<AttackEvent> detect_flow(std::span<const FlowSummary> flows, const std::set<std::uint16_t>& ampl_ports,
                                     const FlowThresholds& thresholds, const std::string& observatory) {
  std::vector<AttackEvent> out;
  for (const auto& f : flows) {
    if (auto ev = classify_flow(f, ampl_ports, thresholds, observatory)) out.push_back(std::move(*ev));
  }
  sort_canonical(out);
  return out;
}

}  // namespace ddoscope
