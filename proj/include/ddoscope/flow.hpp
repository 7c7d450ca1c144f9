#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ddoscope/model.hpp"

namespace ddoscope {

/// Per-target traffic summary as exported by a flow monitor.
struct FlowSummary {
  Ipv4 target_ip;
  std::uint8_t protocol = 0;
  std::uint16_t src_port = 0;
  std::uint64_t distinct_src_ips = 1;
  double bitrate_bps = 0;  // peak
  Micros start_ts = 0;
  Micros end_ts = 0;

  bool operator==(const FlowSummary&) const = default;
};

/// DNS, NTP, CLDAP, SSDP, CHARGEN, QOTD, RPC portmapper, memcached, SNMP.
const std::set<std::uint16_t>& default_amplification_ports();

struct FlowThresholds {
  std::uint64_t min_sources = 10;
  double ra_min_bps = 1e9;   // strict
  double dp_min_bps = 100e6; // strict
};

/// RA iff UDP from an amplification port, DP iff TCP; both need
/// distinct_src_ips >= min_sources and a bitrate strictly above the threshold.
std::optional<AttackEvent> classify_flow(const FlowSummary& flow, const std::set<std::uint16_t>& ampl_ports,
                                         const FlowThresholds& thresholds = {},
                                         const std::string& observatory = "flow");

std::vector<AttackEvent> detect_flow(std::span<const FlowSummary> flows, const std::set<std::uint16_t>& ampl_ports,
                                     const FlowThresholds& thresholds = {},
                                     const std::string& observatory = "flow");

}  // namespace ddoscope
