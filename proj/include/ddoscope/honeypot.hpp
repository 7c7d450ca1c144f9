#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddoscope/model.hpp"

namespace ddoscope {

enum class HoneypotPreset { AmpPot, Hopscotch, NewKid };

HoneypotPreset parse_honeypot_preset(std::string_view name);  // amppot|hopscotch|newkid
std::string_view to_string(HoneypotPreset preset);

/// AmpPot: (src_ip, src_port, dst_ip, dst_port), 60 min, >= 100 packets.
AttackDefinition amppot_definition();
/// Hopscotch: (src_ip, dst_ip, dst_port), 15 min, >= 5 packets.
AttackDefinition hopscotch_definition();
/// NewKid mono-protocol: (src_prefix, dst_ip, dst_port), 1 min, >= 5 packets.
AttackDefinition newkid_mono_definition(int src_prefix_len = 24);
/// NewKid multi-protocol: (src_prefix, dst_ip), 1 min, >= 5 packets over >= 2 ports.
AttackDefinition newkid_multi_definition(int src_prefix_len = 24);

/// Timeout of the preset's flow definition, the default sensor merge gap.
double preset_timeout_s(HoneypotPreset preset);

/// Packets received by one honeypot sensor, time-ordered.
struct SensorTrace {
  Ipv4 sensor;
  std::span<const PacketRecord> packets;
};

/// Groups each sensor's requests by the definition's key fields, splits a
/// flow whenever the gap between consecutive packets exceeds the timeout, and
/// reports flows that meet the thresholds as RA events against the spoofed
/// source (the victim). Definitions must key on src_ip or src_prefix and may
/// not carry a rate threshold. Unsorted traces throw DataError.
std::vector<AttackEvent> detect_honeypot(std::span<const SensorTrace> traces, const AttackDefinition& def,
                                         const std::string& observatory = "honeypot");

/// Runs a preset. NewKid evaluates both its definitions; a mono-protocol
/// event is dropped when a multi-protocol event on the same target and
/// sensor overlaps it in time.
std::vector<AttackEvent> detect_honeypot_preset(std::span<const SensorTrace> traces, HoneypotPreset preset,
                                                const std::string& observatory = "honeypot",
                                                int newkid_prefix_len = 24);

/// Merges events on the same target (and observatory, attack type) whose
/// spans overlap or are at most merge_gap_s apart: spans are united, packets
/// and bytes summed, sensors unioned.
std::vector<AttackEvent> aggregate_sensors(std::span<const AttackEvent> events, double merge_gap_s);

/// Per-sensor packet lists, ordered by sensor address. When `sensors` is
/// empty the destination address is the sensor.
struct SensorSplit {
  std::vector<Ipv4> sensors;
  std::vector<std::vector<PacketRecord>> packets;

  /// Views into `packets`; valid while this object is alive and unchanged.
  std::vector<SensorTrace> traces() const;
};
SensorSplit split_by_sensor(std::span<const PacketRecord> packets, std::span<const Ipv4> sensors = {});

}  // namespace ddoscope
