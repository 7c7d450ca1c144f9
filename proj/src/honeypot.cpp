#include "ddoscope/honeypot.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <unordered_map>

#include "ddoscope/error.hpp"

namespace ddoscope {

HoneypotPreset parse_honeypot_preset(std::string_view name) {
  if (name == "amppot") return HoneypotPreset::AmpPot;
  if (name == "hopscotch") return HoneypotPreset::Hopscotch;
  if (name == "newkid") return HoneypotPreset::NewKid;
  throw ConfigError("unknown honeypot preset '" + std::string(name) + "' (want amppot|hopscotch|newkid)");
}

std::string_view to_string(HoneypotPreset preset) {
  switch (preset) {
    case HoneypotPreset::AmpPot: return "amppot";
    case HoneypotPreset::Hopscotch: return "hopscotch";
    case HoneypotPreset::NewKid: return "newkid";
  }
  return "?";
}

AttackDefinition amppot_definition() {
  AttackDefinition d;
  d.key_fields = {KeyField::SrcIp, KeyField::SrcPort, KeyField::DstIp, KeyField::DstPort};
  d.timeout_s = 3600;
  d.pkt_threshold = 100;
  return d;
}

AttackDefinition hopscotch_definition() {
  AttackDefinition d;
  d.key_fields = {KeyField::SrcIp, KeyField::DstIp, KeyField::DstPort};
  d.timeout_s = 900;
  d.pkt_threshold = 5;
  return d;
}

AttackDefinition newkid_mono_definition(int src_prefix_len) {
  AttackDefinition d;
  d.key_fields = {KeyField::SrcPrefix, KeyField::DstIp, KeyField::DstPort};
  d.timeout_s = 60;
  d.pkt_threshold = 5;
  d.src_prefix_len = src_prefix_len;
  return d;
}

AttackDefinition newkid_multi_definition(int src_prefix_len) {
  AttackDefinition d;
  d.key_fields = {KeyField::SrcPrefix, KeyField::DstIp};
  d.timeout_s = 60;
  d.pkt_threshold = 5;
  d.port_threshold = 2;
  d.src_prefix_len = src_prefix_len;
  return d;
}

double preset_timeout_s(HoneypotPreset preset) {
  switch (preset) {
    case HoneypotPreset::AmpPot: return amppot_definition().timeout_s;
    case HoneypotPreset::Hopscotch: return hopscotch_definition().timeout_s;
    case HoneypotPreset::NewKid: return newkid_mono_definition().timeout_s;
  }
  return 0;
}

namespace {

using Key = std::array<std::uint32_t, 6>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto v : k) h = (h ^ v) * 0x100000001b3ull;
    return h;
  }
};

struct OpenFlow {
  Micros first_ts = 0;
  Micros last_ts = 0;
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  std::set<std::uint16_t> dst_ports;
};

Key make_key(const PacketRecord& p, const AttackDefinition& def) {
  Key k{};
  for (auto f : def.key_fields) {
    switch (f) {
      case KeyField::Protocol: k[0] = p.protocol; break;
      case KeyField::SrcIp: k[1] = p.src_ip.value; break;
      case KeyField::SrcPrefix: k[1] = p.src_ip.value & prefix_mask(def.src_prefix_len); break;
      case KeyField::SrcPort: k[2] = p.src_port; break;
      case KeyField::DstIp: k[3] = p.dst_ip.value; break;
      case KeyField::DstPort: k[4] = p.dst_port; break;
    }
  }
  return k;
}

bool has_field(const AttackDefinition& def, KeyField f) {
  return std::find(def.key_fields.begin(), def.key_fields.end(), f) != def.key_fields.end();
}

}  // namespace

std::vector<AttackEvent> detect_honeypot(std::span<const SensorTrace> traces, const AttackDefinition& def,
                                         const std::string& observatory) {
  def.validate();
  if (def.rate_threshold) throw ConfigError("honeypot definitions do not support rate thresholds");
  const bool by_prefix = has_field(def, KeyField::SrcPrefix);
  if (!by_prefix && !has_field(def, KeyField::SrcIp)) {
    throw ConfigError("honeypot definition must key on src_ip or src_prefix");
  }
  const Micros timeout = seconds_to_micros(def.timeout_s);
  const Micros min_duration = def.duration_threshold_s ? seconds_to_micros(*def.duration_threshold_s) : 0;

  std::vector<AttackEvent> events;
  auto close = [&](const PacketRecord& sample, Ipv4 sensor, const OpenFlow& f) {
    if (f.packets < def.pkt_threshold) return;
    if (def.port_threshold && f.dst_ports.size() < *def.port_threshold) return;
    if (f.last_ts - f.first_ts < min_duration) return;
    AttackEvent ev;
    ev.observatory = observatory;
    ev.attack_type = AttackType::RA;
    ev.target = by_prefix ? Prefix{sample.src_ip, def.src_prefix_len} : Prefix::host(sample.src_ip);
    ev.start_ts = f.first_ts;
    ev.end_ts = f.last_ts;
    ev.packets = f.packets;
    ev.bytes = f.bytes;
    ev.sensors = {sensor};
    events.push_back(std::move(ev));
  };

  for (const auto& trace : traces) {
    const auto& packets = trace.packets;
    for (std::size_t i = 1; i < packets.size(); ++i) {
      if (packets[i].ts < packets[i - 1].ts) {
        throw DataError("sensor " + to_string(trace.sensor) + ": packets not time-ordered at record " +
                        std::to_string(i + 1) + " (ts_us=" + std::to_string(packets[i].ts) + ")");
      }
    }
    // The first packet of a flow stands in for its key when building the event.
    std::unordered_map<Key, std::pair<PacketRecord, OpenFlow>, KeyHash> open;
    for (const auto& p : packets) {
      auto [it, fresh] = open.try_emplace(make_key(p, def));
      auto& [sample, f] = it->second;
      if (!fresh && p.ts - f.last_ts > timeout) {
        close(sample, trace.sensor, f);
        f = OpenFlow{};
        fresh = true;
      }
      if (fresh) {
        sample = p;
        f.first_ts = p.ts;
      }
      f.last_ts = p.ts;
      ++f.packets;
      f.bytes += p.len_bytes;
      if (def.port_threshold) f.dst_ports.insert(p.dst_port);
    }
    for (const auto& [key, entry] : open) close(entry.first, trace.sensor, entry.second);
  }
  sort_canonical(events);
  return events;
}

std::vector<AttackEvent> detect_honeypot_preset(std::span<const SensorTrace> traces, HoneypotPreset preset,
                                                const std::string& observatory, int newkid_prefix_len) {
  switch (preset) {
    case HoneypotPreset::AmpPot: return detect_honeypot(traces, amppot_definition(), observatory);
    case HoneypotPreset::Hopscotch: return detect_honeypot(traces, hopscotch_definition(), observatory);
    case HoneypotPreset::NewKid: break;
  }
  auto multi = detect_honeypot(traces, newkid_multi_definition(newkid_prefix_len), observatory);
  auto mono = detect_honeypot(traces, newkid_mono_definition(newkid_prefix_len), observatory);
  std::vector<AttackEvent> out = multi;
  for (auto& ev : mono) {
    const bool covered = std::any_of(multi.begin(), multi.end(), [&](const AttackEvent& m) {
      return m.target == ev.target && m.sensors == ev.sensors && m.start_ts <= ev.end_ts && ev.start_ts <= m.end_ts;
    });
    if (!covered) out.push_back(std::move(ev));
  }
  sort_canonical(out);
  return out;
}

std::vector<AttackEvent> aggregate_sensors(std::span<const AttackEvent> events, double merge_gap_s) {
  if (merge_gap_s < 0) throw ConfigError("merge gap must be non-negative");
  const Micros gap = seconds_to_micros(merge_gap_s);

  std::map<std::tuple<std::string, AttackType, Prefix>, std::vector<AttackEvent>> groups;
  for (const auto& ev : events) groups[{ev.observatory, ev.attack_type, ev.target}].push_back(ev);

  std::vector<AttackEvent> out;
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(), canonical_less);
    AttackEvent cur = group.front();
    for (std::size_t i = 1; i < group.size(); ++i) {
      auto& next = group[i];
      if (next.start_ts <= cur.end_ts + gap) {
        cur.end_ts = std::max(cur.end_ts, next.end_ts);
        cur.packets += next.packets;
        cur.bytes = (cur.bytes && next.bytes) ? std::optional(*cur.bytes + *next.bytes) : std::nullopt;
        cur.source_ips.reset();
        std::vector<Ipv4> sensors;
        std::set_union(cur.sensors.begin(), cur.sensors.end(), next.sensors.begin(), next.sensors.end(),
                       std::back_inserter(sensors));
        cur.sensors = std::move(sensors);
        std::vector<Prefix> members;
        std::set_union(cur.members.begin(), cur.members.end(), next.members.begin(), next.members.end(),
                       std::back_inserter(members));
        cur.members = std::move(members);
      } else {
        out.push_back(std::move(cur));
        cur = std::move(next);
      }
    }
    out.push_back(std::move(cur));
  }
  sort_canonical(out);
  return out;
}

std::vector<SensorTrace> SensorSplit::traces() const {
  std::vector<SensorTrace> out;
  out.reserve(sensors.size());
  for (std::size_t i = 0; i < sensors.size(); ++i) out.push_back({sensors[i], packets[i]});
  return out;
}

SensorSplit split_by_sensor(std::span<const PacketRecord> packets, std::span<const Ipv4> sensors) {
  if (!sensors.empty() && sensors.size() != packets.size()) {
    throw DataError("sensor column length does not match packet count");
  }
  std::map<Ipv4, std::vector<PacketRecord>> by_sensor;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    const Ipv4 sensor = sensors.empty() ? packets[i].dst_ip : sensors[i];
    by_sensor[sensor].push_back(packets[i]);
  }
  SensorSplit split;
  for (auto& [sensor, list] : by_sensor) {
    split.sensors.push_back(sensor);
    split.packets.push_back(std::move(list));
  }
  return split;
}

}  // namespace ddoscope
