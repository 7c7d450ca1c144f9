#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddoscope/flow.hpp"
#include "ddoscope/model.hpp"
#include "ddoscope/prefix_table.hpp"

namespace ddoscope::io {

inline constexpr std::string_view kPacketsHeader = "ts_us,protocol,src_ip,src_port,dst_ip,dst_port,len_bytes,tcp_flags";
inline constexpr std::string_view kAttacksHeader = "observatory,attack_type,target,start_ts_us,end_ts_us,packets,sensors";
inline constexpr std::string_view kFlowsHeader =
    "target_ip,protocol,src_port,distinct_src_ips,bitrate_bps,start_ts_us,end_ts_us";
inline constexpr std::string_view kRoutedHeader = "prefix,asn";
inline constexpr std::string_view kAllocHeader = "prefix,registry";
inline constexpr std::string_view kTargetsHeader = "date,ip";

/// Packets plus, when the file carries a trailing sensor_ip column, the sensor
/// of each packet (same length as `packets`, otherwise empty).
struct PacketTable {
  std::vector<PacketRecord> packets;
  std::vector<Ipv4> sensors;
};

// Readers report "<source>:<line>: <reason>" in a DataError.
PacketTable read_packets(std::istream& in, const std::string& source = "packets.csv");
PacketTable read_packets(const std::filesystem::path& path);
void write_packets(std::ostream& out, std::span<const PacketRecord> packets);
void write_packets(const std::filesystem::path& path, std::span<const PacketRecord> packets);

/// Events with non-empty `members` add a trailing members column.
std::vector<AttackEvent> read_attacks(std::istream& in, const std::string& source = "attacks.csv");
std::vector<AttackEvent> read_attacks(const std::filesystem::path& path);
void write_attacks(std::ostream& out, std::span<const AttackEvent> events);
void write_attacks(const std::filesystem::path& path, std::span<const AttackEvent> events);

std::vector<FlowSummary> read_flows(std::istream& in, const std::string& source = "flows.csv");
std::vector<FlowSummary> read_flows(const std::filesystem::path& path);
void write_flows(std::ostream& out, std::span<const FlowSummary> flows);
void write_flows(const std::filesystem::path& path, std::span<const FlowSummary> flows);

RoutedPrefixTable read_routed(std::istream& in, const std::string& source = "routed.csv");
RoutedPrefixTable read_routed(const std::filesystem::path& path);
AllocationTable read_alloc(std::istream& in, const std::string& source = "alloc.csv");
AllocationTable read_alloc(const std::filesystem::path& path);

std::vector<TargetTuple> read_targets(std::istream& in, const std::string& source = "targets.csv");
std::vector<TargetTuple> read_targets(const std::filesystem::path& path);
void write_targets(std::ostream& out, std::span<const TargetTuple> tuples);
void write_targets(const std::filesystem::path& path, std::span<const TargetTuple> tuples);

std::vector<std::string> read_digests(std::istream& in, const std::string& source = "hashes.txt");
std::vector<std::string> read_digests(const std::filesystem::path& path);

/// series.json: {"label", "start_week": "YYYY-MM-DD", "values": [number|null, ...]}
std::string series_to_json(const WeeklySeries& series);
WeeklySeries series_from_json(std::string_view text, const std::string& source = "series.json");
WeeklySeries read_series(const std::filesystem::path& path);
void write_series(const std::filesystem::path& path, const WeeklySeries& series);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: to a sibling temp file, then renames.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ddoscope::io
