#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddoscope/flow.hpp"
#include "ddoscope/model.hpp"

namespace ddoscope::synth {

enum class AttackKind { RSDoS, DirectNonSpoofed, Reflection };
enum class Spoofing { Uniform, None };

std::string_view to_string(AttackKind kind);

struct AttackSpec {
  AttackKind kind = AttackKind::RSDoS;
  Prefix victim;          // host or carpet-bombed prefix
  double start_s = 0;     // offset from the scenario start
  double duration_s = 0;
  double rate_pps = 0;    // per reflector for reflection attacks
  std::uint32_t packet_bytes = 110;
  std::uint32_t reflector_subset = 0;  // sensors used (reflection only)
  Spoofing spoof = Spoofing::Uniform;
  std::uint16_t port = 0;              // service / amplification port; 0 picks the kind's default
  std::uint64_t sources = 50;          // bots for non-spoofed direct-path attacks
  std::uint64_t extra_reflectors = 0;  // reflectors outside the honeypot set (flow view only)
};

struct Background {
  double telescope_pps = 0;  // unsolicited scan packets, single-packet sources
  double honeypot_pps = 0;   // scan requests spread over all sensors
};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  Date start_date = std::chrono::sys_days{std::chrono::year{2019} / 1 / 7};
  double duration_s = 0;
  std::uint64_t telescope_addresses = 1;
  Prefix telescope_prefix{Ipv4{0x2c000000u}, 8};  // 44.0.0.0/8; dst addresses wrap inside n_addresses
  std::vector<Ipv4> honeypot_sensors;
  std::vector<AttackSpec> attacks;
  Background background;

  /// Throws ConfigError for inconsistent specs.
  void validate() const;
};

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const ScenarioSpec& spec);

/// Expected visibility of one attack under default detector settings.
/// "yes"/"no" are certain up to sampling noise several standard deviations
/// out; "marginal" attacks are excluded from recovery scoring.
struct AttackTruth {
  std::size_t index = 0;
  AttackKind kind = AttackKind::RSDoS;
  Prefix victim;
  Micros start_ts = 0;
  Micros end_ts = 0;
  double telescope_expected_pps = 0;
  double telescope_expected_packets = 0;
  std::string telescope_detectable = "no";
  std::vector<Ipv4> honeypot_sensors;
  std::uint64_t honeypot_packets_per_sensor = 0;
  std::map<std::string, bool> honeypot_detectable;  // preset name -> certain detection
  std::optional<FlowSummary> flow;
  std::string flow_class = "none";  // RA, DP or none under default IXP thresholds
};

struct Output {
  std::vector<PacketRecord> telescope;
  std::vector<Ipv4> sensors;                      // configured sensors, ascending
  std::vector<std::vector<PacketRecord>> honeypot;  // one trace per entry of `sensors`
  std::vector<FlowSummary> flows;
  std::vector<AttackTruth> truth;
};

/// Emits every observatory's view of the scenario. Each attack draws from its
/// own mt19937_64 substream seeded by SplitMix64(seed, attack index), so
/// adding an attack never changes another attack's packets. Outputs are
/// sorted canonically and identical for any `threads`.
Output generate(const ScenarioSpec& spec, unsigned threads = 1);

nlohmann::ordered_json truth_to_json(const std::vector<AttackTruth>& truth);

/// telescope.csv, honeypot/<sensor>.csv, flows.csv, ground_truth.json.
void write_output(const std::filesystem::path& dir, const Output& output);

/// SplitMix64 finalizer, used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ddoscope::synth
