#include "ddoscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>
#include <tuple>

#include "ddoscope/error.hpp"
#include "ddoscope/io.hpp"
#include "ddoscope/telescope.hpp"

namespace ddoscope::synth {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kBackgroundStream = 0x8000000000000000ull;

// Portable draws on top of mt19937_64; std distributions are implementation
// defined, these are not.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // (0, 1]
  double uniform_open() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Failures before the next success of a Bernoulli(p) sequence.
  std::uint64_t geometric_skip(double p) {
    if (p >= 1.0) return 0;
    const double k = std::floor(std::log(uniform_open()) / std::log1p(-p));
    return k >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(k);
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + kGolden * (index + 1));
}

Ipv4 pick_host(Stream& rng, const Prefix& victim) {
  if (victim.length() == 32) return victim.network();
  return Ipv4{victim.network().value + static_cast<std::uint32_t>(rng.below(victim.size()))};
}

bool packet_less(const PacketRecord& a, const PacketRecord& b) {
  return std::tie(a.ts, a.src_ip, a.dst_ip, a.protocol, a.src_port, a.dst_port, a.len_bytes, a.tcp_flags) <
         std::tie(b.ts, b.src_ip, b.dst_ip, b.protocol, b.src_port, b.dst_port, b.len_bytes, b.tcp_flags);
}

std::uint16_t default_port(AttackKind kind) {
  return kind == AttackKind::Reflection ? 123 : 80;
}

// Timestamp of the i-th packet of a constant-rate train: whole second from
// the rate, uniform jitter within that second.
Micros packet_time(Micros start, std::uint64_t i, double rate, Stream& rng) {
  const double second = std::floor(static_cast<double>(i) / rate);
  return start + static_cast<Micros>((second + rng.uniform01()) * kMicrosPerSecond);
}

struct AttackOutput {
  std::vector<PacketRecord> telescope;
  std::vector<std::pair<Ipv4, PacketRecord>> honeypot;
  std::optional<FlowSummary> flow;
  AttackTruth truth;
};

std::string telescope_verdict(double expected_pps, double expected_packets, double duration_s) {
  const TelescopeConfig defaults;
  const double window_expect = expected_pps * defaults.rate_threshold.window_s;
  const double need_rate = static_cast<double>(defaults.rate_threshold.packets);
  const double need_count = static_cast<double>(defaults.pkt_threshold);
  if (duration_s <= defaults.duration_threshold_s || expected_packets < need_count / 2 ||
      window_expect < need_rate / 2) {
    return "no";
  }
  if (duration_s >= defaults.duration_threshold_s + 30 && expected_packets >= 2 * need_count &&
      window_expect >= 2 * need_rate) {
    return "yes";
  }
  return "marginal";
}

AttackOutput emit_attack(const ScenarioSpec& spec, std::size_t index, Micros scenario_start) {
  const auto& a = spec.attacks[index];
  Stream rng(substream_seed(spec.seed, index));
  AttackOutput out;
  const std::uint16_t port = a.port ? a.port : default_port(a.kind);
  const Micros start = scenario_start + seconds_to_micros(a.start_s);
  const Micros end = start + seconds_to_micros(a.duration_s);
  const auto total = static_cast<std::uint64_t>(std::llround(a.rate_pps * a.duration_s));

  auto& t = out.truth;
  t.index = index;
  t.kind = a.kind;
  t.victim = a.victim;
  t.start_ts = start;
  t.end_ts = end;

  FlowSummary flow;
  flow.target_ip = a.victim.network();
  flow.start_ts = start;
  flow.end_ts = end;
  flow.bitrate_bps = a.rate_pps * a.packet_bytes * 8.0;

  switch (a.kind) {
    case AttackKind::RSDoS: {
      const double p = static_cast<double>(spec.telescope_addresses) / 4294967296.0;
      for (std::uint64_t i = rng.geometric_skip(p); i < total; i += 1 + rng.geometric_skip(p)) {
        PacketRecord r;
        r.ts = packet_time(start, i, a.rate_pps, rng);
        r.protocol = kProtoTcp;
        r.src_ip = pick_host(rng, a.victim);
        r.src_port = port;
        r.dst_ip = Ipv4{spec.telescope_prefix.network().value +
                        static_cast<std::uint32_t>(rng.below(spec.telescope_addresses))};
        r.dst_port = static_cast<std::uint16_t>(1024 + rng.below(64512));
        r.len_bytes = 40;
        r.tcp_flags = tcp::kSyn | tcp::kAck;
        out.telescope.push_back(r);
      }
      const double hosts = static_cast<double>(a.victim.size());
      t.telescope_expected_pps = a.rate_pps * p;
      t.telescope_expected_packets = static_cast<double>(total) * p;
      t.telescope_detectable = telescope_verdict(t.telescope_expected_pps / hosts,
                                                 t.telescope_expected_packets / hosts, a.duration_s);
      flow.protocol = kProtoTcp;
      flow.src_port = 0;
      flow.distinct_src_ips = std::max<std::uint64_t>(1, std::min<std::uint64_t>(total, 1ull << 32));
      break;
    }
    case AttackKind::DirectNonSpoofed:
      flow.protocol = kProtoTcp;
      flow.src_port = 0;
      flow.distinct_src_ips = std::max<std::uint64_t>(1, a.sources);
      break;
    case AttackKind::Reflection: {
      // Partial Fisher-Yates over the sensor list.
      std::vector<Ipv4> pool = spec.honeypot_sensors;
      std::sort(pool.begin(), pool.end());
      for (std::uint32_t k = 0; k < a.reflector_subset; ++k) {
        std::swap(pool[k], pool[k + rng.below(pool.size() - k)]);
      }
      pool.resize(a.reflector_subset);
      std::sort(pool.begin(), pool.end());
      const auto src_port = static_cast<std::uint16_t>(1024 + rng.below(64512));
      for (const auto sensor : pool) {
        for (std::uint64_t i = 0; i < total; ++i) {
          PacketRecord r;
          r.ts = packet_time(start, i, a.rate_pps, rng);
          r.protocol = kProtoUdp;
          r.src_ip = pick_host(rng, a.victim);
          r.src_port = src_port;
          r.dst_ip = sensor;
          r.dst_port = port;
          r.len_bytes = 64;
          out.honeypot.emplace_back(sensor, r);
        }
      }
      t.honeypot_sensors = pool;
      t.honeypot_packets_per_sensor = total;
      // Consecutive requests are less than ceil(1/rate) + 1 seconds apart.
      const double max_gap = std::ceil(1.0 / a.rate_pps) + 1.0;
      const bool host_victim = a.victim.length() == 32;
      t.honeypot_detectable["amppot"] = host_victim && total >= 100 && max_gap <= 3600;
      t.honeypot_detectable["hopscotch"] = host_victim && total >= 5 && max_gap <= 900;
      t.honeypot_detectable["newkid"] = a.victim.length() >= 24 && total >= 5 && max_gap <= 60;
      flow.protocol = kProtoUdp;
      flow.src_port = port;
      flow.distinct_src_ips = std::max<std::uint64_t>(1, a.reflector_subset + a.extra_reflectors);
      flow.bitrate_bps *= a.reflector_subset;
      break;
    }
  }
  if (auto ev = classify_flow(flow, default_amplification_ports())) {
    t.flow_class = std::string(ddoscope::to_string(ev->attack_type));
  }
  t.flow = flow;
  out.flow = flow;
  return out;
}

AttackOutput emit_background(const ScenarioSpec& spec, Micros scenario_start) {
  Stream rng(substream_seed(spec.seed, kBackgroundStream));
  AttackOutput out;
  const auto scans = static_cast<std::uint64_t>(std::llround(spec.background.telescope_pps * spec.duration_s));
  for (std::uint64_t i = 0; i < scans; ++i) {
    PacketRecord r;
    r.ts = scenario_start + static_cast<Micros>(rng.uniform01() * spec.duration_s * kMicrosPerSecond);
    r.protocol = kProtoTcp;
    r.src_ip = Ipv4{static_cast<std::uint32_t>(rng.below(1ull << 32))};
    r.src_port = static_cast<std::uint16_t>(1024 + rng.below(64512));
    r.dst_ip = Ipv4{spec.telescope_prefix.network().value +
                    static_cast<std::uint32_t>(rng.below(spec.telescope_addresses))};
    r.dst_port = static_cast<std::uint16_t>(1 + rng.below(65535));
    r.len_bytes = 40;
    r.tcp_flags = (i % 2) ? tcp::kRst : tcp::kSyn;
    out.telescope.push_back(r);
  }
  if (!spec.honeypot_sensors.empty()) {
    std::vector<Ipv4> sensors = spec.honeypot_sensors;
    std::sort(sensors.begin(), sensors.end());
    const auto requests = static_cast<std::uint64_t>(std::llround(spec.background.honeypot_pps * spec.duration_s));
    for (std::uint64_t i = 0; i < requests; ++i) {
      PacketRecord r;
      r.ts = scenario_start + static_cast<Micros>(rng.uniform01() * spec.duration_s * kMicrosPerSecond);
      r.protocol = kProtoUdp;
      r.src_ip = Ipv4{static_cast<std::uint32_t>(rng.below(1ull << 32))};
      r.src_port = static_cast<std::uint16_t>(1024 + rng.below(64512));
      r.dst_ip = sensors[rng.below(sensors.size())];
      r.dst_port = 123;
      r.len_bytes = 64;
      out.honeypot.emplace_back(r.dst_ip, r);
    }
  }
  return out;
}

Prefix victim_from_json(const nlohmann::json& j) {
  return parse_prefix(j.get<std::string>());
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::RSDoS: return "rsdos";
    case AttackKind::DirectNonSpoofed: return "direct_nonspoofed";
    case AttackKind::Reflection: return "reflection";
  }
  return "?";
}

void ScenarioSpec::validate() const {
  if (!(duration_s >= 0)) throw ConfigError("scenario duration must be non-negative");
  if (telescope_addresses < 1 || telescope_addresses > (1ull << 32)) {
    throw ConfigError("telescope n_addresses must lie in [1, 2^32]");
  }
  for (std::size_t i = 0; i < attacks.size(); ++i) {
    const auto& a = attacks[i];
    const std::string where = "attack " + std::to_string(i) + ": ";
    if (!(a.rate_pps > 0)) throw ConfigError(where + "rate_pps must be positive");
    if (!(a.duration_s > 0)) throw ConfigError(where + "duration_s must be positive");
    if (!(a.start_s >= 0)) throw ConfigError(where + "start_s must be non-negative");
    if (a.start_s + a.duration_s > duration_s) throw ConfigError(where + "extends past the scenario end");
    if (a.packet_bytes < 20) throw ConfigError(where + "packet_bytes must be >= 20");
    if (a.victim.length() < 11) throw ConfigError(where + "victim prefix must be /11 or longer");
    switch (a.kind) {
      case AttackKind::RSDoS:
        if (a.spoof != Spoofing::Uniform) throw ConfigError(where + "rsdos attacks need uniform spoofing");
        break;
      case AttackKind::DirectNonSpoofed:
        if (a.spoof != Spoofing::None) throw ConfigError(where + "direct_nonspoofed attacks cannot spoof");
        break;
      case AttackKind::Reflection:
        if (a.reflector_subset < 1) throw ConfigError(where + "reflection attacks need >= 1 sensor");
        if (a.reflector_subset > honeypot_sensors.size()) {
          throw ConfigError(where + "reflector_subset exceeds the honeypot sensor count");
        }
        break;
    }
  }
  std::vector<Ipv4> sensors = honeypot_sensors;
  std::sort(sensors.begin(), sensors.end());
  if (std::adjacent_find(sensors.begin(), sensors.end()) != sensors.end()) {
    throw ConfigError("duplicate honeypot sensor");
  }
  if (background.telescope_pps < 0 || background.honeypot_pps < 0) {
    throw ConfigError("background rates must be non-negative");
  }
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  try {
    ScenarioSpec s;
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("start_date")) s.start_date = parse_date(j.at("start_date").get<std::string>());
    s.duration_s = j.at("duration_s").get<double>();
    if (j.contains("telescope")) {
      const auto& t = j.at("telescope");
      s.telescope_addresses = t.at("n_addresses").get<std::uint64_t>();
      if (t.contains("prefix")) s.telescope_prefix = parse_prefix(t.at("prefix").get<std::string>());
    }
    for (const auto& ip : j.value("honeypot_sensors", nlohmann::json::array())) {
      s.honeypot_sensors.push_back(parse_ipv4(ip.get<std::string>()));
    }
    for (const auto& aj : j.value("attacks", nlohmann::json::array())) {
      AttackSpec a;
      const auto type = aj.at("type").get<std::string>();
      if (type == "rsdos") {
        a.kind = AttackKind::RSDoS;
      } else if (type == "direct_nonspoofed") {
        a.kind = AttackKind::DirectNonSpoofed;
        a.spoof = Spoofing::None;
      } else if (type == "reflection") {
        a.kind = AttackKind::Reflection;
      } else {
        throw ConfigError("unknown attack type '" + type + "'");
      }
      a.victim = victim_from_json(aj.at("victim"));
      a.start_s = aj.at("start_s").get<double>();
      a.duration_s = aj.at("duration_s").get<double>();
      a.rate_pps = aj.at("rate_pps").get<double>();
      a.packet_bytes = aj.value("packet_bytes", a.packet_bytes);
      a.reflector_subset = aj.value("reflector_subset", a.reflector_subset);
      if (aj.contains("spoof")) {
        const auto spoof = aj.at("spoof").get<std::string>();
        if (spoof == "uniform") {
          a.spoof = Spoofing::Uniform;
        } else if (spoof == "none") {
          a.spoof = Spoofing::None;
        } else {
          throw ConfigError("unknown spoof mode '" + spoof + "'");
        }
      }
      a.port = aj.value("port", a.port);
      a.sources = aj.value("sources", a.sources);
      a.extra_reflectors = aj.value("extra_reflectors", a.extra_reflectors);
      s.attacks.push_back(a);
    }
    if (j.contains("background")) {
      const auto& b = j.at("background");
      s.background.telescope_pps = b.value("telescope_pps", 0.0);
      s.background.honeypot_pps = b.value("honeypot_pps", 0.0);
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

nlohmann::ordered_json scenario_to_json(const ScenarioSpec& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["start_date"] = format_date(s.start_date);
  j["duration_s"] = s.duration_s;
  j["telescope"] = {{"n_addresses", s.telescope_addresses}, {"prefix", to_string(s.telescope_prefix)}};
  auto sensors = nlohmann::ordered_json::array();
  for (auto ip : s.honeypot_sensors) sensors.push_back(to_string(ip));
  j["honeypot_sensors"] = sensors;
  auto attacks = nlohmann::ordered_json::array();
  for (const auto& a : s.attacks) {
    nlohmann::ordered_json aj;
    aj["type"] = std::string(to_string(a.kind));
    aj["victim"] = to_string(a.victim);
    aj["start_s"] = a.start_s;
    aj["duration_s"] = a.duration_s;
    aj["rate_pps"] = a.rate_pps;
    aj["packet_bytes"] = a.packet_bytes;
    aj["reflector_subset"] = a.reflector_subset;
    aj["spoof"] = a.spoof == Spoofing::Uniform ? "uniform" : "none";
    aj["port"] = a.port;
    aj["sources"] = a.sources;
    aj["extra_reflectors"] = a.extra_reflectors;
    attacks.push_back(aj);
  }
  j["attacks"] = attacks;
  j["background"] = {{"telescope_pps", s.background.telescope_pps}, {"honeypot_pps", s.background.honeypot_pps}};
  return j;
}

Output generate(const ScenarioSpec& spec, unsigned threads) {
  spec.validate();
  const Micros scenario_start = micros_of(spec.start_date);
  const std::size_t n = spec.attacks.size();
  std::vector<AttackOutput> parts(n + 1);

  threads = std::max(1u, threads);
  auto work = [&](std::size_t begin_worker) {
    for (std::size_t i = begin_worker; i <= n; i += threads) {
      parts[i] = i < n ? emit_attack(spec, i, scenario_start) : emit_background(spec, scenario_start);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w) workers.emplace_back(work, w);
    for (auto& t : workers) t.join();
  }

  Output out;
  out.sensors = spec.honeypot_sensors;
  std::sort(out.sensors.begin(), out.sensors.end());
  out.honeypot.resize(out.sensors.size());
  for (std::size_t i = 0; i <= n; ++i) {
    auto& part = parts[i];
    out.telescope.insert(out.telescope.end(), part.telescope.begin(), part.telescope.end());
    for (const auto& [sensor, packet] : part.honeypot) {
      const auto pos = std::lower_bound(out.sensors.begin(), out.sensors.end(), sensor) - out.sensors.begin();
      out.honeypot[pos].push_back(packet);
    }
    if (part.flow) out.flows.push_back(*part.flow);
    if (i < n) out.truth.push_back(std::move(part.truth));
  }
  std::sort(out.telescope.begin(), out.telescope.end(), packet_less);
  for (auto& trace : out.honeypot) std::sort(trace.begin(), trace.end(), packet_less);
  std::sort(out.flows.begin(), out.flows.end(), [](const FlowSummary& a, const FlowSummary& b) {
    return std::tie(a.start_ts, a.target_ip, a.end_ts, a.protocol, a.src_port) <
           std::tie(b.start_ts, b.target_ip, b.end_ts, b.protocol, b.src_port);
  });
  return out;
}

nlohmann::ordered_json truth_to_json(const std::vector<AttackTruth>& truth) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : truth) {
    nlohmann::ordered_json j;
    j["index"] = t.index;
    j["type"] = std::string(to_string(t.kind));
    j["victim"] = to_string(t.victim);
    j["start_ts_us"] = t.start_ts;
    j["end_ts_us"] = t.end_ts;
    j["telescope_expected_pps"] = t.telescope_expected_pps;
    j["telescope_expected_packets"] = t.telescope_expected_packets;
    j["telescope_detectable"] = t.telescope_detectable;
    auto sensors = nlohmann::ordered_json::array();
    for (auto ip : t.honeypot_sensors) sensors.push_back(to_string(ip));
    j["honeypot_sensors"] = sensors;
    j["honeypot_packets_per_sensor"] = t.honeypot_packets_per_sensor;
    nlohmann::ordered_json hp = nlohmann::ordered_json::object();
    for (const auto& [preset, ok] : t.honeypot_detectable) hp[preset] = ok;
    j["honeypot_detectable"] = hp;
    if (t.flow) {
      j["flow"] = {{"target_ip", to_string(t.flow->target_ip)},
                   {"protocol", t.flow->protocol},
                   {"src_port", t.flow->src_port},
                   {"distinct_src_ips", t.flow->distinct_src_ips},
                   {"bitrate_bps", t.flow->bitrate_bps},
                   {"start_ts_us", t.flow->start_ts},
                   {"end_ts_us", t.flow->end_ts}};
    }
    j["flow_class"] = t.flow_class;
    arr.push_back(j);
  }
  return arr;
}

void write_output(const std::filesystem::path& dir, const Output& output) {
  std::filesystem::create_directories(dir / "honeypot");
  io::write_packets(dir / "telescope.csv", output.telescope);
  for (std::size_t i = 0; i < output.sensors.size(); ++i) {
    io::write_packets(dir / "honeypot" / (to_string(output.sensors[i]) + ".csv"), output.honeypot[i]);
  }
  io::write_flows(dir / "flows.csv", output.flows);
  io::write_file(dir / "ground_truth.json", truth_to_json(output.truth).dump(2) + "\n");
}

}  // namespace ddoscope::synth
