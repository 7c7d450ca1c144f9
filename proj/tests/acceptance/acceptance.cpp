// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "ddoscope/carpet.hpp"
#include "ddoscope/honeypot.hpp"
#include "ddoscope/io.hpp"
#include "ddoscope/overlap.hpp"
#include "ddoscope/pipeline.hpp"
#include "ddoscope/synth.hpp"
#include "ddoscope/telescope.hpp"
#include "ddoscope/trends.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace ddoscope;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

fs::path g_workdir = fs::temp_directory_path() / "ddoscope_acceptance";

// Collects the first few mismatches of a criterion.
struct Verdict {
  std::size_t failures = 0;
  std::ostringstream note;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures <= 3) note << (failures > 1 ? "; " : "") << what;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double got, double want, double tol, double floor) {
  return std::fabs(got - want) <= tol * std::max({std::fabs(want), std::fabs(got), floor});
}

std::uint64_t total_packets(const std::vector<AttackEvent>& events) {
  return std::accumulate(events.begin(), events.end(), std::uint64_t{0},
                         [](std::uint64_t s, const AttackEvent& e) { return s + e.packets; });
}

// 1 -------------------------------------------------------------------------

void rsdos_oracle(Verdict& v, std::string& detail) {
  TelescopeConfig cfg;
  cfg.observatory = "nt";
  cfg.n_addresses = 12'582'912;
  double detector_s = 0;
  std::size_t packets = 0, events = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto trace = gen::telescope_trace(seed, 100'000);
    packets += trace.size();
    const auto t0 = Clock::now();
    const auto got = detect_rsdos(trace, cfg);
    detector_s += seconds_since(t0);
    events += got.size();
    v.expect(got == oracle::rsdos(trace, cfg), "seed " + std::to_string(seed) + " differs from oracle");
  }
  v.expect(detector_s < 60, "detector took " + std::to_string(detector_s) + " s");
  v.expect(events > 0, "no attacks in any trace");
  std::ostringstream d;
  d << "1000 traces, " << packets << " packets, " << events << " events, detector " << detector_s << " s";
  detail = d.str();
}

// 2 -------------------------------------------------------------------------

void min_rate(Verdict& v, std::string& detail) {
  const std::uint64_t big = 12'582'912, small = 500'000;
  const auto a = min_detectable_rate(big, 25, 300, 110);
  const auto b = min_detectable_rate(small, 25, 300, 110);
  const double ma = a.bps / 1e6, mb = b.bps / 1e6;
  v.expect(std::fabs(ma - 0.026) <= 0.1 * 0.026, "large telescope " + std::to_string(ma) + " Mbps");
  v.expect(std::fabs(mb - 0.60) <= 0.1 * 0.60, "small telescope " + std::to_string(mb) + " Mbps");
  const double ratio = b.pps / a.pps, want = static_cast<double>(big) / static_cast<double>(small);
  v.expect(std::fabs(ratio - want) <= 1e-9 * want, "pps ratio " + std::to_string(ratio));
  std::ostringstream d;
  d.precision(4);
  d << "n=12582912: " << ma << " Mbps; n=500000: " << mb << " Mbps";
  detail = d.str();
}

// 3 -------------------------------------------------------------------------

const Ipv4 kSensor = parse_ipv4("203.0.113.1");

PacketRecord request(double t_s, const char* victim = "198.51.100.7", std::uint16_t port = 123) {
  PacketRecord p;
  p.ts = seconds_to_micros(t_s);
  p.protocol = kProtoUdp;
  p.src_ip = parse_ipv4(victim);
  p.src_port = 40000;
  p.dst_ip = kSensor;
  p.dst_port = port;
  p.len_bytes = 60;
  return p;
}

std::vector<AttackEvent> on_sensor(const std::vector<PacketRecord>& packets, HoneypotPreset preset) {
  const std::vector<SensorTrace> traces{{kSensor, packets}};
  return detect_honeypot_preset(traces, preset, "hp");
}

AttackEvent hp_event(const char* target, double start_s, double end_s, Ipv4 sensor) {
  AttackEvent e;
  e.observatory = "hp";
  e.attack_type = AttackType::RA;
  e.target = parse_prefix(target);
  e.start_ts = seconds_to_micros(start_s);
  e.end_ts = seconds_to_micros(end_s);
  e.packets = 10;
  e.sensors = {sensor};
  return e;
}

void honeypot_fixtures(Verdict& v) {
  std::vector<PacketRecord> p;
  for (int i = 0; i < 4; ++i) p.push_back(request(i));
  v.expect(on_sensor(p, HoneypotPreset::Hopscotch).empty(), "four requests reported");

  p = {request(0), request(1), request(2), request(2 + 16 * 60), request(3 + 16 * 60)};
  v.expect(on_sensor(p, HoneypotPreset::Hopscotch).empty(), "16 minute gap did not split");
  p[3] = request(2 + 14 * 60);
  p[4] = request(3 + 14 * 60);
  v.expect(on_sensor(p, HoneypotPreset::Hopscotch).size() == 1, "14 minute gap split");

  p = {request(0), request(1), request(2), request(3), request(3 + 900)};
  const auto strict = on_sensor(p, HoneypotPreset::Hopscotch);
  v.expect(strict.size() == 1 && strict[0].packets == 5, "gap equal to timeout split the flow");

  p.clear();
  for (int i = 0; i < 100; ++i) p.push_back(request(i * 6.0));
  const auto amp = on_sensor(p, HoneypotPreset::AmpPot);
  v.expect(amp.size() == 1 && amp[0].packets == 100 && amp[0].sensors == std::vector<Ipv4>{kSensor},
           "AmpPot 100 requests");
  p.pop_back();
  v.expect(on_sensor(p, HoneypotPreset::AmpPot).empty(), "AmpPot 99 requests reported");

  p = {request(0, "198.51.100.7", 19), request(10, "198.51.100.8", 19), request(20, "198.51.100.9", 19),
       request(30, "198.51.100.7", 123), request(40, "198.51.100.200", 123)};
  const auto multi = on_sensor(p, HoneypotPreset::NewKid);
  v.expect(multi.size() == 1 && to_string(multi[0].target) == "198.51.100.0/24" && multi[0].packets == 5,
           "NewKid multi-protocol /24");

  p.clear();
  for (int i = 0; i < 5; ++i) p.push_back(request(i, "198.51.100.7", 53));
  p.push_back(request(6, "198.51.100.7", 123));
  const auto covered = on_sensor(p, HoneypotPreset::NewKid);
  v.expect(covered.size() == 1 && covered[0].packets == 6, "NewKid mono inside multi reported twice");

  p.clear();
  for (int i = 0; i < 5; ++i) p.push_back(request(i * 10, "198.51.100.7", 53));
  const auto mono = on_sensor(p, HoneypotPreset::NewKid);
  v.expect(mono.size() == 1 && mono[0].packets == 5, "NewKid mono alone");

  const Ipv4 a{1}, b{2};
  const std::vector<AttackEvent> overlapping{hp_event("198.51.100.7", 0, 100, a),
                                             hp_event("198.51.100.7", 50, 150, b)};
  const auto merged = aggregate_sensors(overlapping, 900);
  v.expect(merged.size() == 1 && merged[0].sensors == std::vector<Ipv4>{a, b} && merged[0].packets == 20 &&
               merged[0].end_ts == seconds_to_micros(150),
           "aggregate_sensors overlap merge");
  const std::vector<AttackEvent> apart{hp_event("198.51.100.7", 0, 100, a),
                                       hp_event("198.51.100.7", 1001, 2000, b)};
  v.expect(aggregate_sensors(apart, 900).size() == 2, "aggregate_sensors merged across the gap");
}

void honeypot_random(Verdict& v, std::string& detail) {
  honeypot_fixtures(v);
  const std::vector<AttackDefinition> defs{amppot_definition(), hopscotch_definition(), newkid_mono_definition(),
                                           newkid_multi_definition()};
  std::size_t events = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto traces = gen::honeypot_traces(seed, 2000);
    std::vector<SensorTrace> view;
    for (const auto& t : traces) view.push_back({t.sensor, t.packets});
    for (const auto& def : defs) {
      const auto got = detect_honeypot(view, def, "hp");
      events += got.size();
      v.expect(got == oracle::honeypot(traces, def, "hp"), "seed " + std::to_string(seed) + " differs from oracle");
    }
    for (auto preset : {HoneypotPreset::AmpPot, HoneypotPreset::Hopscotch, HoneypotPreset::NewKid}) {
      const auto raw = detect_honeypot_preset(view, preset, "hp");
      const double gap = preset_timeout_s(preset);
      const auto once = aggregate_sensors(raw, gap);
      v.expect(aggregate_sensors(once, gap) == once, "aggregate_sensors not idempotent, seed " + std::to_string(seed));
      v.expect(total_packets(once) == total_packets(raw), "packets not conserved, seed " + std::to_string(seed));
    }
  }
  v.expect(events > 0, "no events in any trace");
  detail = "fixtures + 1000 seeds x 4 definitions, " + std::to_string(events) + " events";
}

// 4 -------------------------------------------------------------------------

AttackEvent hit(const char* target, double start_s, double end_s) {
  AttackEvent e;
  e.observatory = "nt";
  e.attack_type = AttackType::RSDoS;
  e.target = parse_prefix(target);
  e.start_ts = seconds_to_micros(start_s);
  e.end_ts = seconds_to_micros(end_s);
  e.packets = 10;
  return e;
}

RoutedPrefixTable routed(std::vector<std::pair<const char*, std::uint32_t>> rows) {
  std::vector<RoutedEntry> entries;
  for (auto [p, asn] : rows) entries.push_back({parse_prefix(p), asn});
  return RoutedPrefixTable(entries);
}

AllocationTable alloc(std::vector<const char*> rows) {
  std::vector<AllocationBlock> blocks;
  for (auto p : rows) blocks.push_back({parse_prefix(p), "RIR"});
  return AllocationTable(blocks);
}

void carpet(Verdict& v, std::string& detail) {
  const std::vector<AttackEvent> pair{hit("203.0.113.5", 0, 100), hit("203.0.113.99", 30, 200)};
  const auto merged = aggregate_carpet(pair, routed({{"203.0.113.0/24", 64500}, {"203.0.0.0/16", 64501}}),
                                       alloc({"203.0.112.0/22"}));
  v.expect(merged.size() == 1 && to_string(merged[0].target) == "203.0.113.0/24" && merged[0].packets == 20 &&
               merged[0].members.size() == 2,
           "merge fixture");

  const std::vector<AttackEvent> split{hit("203.0.112.5", 0, 100), hit("203.0.120.5", 0, 100)};
  v.expect(aggregate_carpet(split, routed({{"203.0.112.0/20", 64500}}), alloc({"203.0.112.0/22", "203.0.120.0/22"})) ==
               split,
           "allocation split fixture");

  const std::vector<AttackEvent> wide{hit("10.1.0.5", 0, 100), hit("10.200.0.5", 0, 100)};
  v.expect(aggregate_carpet(wide, routed({{"10.0.0.0/8", 64500}}), alloc({"10.0.0.0/8"})) == wide, "/8 fixture");

  const std::vector<AttackEvent> single{hit("203.0.113.5", 0, 100)};
  v.expect(aggregate_carpet(single, routed({{"203.0.113.0/24", 64500}}), alloc({"203.0.112.0/22"})) == single,
           "singleton fixture");

  std::size_t aggregated = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto w = gen::carpet_world(seed);
    const auto out = aggregate_carpet(w.events, w.routed, w.alloc);
    const std::string s = " (seed " + std::to_string(seed) + ")";
    for (const auto& ev : out) {
      if (ev.members.empty()) continue;
      ++aggregated;
      const auto entry = w.routed.longest_covering(ev.target);
      v.expect(entry && entry->prefix == ev.target, "output prefix not routed" + s);
      v.expect(ev.target.length() >= 11 && ev.target.length() <= 28, "output prefix length out of range" + s);
      v.expect(w.alloc.find(ev.target).has_value(), "output prefix spans allocations" + s);
    }
  }
  v.expect(aggregated > 0, "no random scenario aggregated anything");
  detail = "4 fixtures + 1000 random worlds, " + std::to_string(aggregated) + " aggregated events";
}

// 5 -------------------------------------------------------------------------

const Date kMonday = std::chrono::sys_days{std::chrono::year{2019} / 1 / 7};

WeeklySeries series(std::vector<std::optional<double>> v) { return WeeklySeries{kMonday, std::move(v), "s"}; }

void trend_math(Verdict& v, std::string& detail) {
  // Relative error with a small floor: values that should be zero are
  // compared in absolute terms.
  auto close = [&](double got, double want, double floor, const std::string& what) {
    v.expect(rel_close(got, want, 1e-9, floor), what + ": " + std::to_string(got) + " vs " + std::to_string(want));
  };
  for (std::uint64_t seed = 0; seed < 10'000; ++seed) {
    const std::size_t n = 30 + seed % 200;
    const auto a = gen::series(seed, n, 0.05), b = gen::series(seed ^ 0x5eed5eedu, n, 0.05);
    const std::string s = " seed " + std::to_string(seed);
    const auto na = normalize(series(a)), ea = ewma(series(a), 12);
    const auto oa = oracle::normalize(a, 15), oe = oracle::ewma(a, 12);
    for (std::size_t i = 0; i < n; ++i) {
      v.expect(na.values[i].has_value() == oa[i].has_value() && ea.values[i].has_value() == oe[i].has_value(),
               "null pattern" + s);
      if (na.values[i] && oa[i]) close(*na.values[i], *oa[i], 1e-12, "normalize" + s);
      if (ea.values[i] && oe[i]) close(*ea.values[i], *oe[i], 1e-12, "ewma" + s);
    }
    const auto t = linreg_trend(series(a));
    const auto line = oracle::ols(a);
    close(t.slope, static_cast<double>(line.slope), 1e-6, "slope" + s);
    close(t.intercept, static_cast<double>(line.intercept), 1e-6, "intercept" + s);
    const auto sp = spearman(series(a), series(b));
    const auto so = oracle::spearman(a, b);
    const auto pe = pearson(series(a), series(b));
    const auto po = oracle::pearson(a, b);
    close(sp.rho, so.rho, 1e-6, "spearman rho" + s);
    close(sp.p_value, so.p, 1e-12, "spearman p" + s);
    close(pe.rho, po.rho, 1e-6, "pearson rho" + s);
    close(pe.p_value, po.p, 1e-12, "pearson p" + s);
  }

  const std::vector<std::optional<double>> median_five{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 10};
  v.expect(normalize(series(median_five)).values[15] == 2.0, "median 5 example");
  const auto e = ewma(series({0, 1}), 12);
  v.expect(e.values[1] && std::fabs(*e.values[1] - 2.0 / 13.0) < 1e-15, "EWMA 2/13 example");
  v.expect(std::fabs(spearman(series({1, 2, 3, 4, 5}), series({2, 1, 4, 3, 5})).rho - 0.8) < 1e-12,
           "spearman 0.8 example");
  v.expect(std::fabs(pearson(series({1, 2, 3}), series({1, 2, 4})).rho - 0.98198) < 5e-6, "pearson 0.98198 example");
  detail = "10000 random series pairs + 4 worked examples";
}

// 6 -------------------------------------------------------------------------

void trend_classes(Verdict& v, std::string& detail) {
  // 209 weekly points with a linear path whose fitted 208-week change is the
  // target net change, on a baseline of 1.
  std::ostringstream d;
  for (auto [net, want] : {std::pair{0.10, TrendClass::Increasing}, std::pair{0.0, TrendClass::Steady},
                           std::pair{-0.06, TrendClass::Decreasing}}) {
    std::vector<std::optional<double>> y;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0, 0.002);
    for (int i = 0; i < 209; ++i) y.push_back(1.0 + net * i / 208.0 + noise(rng));
    const auto t = linreg_trend(series(y));
    v.expect(t.trend == want, "net " + std::to_string(net) + " classified " + std::string(to_string(t.trend)));
    d << (net >= 0 ? "+" : "") << net * 100 << "% -> " << to_string(t.trend) << "  ";
  }
  detail = d.str();
}

// 7 -------------------------------------------------------------------------

std::vector<TargetTuple> tuples(std::initializer_list<std::uint32_t> ips) {
  std::vector<TargetTuple> out;
  for (auto ip : ips) out.push_back({kMonday, Ipv4{ip}});
  return out;
}

void upset(Verdict& v, std::string& detail) {
  const TargetSetSystem abc({"A", "B", "C"}, {tuples({1, 2, 3}), tuples({2, 3, 4}), tuples({3, 4, 5})});
  const std::vector<std::uint64_t> want{0, 1, 0, 1, 1, 0, 1, 1};
  v.expect(upset_exclusive(abc) == want, "A/B/C worked example");

  std::uint64_t largest = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 6;
    const std::size_t universe = seed % 10 == 0 ? 2'000 : 100'000;
    const auto sets = gen::set_system(seed, n, universe);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
    const auto counts = upset_exclusive(TargetSetSystem(labels, sets));
    std::set<TargetTuple> all;
    for (const auto& s : sets) all.insert(s.begin(), s.end());
    largest = std::max<std::uint64_t>(largest, all.size());
    v.expect(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == all.size(),
             "partition law, seed " + std::to_string(seed));
    if (universe <= 2'000) {
      v.expect(counts == oracle::exclusive_counts(sets), "oracle counts, seed " + std::to_string(seed));
    }
  }
  detail = "A/B/C + 100 systems, up to " + std::to_string(largest) + " tuples";
}

// 8 -------------------------------------------------------------------------

void federated(Verdict& v, std::string& detail) {
  std::vector<TargetTuple> ten;
  for (std::uint32_t i = 1; i <= 10; ++i) ten.push_back({kMonday, Ipv4{i}});
  const auto three = hash_targets(std::vector{ten[0], ten[4], ten[9]}, "pepper");
  const auto r = federated_confirm(TargetSetSystem({"A"}, {ten}), {three.begin(), three.end()}, "pepper");
  v.expect(r.size() == 1 && r[0].share == 0.30, "3-of-10 fixture");

  std::mt19937_64 rng(2024);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 4;
    auto sets = gen::set_system(seed, n + 1, 3'000);
    const auto external_plain = sets.back();
    sets.pop_back();
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
    const TargetSetSystem sys(labels, sets);
    const std::string salt = "salt" + std::to_string(rng());
    const auto digests = hash_targets(external_plain, salt);
    const auto got = federated_confirm(sys, {digests.begin(), digests.end()}, salt);

    // Plaintext join on the membership masks.
    const std::set<TargetTuple> ext(external_plain.begin(), external_plain.end());
    std::vector<std::uint64_t> total(std::size_t{1} << n), hits(std::size_t{1} << n);
    for (const auto& [t, mask] : sys.memberships()) {
      ++total[mask];
      hits[mask] += ext.count(t);
    }
    bool same = got.size() == total.size() - 1;
    for (const auto& row : got) {
      const double share = total[row.mask] ? static_cast<double>(hits[row.mask]) / total[row.mask] : 0.0;
      same = same && row.tuples == total[row.mask] && row.confirmed == hits[row.mask] && row.share == share;
    }
    v.expect(same, "hashed join differs from plaintext, seed " + std::to_string(seed));
  }
  detail = "3-of-10 + 100 random fixtures";
}

// 9 -------------------------------------------------------------------------

void sampling(Verdict& v, std::string& detail) {
  const std::uint64_t n_addr = 12'582'912;
  const double p = static_cast<double>(n_addr) / 4294967296.0;
  const double trials = 20'000.0 * 300;
  const double expected = trials * p;
  TelescopeConfig cfg;
  cfg.n_addresses = n_addr;
  double sum = 0;
  int detected = 0;
  const int seeds = 30;
  for (int seed = 0; seed < seeds; ++seed) {
    synth::ScenarioSpec spec;
    spec.seed = 1000 + static_cast<std::uint64_t>(seed);
    spec.duration_s = 900;
    spec.telescope_addresses = n_addr;
    synth::AttackSpec a;
    a.kind = synth::AttackKind::RSDoS;
    a.victim = parse_prefix("198.51.100.7");
    a.start_s = 100;
    a.duration_s = 300;
    a.rate_pps = 20'000;
    spec.attacks = {a};
    const auto out = synth::generate(spec);
    sum += static_cast<double>(out.telescope.size());
    const auto events = detect_rsdos(out.telescope, cfg);
    detected += events.size() == 1 && events[0].target == a.victim;
  }
  const double mean = sum / seeds;
  const double se = std::sqrt(trials * p * (1 - p) / seeds);
  v.expect(std::fabs(mean - expected) <= 3 * se, "mean " + std::to_string(mean));
  v.expect(detected >= 29, "detected in " + std::to_string(detected) + "/30");
  std::ostringstream d;
  d.precision(7);
  d << "mean " << mean << " vs " << expected << " (SE " << se << "), detected " << detected << "/30";
  detail = d.str();
}

// 10 ------------------------------------------------------------------------

std::map<std::string, std::string> bundle_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = io::read_file(e.path());
  }
  return out;
}

void end_to_end(Verdict& v, std::string& detail) {
  const fs::path data = DDOSCOPE_TEST_DATA;
  const auto j = nlohmann::json::parse(io::read_file(data / "e2e_pipeline.json"));
  fs::remove_all(g_workdir / "p1");
  fs::remove_all(g_workdir / "p8");
  auto cfg = pipeline_config_from_json(j, data);
  cfg.output_dir = g_workdir / "p1";
  cfg.parallelism = 1;
  run_pipeline(cfg);
  cfg.output_dir = g_workdir / "p8";
  cfg.parallelism = 8;
  run_pipeline(cfg);

  const auto one = bundle_files(g_workdir / "p1"), eight = bundle_files(g_workdir / "p8");
  v.expect(one == eight, "bundles differ between parallelism 1 and 8");

  const auto recovery = nlohmann::json::parse(one.at("recovery.json"));
  std::size_t expected = 0;
  std::ostringstream d;
  for (const auto& r : recovery) {
    const std::string name = r["observatory"];
    expected += r["expected"].get<std::size_t>();
    v.expect(r["precision"].get<double>() == 1.0, name + " precision " + r["precision"].dump());
    v.expect(r["recall"].get<double>() == 1.0, name + " recall " + r["recall"].dump());
    d << name << " " << r["recovered"] << "/" << r["expected"] << " ";
  }
  v.expect(expected > 0, "no ground-truth attacks above thresholds");
  detail = std::to_string(one.size()) + " files identical; recovered " + d.str();
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--workdir") == 0) g_workdir = argv[i + 1];
  }
  fs::create_directories(g_workdir);

  const std::vector<std::pair<const char*, std::function<void(Verdict&, std::string&)>>> criteria{
      {"rsdos detector matches brute-force oracle", rsdos_oracle},
      {"minimum detectable rate", min_rate},
      {"honeypot presets and sensor aggregation", honeypot_random},
      {"carpet-bombing aggregation", carpet},
      {"trend math against oracles", trend_math},
      {"trend classification", trend_classes},
      {"upset partition law", upset},
      {"federated confirmation", federated},
      {"telescope sampling statistics", sampling},
      {"end-to-end determinism and recovery", end_to_end},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    std::string detail;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(v, detail);
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    const bool ok = v.failures == 0;
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " [" << detail;
    if (!ok) std::cout << (detail.empty() ? "" : "; ") << v.failures << " failure(s): " << v.note.str();
    std::cout << "] (" << static_cast<int>(seconds_since(t0) * 1000) << " ms)" << std::endl;
  }
  return failed ? 1 : 0;
}
