#include "ddoscope/pipeline.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <sstream>
#include <unordered_set>

#include "ddoscope/digest.hpp"
#include "ddoscope/error.hpp"
#include "ddoscope/io.hpp"
#include "ddoscope/overlap.hpp"
#include "ddoscope/trends.hpp"

namespace ddoscope {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

TelescopeConfig telescope_config_from_json(const json& j) {
  try {
    TelescopeConfig c;
    c.observatory = j.value("observatory", c.observatory);
    c.n_addresses = j.at("n_addresses").get<std::uint64_t>();
    c.interval_s = j.value("interval", c.interval_s);
    c.pkt_threshold = j.value("pkt_threshold", c.pkt_threshold);
    c.duration_threshold_s = j.value("duration_threshold", c.duration_threshold_s);
    if (j.contains("rate_threshold")) {
      const auto& r = j.at("rate_threshold");
      c.rate_threshold.packets = r.value("packets", c.rate_threshold.packets);
      c.rate_threshold.window_s = r.value("window", c.rate_threshold.window_s);
      c.rate_threshold.slide_s = r.value("slide", c.rate_threshold.slide_s);
    }
    const auto filter = j.value("backscatter_filter", std::string("default"));
    if (filter == "default") {
      c.backscatter_filter = BackscatterFilter::Default;
    } else if (filter == "none") {
      c.backscatter_filter = BackscatterFilter::None;
    } else {
      throw ConfigError("backscatter_filter must be 'default' or 'none'");
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("telescope config: ") + e.what());
  }
}

void PipelineConfig::validate() const {
  std::set<std::string> names;
  for (const auto& o : observatories) {
    if (o.name.empty()) throw ConfigError("observatory name must not be empty");
    if (!names.insert(o.name).second) throw ConfigError("duplicate observatory name '" + o.name + "'");
    if (o.name.find_first_of(",\n/\\") != std::string::npos) {
      throw ConfigError("observatory name '" + o.name + "' contains a reserved character");
    }
    if (o.inputs.empty() && !scenario) throw ConfigError("observatory '" + o.name + "' has no input");
    for (const auto& p : o.inputs) {
      if (!fs::exists(p)) throw ConfigError("observatory '" + o.name + "': input '" + p.string() + "' not found");
    }
    if (o.kind != ObservatoryKind::Honeypot && o.inputs.size() > 1) {
      throw ConfigError("observatory '" + o.name + "' takes a single input file");
    }
  }
  if (observatories.size() > kMaxObservatories) throw ConfigError("at most 10 observatories supported");
  if (aggregate) {
    if (!routed) throw ConfigError("aggregation enabled but no routed table configured");
    if (!alloc) throw ConfigError("aggregation enabled but no allocation table configured");
  }
  for (const auto* table : {&routed, &alloc}) {
    if (*table && !fs::exists(**table)) {
      throw ConfigError(std::string(table == &routed ? "routed" : "allocation") + " table '" + (*table)->string() +
                        "' not found");
    }
  }
  if (correlation != "spearman" && correlation != "pearson") {
    throw ConfigError("correlation must be 'spearman' or 'pearson'");
  }
  if (confirm && !fs::exists(confirm->external)) {
    throw ConfigError("confirm: external digest file '" + confirm->external.string() + "' not found");
  }
  if (range_from && range_to && *range_to < *range_from) throw ConfigError("range 'to' precedes 'from'");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

PipelineConfig pipeline_config_from_json(const json& j, const fs::path& base_dir) {
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  try {
    PipelineConfig c;
    std::optional<synth::ScenarioSpec> scenario;
    if (j.contains("scenario")) {
      const auto& s = j.at("scenario");
      scenario = synth::scenario_from_json(s.is_string() ? json::parse(io::read_file(resolve(s.get<std::string>())))
                                                         : s);
    }
    for (const auto& oj : j.at("observatories")) {
      ObservatoryConfig o;
      o.name = oj.at("name").get<std::string>();
      const auto type = oj.at("type").get<std::string>();
      if (type == "telescope") {
        o.kind = ObservatoryKind::Telescope;
        json tc = oj.value("config", json::object());
        if (!tc.contains("observatory")) tc["observatory"] = o.name;
        if (!tc.contains("n_addresses") && scenario) tc["n_addresses"] = scenario->telescope_addresses;
        o.telescope = telescope_config_from_json(tc);
        o.telescope.observatory = o.name;
      } else if (type == "honeypot") {
        o.kind = ObservatoryKind::Honeypot;
        o.preset = parse_honeypot_preset(oj.at("preset").get<std::string>());
        if (oj.contains("merge_gap_s")) o.merge_gap_s = oj.at("merge_gap_s").get<double>();
        o.newkid_prefix_len = oj.value("newkid_prefix_len", o.newkid_prefix_len);
      } else if (type == "flow") {
        o.kind = ObservatoryKind::Flow;
        if (oj.contains("ampl_ports")) o.ampl_ports = oj.at("ampl_ports").get<std::set<std::uint16_t>>();
      } else {
        throw ConfigError("observatory '" + o.name + "': unknown type '" + type + "'");
      }
      if (oj.contains("input")) o.inputs.push_back(resolve(oj.at("input").get<std::string>()));
      for (const auto& in : oj.value("inputs", json::array())) o.inputs.push_back(resolve(in.get<std::string>()));
      c.observatories.push_back(std::move(o));
    }
    if (j.contains("routed")) c.routed = resolve(j.at("routed").get<std::string>());
    if (j.contains("alloc")) c.alloc = resolve(j.at("alloc").get<std::string>());
    if (j.contains("aggregate")) {
      const auto& a = j.at("aggregate");
      if (a.is_boolean()) {
        c.aggregate = a.get<bool>();
      } else {
        c.aggregate = a.value("enabled", true);
        c.carpet.concurrency_gap_s = a.value("concurrency_gap_s", c.carpet.concurrency_gap_s);
        c.carpet.min_targets = a.value("min_targets", c.carpet.min_targets);
      }
    }
    if (j.contains("analysis")) {
      const auto& a = j.at("analysis");
      c.normalize = a.value("normalize", c.normalize);
      c.baseline_weeks = a.value("baseline_weeks", c.baseline_weeks);
      c.ewma_span = a.value("ewma_span", c.ewma_span);
      c.correlation = a.value("correlation", c.correlation);
      c.quarterly = a.value("quarterly", c.quarterly);
      c.upset = a.value("upset", c.upset);
      c.top_ases = a.value("top_ases", c.top_ases);
      if (a.contains("confirm")) {
        c.confirm = ConfirmConfig{resolve(a["confirm"].at("external").get<std::string>()),
                                  a["confirm"].at("salt").get<std::string>()};
      }
      if (a.contains("range")) {
        const auto& r = a.at("range");
        if (r.contains("from")) c.range_from = parse_date(r.at("from").get<std::string>());
        if (r.contains("to")) c.range_to = parse_date(r.at("to").get<std::string>());
      }
    }
    c.scenario = scenario;
    c.output_dir = resolve(j.value("output_dir", std::string("bundle")));
    c.parallelism = j.value("parallelism", 1u);

    c.canonical = j;
    c.canonical.erase("output_dir");
    c.canonical.erase("parallelism");
    if (c.scenario) c.canonical["scenario"] = json::parse(synth::scenario_to_json(*c.scenario).dump());
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
}

namespace {

template <typename Fn>
auto run_stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage '" + name + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage '" + name + "': " + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError("stage '" + name + "': " + e.what());
  } catch (const fs::filesystem_error& e) {
    throw DataError("stage '" + name + "': " + e.what());
  } catch (const json::exception& e) {
    throw DataError("stage '" + name + "': " + e.what());
  } catch (const std::exception& e) {
    throw InvariantError("stage '" + name + "': " + e.what());
  }
}

std::vector<AttackType> attack_types_of(ObservatoryKind kind) {
  switch (kind) {
    case ObservatoryKind::Telescope: return {AttackType::RSDoS};
    case ObservatoryKind::Honeypot: return {AttackType::RA};
    case ObservatoryKind::Flow: return {AttackType::RA, AttackType::DP};
  }
  return {};
}

ojson correlation_json(const CorrelationResult& r) {
  ojson j;
  j["rho"] = r.rho;
  j["p_value"] = r.p_value;
  j["n"] = r.n;
  j["significant"] = r.significant;
  return j;
}

void write_json(const fs::path& path, const ojson& j) { io::write_file(path, j.dump(2) + "\n"); }

bool targets_overlap(const Prefix& a, const Prefix& b) { return a.contains(b) || b.contains(a); }

bool compatible(const ObservatoryConfig& obs, const AttackEvent& ev, const synth::AttackTruth& t) {
  switch (obs.kind) {
    case ObservatoryKind::Telescope: return t.kind == synth::AttackKind::RSDoS;
    case ObservatoryKind::Honeypot: return t.kind == synth::AttackKind::Reflection;
    case ObservatoryKind::Flow: return t.flow_class == to_string(ev.attack_type);
  }
  return false;
}

bool certain(const ObservatoryConfig& obs, const synth::AttackTruth& t) {
  switch (obs.kind) {
    case ObservatoryKind::Telescope: return t.kind == synth::AttackKind::RSDoS && t.telescope_detectable == "yes";
    case ObservatoryKind::Honeypot: {
      if (t.kind != synth::AttackKind::Reflection) return false;
      const auto it = t.honeypot_detectable.find(std::string(to_string(obs.preset)));
      return it != t.honeypot_detectable.end() && it->second;
    }
    case ObservatoryKind::Flow: return t.flow_class != "none";
  }
  return false;
}

}  // namespace

static std::vector<fs::path> expand_inputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

std::vector<AttackEvent> detect_observatory(const ObservatoryConfig& o, unsigned threads) {
  switch (o.kind) {
    case ObservatoryKind::Telescope: {
      const auto table = io::read_packets(o.inputs.at(0));
      return detect_rsdos(table.packets, o.telescope, threads);
    }
    case ObservatoryKind::Honeypot: {
      std::vector<PacketRecord> packets;
      std::vector<Ipv4> sensors;
      for (const auto& file : expand_inputs(o.inputs)) {
        auto table = io::read_packets(file);
        if (table.sensors.empty()) {
          for (const auto& p : table.packets) sensors.push_back(p.dst_ip);
        } else {
          sensors.insert(sensors.end(), table.sensors.begin(), table.sensors.end());
        }
        packets.insert(packets.end(), table.packets.begin(), table.packets.end());
      }
      const auto split = split_by_sensor(packets, sensors);
      const auto traces = split.traces();
      const auto raw = detect_honeypot_preset(traces, o.preset, o.name, o.newkid_prefix_len);
      return aggregate_sensors(raw, o.merge_gap_s.value_or(preset_timeout_s(o.preset)));
    }
    case ObservatoryKind::Flow: {
      const auto flows = io::read_flows(o.inputs.at(0));
      return detect_flow(flows, o.ampl_ports, {}, o.name);
    }
  }
  return {};
}

RecoveryScore score_recovery(const ObservatoryConfig& obs, std::span<const AttackEvent> events,
                             std::span<const synth::AttackTruth> truth) {
  RecoveryScore s;
  s.observatory = obs.name;
  s.detected = events.size();
  std::vector<bool> hit(truth.size(), false);
  for (const auto& ev : events) {
    bool any = false, sure = false;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const auto& t = truth[i];
      if (!compatible(obs, ev, t)) continue;
      if (!targets_overlap(ev.target, t.victim)) continue;
      if (ev.end_ts < t.start_ts || t.end_ts < ev.start_ts) continue;
      any = true;
      if (certain(obs, t)) {
        sure = true;
        hit[i] = true;
      }
    }
    if (sure) {
      ++s.true_positives;
    } else if (!any) {
      ++s.false_positives;
    }
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!certain(obs, truth[i])) continue;
    ++s.expected;
    if (hit[i]) ++s.recovered;
  }
  const auto judged = s.true_positives + s.false_positives;
  s.precision = judged ? static_cast<double>(s.true_positives) / static_cast<double>(judged) : 1.0;
  s.recall = s.expected ? static_cast<double>(s.recovered) / static_cast<double>(s.expected) : 1.0;
  return s;
}

namespace {

std::string file_stem(const std::string& obs, std::optional<AttackType> type = std::nullopt) {
  return type ? obs + "_" + std::string(to_string(*type)) : obs;
}

// Analysis stages over detected events; writes into `dir`.
void write_analyses(const PipelineConfig& cfg, const fs::path& dir,
                    const std::vector<std::vector<AttackEvent>>& events,
                    const std::optional<RoutedPrefixTable>& routed) {
  const auto& obs = cfg.observatories;

  // ---- weekly series & trends ----
  std::optional<Date> from = cfg.range_from, to = cfg.range_to;
  if (cfg.scenario) {
    const Date s0 = cfg.scenario->start_date;
    if (!from) from = s0;
    if (!to) {
      to = date_of(micros_of(s0) + seconds_to_micros(cfg.scenario->duration_s) - 1);
      to = std::max(*to, s0);
    }
  }
  if (!from || !to) {
    for (const auto& list : events) {
      for (const auto& ev : list) {
        const Date d = date_of(ev.start_ts);
        if (!cfg.range_from) from = from ? std::min(*from, d) : d;
        if (!cfg.range_to) to = to ? std::max(*to, d) : d;
      }
    }
  }

  std::vector<WeeklySeries> analysis_series;
  ojson trends = ojson::array();
  if (from && to) {
    run_stage("trends", [&] {
      for (std::size_t i = 0; i < obs.size(); ++i) {
        for (auto type : attack_types_of(obs[i].kind)) {
          std::vector<AttackEvent> typed;
          for (const auto& ev : events[i]) {
            const Date d = date_of(ev.start_ts);
            if (ev.attack_type == type && d >= *from && d <= *to) typed.push_back(ev);
          }
          const std::string label = obs[i].name + "/" + std::string(to_string(type));
          const auto stem = file_stem(obs[i].name, type);
          auto raw = weekly_counts(typed, *from, *to, label);
          io::write_series(dir / "series" / (stem + ".json"), raw);

          ojson entry;
          entry["series"] = label;
          WeeklySeries analysed = raw;
          if (cfg.normalize) {
            try {
              analysed = normalize(raw, cfg.baseline_weeks);
              io::write_series(dir / "series" / (stem + ".normalized.json"), analysed);
            } catch (const DataError& e) {
              entry["normalized"] = false;
              entry["error"] = e.what();
              trends.push_back(entry);
              analysis_series.push_back(raw);
              continue;
            }
          }
          entry["normalized"] = cfg.normalize;
          io::write_series(dir / "series" / (stem + ".ewma.json"), ewma(analysed, cfg.ewma_span));
          try {
            const auto t = linreg_trend(analysed);
            entry["slope"] = t.slope;
            entry["intercept"] = t.intercept;
            entry["net_change_4y"] = t.net_change_4y;
            entry["class"] = std::string(to_string(t.trend));
            entry["symbol"] = std::string(trend_symbol(t.trend));
            entry["n"] = t.n;
          } catch (const DataError& e) {
            entry["error"] = e.what();
          }
          trends.push_back(entry);
          analysis_series.push_back(analysed);
        }
        if (obs[i].kind == ObservatoryKind::Flow) {
          const auto ra = io::read_series(dir / "series" / (file_stem(obs[i].name, AttackType::RA) + ".json"));
          const auto dp = io::read_series(dir / "series" / (file_stem(obs[i].name, AttackType::DP) + ".json"));
          io::write_series(dir / "series" / (obs[i].name + "_share.json"), relative_share(ra, dp));
        }
      }
      return 0;
    });
  }
  write_json(dir / "trends.json", trends);

  run_stage("correlate", [&] {
    ojson corr;
    corr["method"] = cfg.correlation;
    ojson pairs = ojson::array();
    ojson quarterly = ojson::array();
    for (std::size_t i = 0; i < analysis_series.size(); ++i) {
      for (std::size_t k = i + 1; k < analysis_series.size(); ++k) {
        const auto& a = analysis_series[i];
        const auto& b = analysis_series[k];
        ojson entry;
        entry["a"] = a.label;
        entry["b"] = b.label;
        try {
          const auto r = cfg.correlation == "pearson" ? pearson(a, b) : spearman(a, b);
          entry.update(correlation_json(r));
        } catch (const DataError& e) {
          entry["error"] = e.what();
        }
        pairs.push_back(entry);
        if (cfg.quarterly) {
          ojson q;
          q["a"] = a.label;
          q["b"] = b.label;
          ojson rows = ojson::array();
          for (const auto& qr : quarterly_correlations(a, b)) {
            ojson row;
            row["quarter"] = qr.quarter;
            row["result"] = qr.result ? correlation_json(*qr.result) : ojson(nullptr);
            rows.push_back(row);
          }
          q["quarters"] = rows;
          quarterly.push_back(q);
        }
      }
    }
    corr["pairs"] = pairs;
    if (cfg.quarterly) corr["quarterly"] = quarterly;
    write_json(dir / "correlations.json", corr);
    return 0;
  });

  // ---- targets ----
  std::vector<std::string> labels;
  std::vector<std::vector<TargetTuple>> start_sets, day_sets;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    labels.push_back(obs[i].name);
    start_sets.push_back(build_targets(events[i], TargetMode::StartDate));
    day_sets.push_back(build_targets(events[i], TargetMode::PerDay));
    io::write_targets(dir / "targets" / (obs[i].name + ".csv"), start_sets.back());
  }
  if (obs.empty()) return;
  const TargetSetSystem sys(labels, start_sets);

  run_stage("overlap", [&] {
    if (cfg.upset) {
      const auto counts = upset_exclusive(sys);
      ojson up;
      up["observatories"] = labels;
      ojson subsets = ojson::array();
      std::uint64_t total = 0;
      for (std::uint32_t mask = 1; mask < counts.size(); ++mask) {
        subsets.push_back({{"subset", subset_label(sys, mask)}, {"mask", mask}, {"count", counts[mask]}});
        total += counts[mask];
      }
      up["subsets"] = subsets;
      up["union"] = total;
      write_json(dir / "upset.json", up);
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
      for (std::size_t k = i + 1; k < obs.size(); ++k) {
        const auto ts = overlap_timeseries(day_sets[i], day_sets[k]);
        std::ostringstream csv;
        csv << "week_start," << obs[i].name << ',' << obs[k].name << ",both\n";
        for (std::size_t w = 0; w < ts.a.size(); ++w) {
          csv << format_date(ts.a.week(w)) << ',' << io::format_double(*ts.a.values[w]) << ','
              << io::format_double(*ts.b.values[w]) << ',' << io::format_double(*ts.both.values[w]) << '\n';
        }
        io::write_file(dir / "overlap" / (obs[i].name + "__" + obs[k].name + ".csv"), csv.str());
      }
      std::ostringstream csv;
      csv << "week_start,new,recurring,cumulative_new\n";
      for (const auto& row : new_vs_recurring(start_sets[i])) {
        csv << format_date(row.week) << ',' << row.new_targets << ',' << row.recurring << ',' << row.cumulative_new
            << '\n';
      }
      io::write_file(dir / "new_recurring" / (obs[i].name + ".csv"), csv.str());
    }
    if (routed) {
      ojson attribution;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        ojson rows = ojson::array();
        for (const auto& r : as_attribution(start_sets[i], *routed, cfg.top_ases)) {
          ojson row;
          row["bucket"] = r.kind == AsShare::Kind::Asn     ? "AS" + std::to_string(r.asn)
                          : r.kind == AsShare::Kind::Other ? std::string("other")
                                                           : std::string("unrouted");
          row["tuples"] = r.tuples;
          row["share"] = r.share;
          rows.push_back(row);
        }
        attribution[obs[i].name] = rows;
      }
      write_json(dir / "as_attribution.json", attribution);
    }
    return 0;
  });

  if (cfg.confirm) {
    run_stage("confirm", [&] {
      const auto digests = io::read_digests(cfg.confirm->external);
      const std::unordered_set<std::string> external(digests.begin(), digests.end());
      ojson out = ojson::array();
      for (const auto& row : federated_confirm(sys, external, cfg.confirm->salt)) {
        out.push_back({{"subset", subset_label(sys, row.mask)},
                       {"mask", row.mask},
                       {"tuples", row.tuples},
                       {"confirmed", row.confirmed},
                       {"share", row.share}});
      }
      write_json(dir / "confirm.json", out);
      return 0;
    });
  }
}

std::string describe_files(const fs::path& dir, ojson& files) {
  std::vector<fs::path> all;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) all.push_back(fs::relative(entry.path(), dir));
  }
  std::sort(all.begin(), all.end());
  for (const auto& rel : all) {
    files.push_back({{"path", rel.generic_string()}, {"sha256", sha256_hex(io::read_file(dir / rel))}});
  }
  return {};
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  fs::path staging = out;
  staging += ".partial";
  if (fs::exists(out) && !fs::is_empty(out) && !fs::exists(out / "manifest.json")) {
    throw ConfigError("output directory '" + out.string() + "' exists and is not a ddoscope bundle");
  }
  fs::remove_all(staging);
  fs::create_directories(staging);

  try {
    std::vector<ObservatoryConfig> observatories = cfg.observatories;
    std::vector<synth::AttackTruth> truth;
    if (cfg.scenario) {
      run_stage("synth", [&] {
        const auto generated = synth::generate(*cfg.scenario, cfg.parallelism);
        synth::write_output(staging / "inputs", generated);
        truth = generated.truth;
        return 0;
      });
      for (auto& o : observatories) {
        if (!o.inputs.empty()) continue;
        switch (o.kind) {
          case ObservatoryKind::Telescope: o.inputs.push_back(staging / "inputs" / "telescope.csv"); break;
          case ObservatoryKind::Honeypot: o.inputs.push_back(staging / "inputs" / "honeypot"); break;
          case ObservatoryKind::Flow: o.inputs.push_back(staging / "inputs" / "flows.csv"); break;
        }
      }
    }

    std::optional<RoutedPrefixTable> routed;
    std::optional<AllocationTable> alloc;
    run_stage("tables", [&] {
      if (cfg.routed) routed = io::read_routed(*cfg.routed);
      if (cfg.alloc) alloc = io::read_alloc(*cfg.alloc);
      return 0;
    });

    std::vector<std::vector<AttackEvent>> events(observatories.size());
    run_stage("detect", [&] {
      if (cfg.parallelism <= 1) {
        for (std::size_t i = 0; i < observatories.size(); ++i) {
          events[i] = run_stage("detect " + observatories[i].name, [&] { return detect_observatory(observatories[i], 1); });
        }
      } else {
        std::vector<std::future<std::vector<AttackEvent>>> jobs;
        for (const auto& o : observatories) {
          jobs.push_back(std::async(std::launch::async, [&o, &cfg] {
            return run_stage("detect " + o.name, [&] { return detect_observatory(o, cfg.parallelism); });
          }));
        }
        for (std::size_t i = 0; i < jobs.size(); ++i) events[i] = jobs[i].get();
      }
      return 0;
    });

    if (cfg.aggregate) {
      run_stage("aggregate", [&] {
        for (auto& list : events) list = aggregate_carpet(list, *routed, *alloc, cfg.carpet);
        return 0;
      });
    }
    for (std::size_t i = 0; i < observatories.size(); ++i) {
      io::write_attacks(staging / "attacks" / (observatories[i].name + ".csv"), events[i]);
    }

    write_analyses(cfg, staging, events, routed);

    if (cfg.scenario) {
      run_stage("recovery", [&] {
        ojson rec = ojson::array();
        for (std::size_t i = 0; i < observatories.size(); ++i) {
          const auto s = score_recovery(observatories[i], events[i], truth);
          rec.push_back({{"observatory", s.observatory},
                         {"detected", s.detected},
                         {"true_positives", s.true_positives},
                         {"false_positives", s.false_positives},
                         {"expected", s.expected},
                         {"recovered", s.recovered},
                         {"precision", s.precision},
                         {"recall", s.recall}});
        }
        write_json(staging / "recovery.json", rec);
        return 0;
      });
    }

    run_stage("manifest", [&] {
      ojson manifest;
      manifest["tool"] = "ddoscope";
      manifest["version"] = std::string(kToolVersion);
      manifest["config_sha256"] = sha256_hex(cfg.canonical.dump());
      manifest["seed"] = cfg.scenario ? ojson(cfg.scenario->seed) : ojson(nullptr);
      ojson files = ojson::array();
      describe_files(staging, files);
      manifest["files"] = files;
      write_json(staging / "manifest.json", manifest);
      return 0;
    });

    fs::remove_all(out);
    fs::rename(staging, out);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace ddoscope
