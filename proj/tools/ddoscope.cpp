// ddoscope command-line front end.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "ddoscope/carpet.hpp"
#include "ddoscope/error.hpp"
#include "ddoscope/flow.hpp"
#include "ddoscope/honeypot.hpp"
#include "ddoscope/io.hpp"
#include "ddoscope/overlap.hpp"
#include "ddoscope/pipeline.hpp"
#include "ddoscope/synth.hpp"
#include "ddoscope/telescope.hpp"
#include "ddoscope/trends.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using namespace ddoscope;

namespace {

constexpr const char* kSchemas = R"(
Exit codes: 0 ok, 2 config error, 3 data error, 4 internal invariant violation.

File schemas (CSV files carry a header row; timestamps are integer
microseconds since the Unix epoch, UTC):
  packets.csv   ts_us,protocol,src_ip,src_port,dst_ip,dst_port,len_bytes,tcp_flags[,sensor_ip]
                protocol 1/6/17; tcp_flags letters from S,A,R,F (e.g. SA) or empty;
                rows sorted by ts_us
  attacks.csv   observatory,attack_type,target,start_ts_us,end_ts_us,packets,sensors[,members]
                attack_type RSDoS|RA|DP; target a.b.c.d or a.b.c.d/len;
                sensors and members ';'-separated
  flows.csv     target_ip,protocol,src_port,distinct_src_ips,bitrate_bps,start_ts_us,end_ts_us
  routed.csv    prefix,asn
  alloc.csv     prefix,registry
  targets.csv   date,ip            (date YYYY-MM-DD)
  hashes.txt    one lowercase hex SHA-256 of "salt|YYYY-MM-DD|ip" per line
  series.json   {"label": str, "start_week": "YYYY-MM-DD", "values": [number|null, ...]}
                one value per ISO week (Monday, UTC)
)";

constexpr const char* kTelescopeSchema = R"(
Telescope config (JSON): {"observatory": str, "n_addresses": int (required),
  "interval": 300, "pkt_threshold": 25, "duration_threshold": 60,
  "rate_threshold": {"packets": 30, "window": 60, "slide": 10},
  "backscatter_filter": "default"|"none"}
)";

constexpr const char* kScenarioSchema = R"(
Scenario (JSON):
  seed               int, master seed (every attack uses its own substream)
  start_date         "YYYY-MM-DD", default 2019-01-07
  duration_s         scenario length in seconds
  telescope          {"n_addresses": int, "prefix": "44.0.0.0/8"}
  honeypot_sensors   ["a.b.c.d", ...]
  background         {"telescope_pps": number, "honeypot_pps": number}
  attacks            list of:
    type             "rsdos" | "direct_nonspoofed" | "reflection"
    victim           "a.b.c.d" or "a.b.c.d/len" (carpet bombing)
    start_s, duration_s, rate_pps   (rate per reflector for reflection)
    packet_bytes     default 110
    reflector_subset sensors used by a reflection attack
    spoof            "uniform" | "none"
    port             service port (default 80; reflection 123)
    sources          bots of a non-spoofed attack, default 50
    extra_reflectors reflectors outside the honeypot set
Outputs: telescope.csv, honeypot/<sensor>.csv, flows.csv, ground_truth.json.
)";

constexpr const char* kPipelineSchema = R"(
Pipeline config (JSON; relative paths resolve against the config's directory):
  observatories  list of {"name", "type": "telescope"|"honeypot"|"flow",
                 "input": path | "inputs": [paths or directories of CSVs],
                 telescope: "config": {telescope config},
                 honeypot: "preset": "amppot"|"hopscotch"|"newkid", "merge_gap_s",
                           "newkid_prefix_len",
                 flow: "ampl_ports": [int]}
                 inputs may be omitted when a scenario is given
  routed, alloc  table paths
  aggregate      bool or {"enabled", "concurrency_gap_s", "min_targets"}
  analysis       {"normalize": true, "baseline_weeks": 15, "ewma_span": 12,
                  "correlation": "spearman"|"pearson", "quarterly": false,
                  "upset": true, "top_ases": 10,
                  "confirm": {"external": path, "salt": str},
                  "range": {"from": date, "to": date}}
  scenario       scenario object or path; synthesizes the inputs
  output_dir     default "bundle"
  parallelism    default 1
Bundle: attacks/<obs>.csv, series/<obs>_<type>[.normalized|.ewma].json,
  trends.json, correlations.json, targets/<obs>.csv, upset.json,
  overlap/<a>__<b>.csv, new_recurring/<obs>.csv, as_attribution.json,
  confirm.json, recovery.json (with a scenario), inputs/ (with a scenario),
  manifest.json (tool version, config hash, seed, per-file SHA-256).
)";

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const ojson& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    io::write_file(path, j.dump(2) + "\n");
  }
}

std::set<std::uint16_t> parse_ports(const std::string& text) {
  std::set<std::uint16_t> ports;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const int p = std::stoi(item);
      if (p < 0 || p > 65535) throw std::out_of_range("port");
      ports.insert(static_cast<std::uint16_t>(p));
    } catch (const std::exception&) {
      throw ConfigError("bad port '" + item + "'");
    }
  }
  return ports;
}

// name=path pairs; bare paths take their file stem as name.
std::vector<std::pair<std::string, std::string>> parse_named(const std::vector<std::string>& items) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& raw : items) {
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        out.emplace_back(fs::path(item).stem().string(), item);
      } else {
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      }
    }
  }
  return out;
}

// targets.csv, or attacks.csv reduced to start-date tuples.
std::vector<TargetTuple> load_targets(const std::string& path, TargetMode mode) {
  const auto text = io::read_file(path);
  std::istringstream in(text);
  if (text.rfind("observatory,", 0) == 0) {
    const auto events = io::read_attacks(in, path);
    return build_targets(events, mode);
  }
  auto tuples = io::read_targets(in, path);
  std::sort(tuples.begin(), tuples.end());
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
  return tuples;
}

ojson correlation_json(const CorrelationResult& r) {
  return {{"rho", r.rho}, {"p_value", r.p_value}, {"n", r.n}, {"significant", r.significant}};
}

int fail(int code, const std::string& kind, const std::string& message) {
  std::cerr << "ddoscope: " << kind << ": " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddoscope: multi-observatory DDoS inference and cross-observatory analysis"};
  app.footer(kSchemas);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  unsigned threads = 1;

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate observatory inputs from a scenario");
  synth_cmd->footer(kScenarioSchema);
  std::string scenario_path, synth_out;
  std::optional<std::uint64_t> seed;
  synth_cmd->add_option("--scenario", scenario_path, "scenario.json")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", seed, "override the scenario seed");
  synth_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Infer attacks from one observatory's data");
  detect_cmd->require_subcommand(1);
  std::string det_in, det_out = "-", observatory;

  auto* tel_cmd = detect_cmd->add_subcommand("telescope", "Randomly-spoofed DoS from telescope backscatter");
  tel_cmd->footer(kTelescopeSchema);
  std::string tel_config;
  std::optional<std::uint64_t> n_addresses;
  tel_cmd->add_option("--config", tel_config, "telescope config JSON")->check(CLI::ExistingFile);
  tel_cmd->add_option("--n-addresses", n_addresses, "telescope size (overrides config)");
  tel_cmd->add_option("--observatory", observatory, "observatory name (overrides config)");
  tel_cmd->add_option("--in", det_in, "packets.csv")->required()->check(CLI::ExistingFile);
  tel_cmd->add_option("--out", det_out, "attacks.csv ('-' for stdout)");
  tel_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  auto* hp_cmd = detect_cmd->add_subcommand("honeypot", "Reflection attacks from amplification honeypots");
  std::vector<std::string> hp_inputs;
  std::string preset_name = "hopscotch";
  std::optional<double> merge_gap;
  bool sensor_col = false;
  int newkid_prefix = 24;
  hp_cmd->add_option("--in", hp_inputs, "packets.csv per sensor, or directories of them")
      ->required()
      ->check(CLI::ExistingPath);
  hp_cmd->add_option("--out", det_out, "attacks.csv ('-' for stdout)");
  hp_cmd->add_option("--preset", preset_name, "amppot|hopscotch|newkid")
      ->check(CLI::IsMember({"amppot", "hopscotch", "newkid"}));
  hp_cmd->add_option("--merge-gap", merge_gap, "cross-sensor merge gap in seconds (default: preset timeout)");
  hp_cmd->add_flag("--sensor-col", sensor_col, "require a sensor_ip column instead of one file per sensor");
  hp_cmd->add_option("--newkid-prefix", newkid_prefix, "source prefix length of the newkid preset")
      ->check(CLI::Range(0, 32));
  hp_cmd->add_option("--observatory", observatory, "observatory name");

  auto* flow_cmd = detect_cmd->add_subcommand("flow", "RA/DP classification of IXP flow summaries");
  std::string ports_text;
  FlowThresholds thresholds;
  flow_cmd->add_option("--in", det_in, "flows.csv")->required()->check(CLI::ExistingFile);
  flow_cmd->add_option("--out", det_out, "attacks.csv ('-' for stdout)");
  flow_cmd->add_option("--ampl-ports", ports_text, "comma-separated amplification source ports");
  flow_cmd->add_option("--min-sources", thresholds.min_sources, "minimum distinct sources");
  flow_cmd->add_option("--ra-bps", thresholds.ra_min_bps, "RA bitrate threshold (strict)");
  flow_cmd->add_option("--dp-bps", thresholds.dp_min_bps, "DP bitrate threshold (strict)");
  flow_cmd->add_option("--observatory", observatory, "observatory name");

  // aggregate
  auto* agg_cmd = app.add_subcommand("aggregate", "Merge carpet-bombing attacks into prefix events");
  std::string routed_path, alloc_path, agg_in, agg_out = "-";
  CarpetOptions carpet;
  agg_cmd->add_option("--routed", routed_path, "routed.csv")->required()->check(CLI::ExistingFile);
  agg_cmd->add_option("--alloc", alloc_path, "alloc.csv")->required()->check(CLI::ExistingFile);
  agg_cmd->add_option("--in", agg_in, "attacks.csv")->required()->check(CLI::ExistingFile);
  agg_cmd->add_option("--out", agg_out, "attacks.csv ('-' for stdout)");
  agg_cmd->add_option("--gap", carpet.concurrency_gap_s, "concurrency gap in seconds");
  agg_cmd->add_option("--min-targets", carpet.min_targets, "minimum distinct targets per merge");

  // trends
  auto* trends_cmd = app.add_subcommand("trends", "Weekly series, normalization, smoothing, trend summary");
  std::string tr_in, tr_out = "-", tr_summary, tr_type, tr_label, tr_from, tr_to;
  bool tr_normalize = false;
  std::size_t baseline = 15;
  std::optional<double> ewma_span;
  trends_cmd->add_option("--in", tr_in, "attacks.csv")->required()->check(CLI::ExistingFile);
  trends_cmd->add_option("--out", tr_out, "series.json ('-' for stdout)");
  trends_cmd->add_option("--type", tr_type, "only count this attack type (RSDoS|RA|DP)");
  trends_cmd->add_option("--label", tr_label, "series label");
  trends_cmd->add_option("--from", tr_from, "first day YYYY-MM-DD (default: earliest start)");
  trends_cmd->add_option("--to", tr_to, "last day YYYY-MM-DD (default: latest start)");
  trends_cmd->add_flag("--normalize", tr_normalize, "divide by the median of the baseline weeks");
  trends_cmd->add_option("--baseline", baseline, "baseline weeks for --normalize");
  trends_cmd->add_option("--ewma", ewma_span, "EWMA span applied to the written series");
  trends_cmd->add_option("--summary", tr_summary,
                         "write the linear-trend summary JSON (slope, intercept, net_change_4y, class, symbol)");

  // correlate
  auto* corr_cmd = app.add_subcommand("correlate", "Correlate two weekly series");
  std::string corr_a, corr_b, method = "spearman", corr_out = "-";
  bool quarterly = false;
  corr_cmd->add_option("--a", corr_a, "series.json")->required()->check(CLI::ExistingFile);
  corr_cmd->add_option("--b", corr_b, "series.json")->required()->check(CLI::ExistingFile);
  corr_cmd->add_option("--method", method, "spearman|pearson")->check(CLI::IsMember({"spearman", "pearson"}));
  corr_cmd->add_flag("--quarterly", quarterly, "also correlate 13-week slices per calendar quarter");
  corr_cmd->add_option("--out", corr_out, "JSON output ('-' for stdout)");

  // overlap
  auto* ov_cmd = app.add_subcommand("overlap", "Target overlap across observatories");
  std::vector<std::string> sets;
  bool upset = false;
  std::string ov_out = "-", ov_series_dir, ov_targets_dir;
  ov_cmd->add_option("--sets", sets, "name=path[,name=path...]; targets.csv or attacks.csv")->required();
  ov_cmd->add_flag("--upset", upset, "exclusive intersection counts");
  ov_cmd->add_option("--out", ov_out, "upset JSON ('-' for stdout)");
  ov_cmd->add_option("--timeseries", ov_series_dir, "directory for pairwise weekly overlap CSVs");
  ov_cmd->add_option("--targets", ov_targets_dir, "directory for per-set targets.csv");

  // confirm
  auto* conf_cmd = app.add_subcommand("confirm", "Privacy-preserving confirmation against hashed targets");
  std::vector<std::string> local;
  std::string external, salt, conf_out = "-", emit_hashes;
  conf_cmd->add_option("--local", local, "targets.csv, or name=path[,name=path...]")->required();
  conf_cmd->add_option("--external", external, "hashes.txt from the other party")->check(CLI::ExistingFile);
  conf_cmd->add_option("--salt", salt, "shared salt")->required();
  conf_cmd->add_option("--out", conf_out, "JSON output ('-' for stdout)");
  conf_cmd->add_option("--emit-hashes", emit_hashes, "write the local union as hashes.txt");

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run the whole pipeline and emit a report bundle");
  pipe_cmd->footer(kPipelineSchema);
  std::string pipe_config, pipe_out;
  std::optional<unsigned> parallelism;
  pipe_cmd->add_option("--config", pipe_config, "pipeline config JSON")->required()->check(CLI::ExistingFile);
  pipe_cmd->add_option("--out", pipe_out, "output directory (overrides config)");
  pipe_cmd->add_option("--parallelism", parallelism, "worker count (overrides config)")
      ->check(CLI::PositiveNumber);
  pipe_cmd->add_option("--seed", seed, "override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) {
      auto spec = synth::scenario_from_json(load_json(scenario_path));
      if (seed) spec.seed = *seed;
      synth::write_output(synth_out, synth::generate(spec, threads));
    } else if (*tel_cmd) {
      json cfg = tel_config.empty() ? json::object() : load_json(tel_config);
      if (n_addresses) cfg["n_addresses"] = *n_addresses;
      if (!observatory.empty()) cfg["observatory"] = observatory;
      if (!cfg.contains("n_addresses")) throw ConfigError("telescope size missing: use --config or --n-addresses");
      const auto tc = telescope_config_from_json(cfg);
      const auto table = io::read_packets(fs::path(det_in));
      const auto events = detect_rsdos(table.packets, tc, threads);
      if (det_out == "-") io::write_attacks(std::cout, events); else io::write_attacks(fs::path(det_out), events);
    } else if (*hp_cmd) {
      const auto preset = parse_honeypot_preset(preset_name);
      std::vector<fs::path> files;
      for (const auto& p : hp_inputs) {
        if (fs::is_directory(p)) {
          std::vector<fs::path> found;
          for (const auto& e : fs::directory_iterator(p)) {
            if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path());
          }
          std::sort(found.begin(), found.end());
          files.insert(files.end(), found.begin(), found.end());
        } else {
          files.emplace_back(p);
        }
      }
      std::vector<PacketRecord> packets;
      std::vector<Ipv4> sensors;
      for (const auto& f : files) {
        auto table = io::read_packets(f);
        if (table.sensors.empty()) {
          if (sensor_col) throw DataError(f.string() + ": no sensor_ip column");
          for (const auto& p : table.packets) sensors.push_back(p.dst_ip);
        } else {
          sensors.insert(sensors.end(), table.sensors.begin(), table.sensors.end());
        }
        packets.insert(packets.end(), table.packets.begin(), table.packets.end());
      }
      const auto split = split_by_sensor(packets, sensors);
      const auto traces = split.traces();
      const auto name = observatory.empty() ? preset_name : observatory;
      const auto raw = detect_honeypot_preset(traces, preset, name, newkid_prefix);
      const auto events = aggregate_sensors(raw, merge_gap.value_or(preset_timeout_s(preset)));
      if (det_out == "-") io::write_attacks(std::cout, events); else io::write_attacks(fs::path(det_out), events);
    } else if (*flow_cmd) {
      const auto ports = ports_text.empty() ? default_amplification_ports() : parse_ports(ports_text);
      const auto flows = io::read_flows(fs::path(det_in));
      const auto events = detect_flow(flows, ports, thresholds, observatory.empty() ? "flow" : observatory);
      if (det_out == "-") io::write_attacks(std::cout, events); else io::write_attacks(fs::path(det_out), events);
    } else if (*agg_cmd) {
      const auto routed = io::read_routed(fs::path(routed_path));
      const auto alloc = io::read_alloc(fs::path(alloc_path));
      const auto events = aggregate_carpet(io::read_attacks(fs::path(agg_in)), routed, alloc, carpet);
      if (agg_out == "-") io::write_attacks(std::cout, events); else io::write_attacks(fs::path(agg_out), events);
    } else if (*trends_cmd) {
      auto events = io::read_attacks(fs::path(tr_in));
      if (!tr_type.empty()) {
        const auto type = parse_attack_type(tr_type);
        std::erase_if(events, [&](const AttackEvent& e) { return e.attack_type != type; });
      }
      std::optional<Date> from, to;
      if (!tr_from.empty()) from = parse_date(tr_from);
      if (!tr_to.empty()) to = parse_date(tr_to);
      for (const auto& e : events) {
        const Date d = date_of(e.start_ts);
        if (tr_from.empty()) from = from ? std::min(*from, d) : d;
        if (tr_to.empty()) to = to ? std::max(*to, d) : d;
      }
      if (!from || !to) throw DataError(tr_in + ": no events and no --from/--to range");
      std::erase_if(events, [&](const AttackEvent& e) {
        const Date d = date_of(e.start_ts);
        return d < *from || d > *to;
      });
      auto series = weekly_counts(events, *from, *to, tr_label.empty() ? fs::path(tr_in).stem().string() : tr_label);
      if (tr_normalize) series = normalize(series, baseline);
      if (!tr_summary.empty()) {
        const auto t = linreg_trend(series);
        write_json(tr_summary, {{"series", series.label},
                                {"normalized", tr_normalize},
                                {"slope", t.slope},
                                {"intercept", t.intercept},
                                {"net_change_4y", t.net_change_4y},
                                {"class", std::string(to_string(t.trend))},
                                {"symbol", std::string(trend_symbol(t.trend))},
                                {"n", t.n}});
      }
      if (ewma_span) series = ewma(series, *ewma_span);
      if (tr_out == "-") std::cout << io::series_to_json(series) << '\n'; else io::write_series(tr_out, series);
    } else if (*corr_cmd) {
      const auto a = io::read_series(corr_a);
      const auto b = io::read_series(corr_b);
      ojson out = {{"a", a.label}, {"b", b.label}, {"method", method}};
      out.update(correlation_json(method == "pearson" ? pearson(a, b) : spearman(a, b)));
      if (quarterly) {
        ojson rows = ojson::array();
        for (const auto& q : quarterly_correlations(a, b)) {
          rows.push_back({{"quarter", q.quarter}, {"result", q.result ? correlation_json(*q.result) : ojson(nullptr)}});
        }
        out["quarterly"] = rows;
      }
      write_json(corr_out, out);
    } else if (*ov_cmd) {
      const auto named = parse_named(sets);
      std::vector<std::string> labels;
      std::vector<std::vector<TargetTuple>> start_sets;
      for (const auto& [name, path] : named) {
        labels.push_back(name);
        start_sets.push_back(load_targets(path, TargetMode::StartDate));
      }
      const TargetSetSystem sys(labels, start_sets);
      if (!ov_targets_dir.empty()) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
          io::write_targets(fs::path(ov_targets_dir) / (labels[i] + ".csv"), start_sets[i]);
        }
      }
      if (!ov_series_dir.empty()) {
        std::vector<std::vector<TargetTuple>> day_sets;
        for (const auto& [name, path] : named) day_sets.push_back(load_targets(path, TargetMode::PerDay));
        for (std::size_t i = 0; i < labels.size(); ++i) {
          for (std::size_t k = i + 1; k < labels.size(); ++k) {
            const auto ts = overlap_timeseries(day_sets[i], day_sets[k]);
            std::ostringstream csv;
            csv << "week_start," << labels[i] << ',' << labels[k] << ",both\n";
            for (std::size_t w = 0; w < ts.a.size(); ++w) {
              csv << format_date(ts.a.week(w)) << ',' << io::format_double(*ts.a.values[w]) << ','
                  << io::format_double(*ts.b.values[w]) << ',' << io::format_double(*ts.both.values[w]) << '\n';
            }
            io::write_file(fs::path(ov_series_dir) / (labels[i] + "__" + labels[k] + ".csv"), csv.str());
          }
        }
      }
      if (upset) {
        const auto counts = upset_exclusive(sys);
        ojson subsets = ojson::array();
        std::uint64_t total = 0;
        for (std::uint32_t mask = 1; mask < counts.size(); ++mask) {
          subsets.push_back({{"subset", subset_label(sys, mask)}, {"mask", mask}, {"count", counts[mask]}});
          total += counts[mask];
        }
        write_json(ov_out, {{"observatories", labels}, {"subsets", subsets}, {"union", total}});
      }
    } else if (*conf_cmd) {
      const auto named = parse_named(local);
      std::vector<std::string> labels;
      std::vector<std::vector<TargetTuple>> local_sets;
      for (const auto& [name, path] : named) {
        labels.push_back(name);
        local_sets.push_back(load_targets(path, TargetMode::StartDate));
      }
      const TargetSetSystem sys(labels, local_sets);
      if (!emit_hashes.empty()) {
        std::vector<TargetTuple> all;
        for (const auto& [tuple, mask] : sys.memberships()) all.push_back(tuple);
        std::string text;
        for (const auto& h : hash_targets(all, salt)) text += h + "\n";
        io::write_file(emit_hashes, text);
      }
      if (!external.empty()) {
        const auto digests = io::read_digests(fs::path(external));
        const std::unordered_set<std::string> ext(digests.begin(), digests.end());
        ojson rows = ojson::array();
        for (const auto& r : federated_confirm(sys, ext, salt)) {
          rows.push_back({{"subset", subset_label(sys, r.mask)},
                          {"mask", r.mask},
                          {"tuples", r.tuples},
                          {"confirmed", r.confirmed},
                          {"share", r.share}});
        }
        write_json(conf_out, rows);
      } else if (emit_hashes.empty()) {
        throw ConfigError("confirm needs --external and/or --emit-hashes");
      }
    } else if (*pipe_cmd) {
      json doc = load_json(pipe_config);
      if (seed) {
        if (!doc.contains("scenario")) throw ConfigError("--seed given but the config has no scenario");
        if (doc["scenario"].is_string()) {
          const auto base = fs::path(pipe_config).parent_path();
          fs::path sp = doc["scenario"].get<std::string>();
          doc["scenario"] = load_json((sp.is_absolute() ? sp : base / sp).string());
        }
        doc["scenario"]["seed"] = *seed;
      }
      auto cfg = pipeline_config_from_json(doc, fs::path(pipe_config).parent_path());
      if (!pipe_out.empty()) cfg.output_dir = pipe_out;
      if (parallelism) cfg.parallelism = *parallelism;
      run_pipeline(cfg);
    }
  } catch (const ConfigError& e) {
    return fail(2, "config error", e.what());
  } catch (const DataError& e) {
    return fail(3, "data error", e.what());
  } catch (const InvariantError& e) {
    return fail(4, "invariant violation", e.what());
  } catch (const std::exception& e) {
    return fail(4, "internal error", e.what());
  }
  return 0;
}
