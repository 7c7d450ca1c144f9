// Python module ddoscope._core. Events cross the boundary as dicts with the
// attacks.csv field names; IPs, prefixes and dates as strings.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <unordered_set>

#include "ddoscope/carpet.hpp"
#include "ddoscope/error.hpp"
#include "ddoscope/io.hpp"
#include "ddoscope/overlap.hpp"
#include "ddoscope/pipeline.hpp"
#include "ddoscope/synth.hpp"
#include "ddoscope/telescope.hpp"
#include "ddoscope/trends.hpp"

namespace py = pybind11;
using namespace ddoscope;
namespace fs = std::filesystem;

namespace {

using Values = std::vector<std::optional<double>>;

py::dict event_to_dict(const AttackEvent& e) {
  py::dict d;
  d["observatory"] = e.observatory;
  d["attack_type"] = std::string(to_string(e.attack_type));
  d["target"] = to_string(e.target);
  d["start_ts_us"] = e.start_ts;
  d["end_ts_us"] = e.end_ts;
  d["packets"] = e.packets;
  py::list sensors, members;
  for (auto s : e.sensors) sensors.append(to_string(s));
  for (const auto& m : e.members) members.append(to_string(m));
  d["sensors"] = sensors;
  d["members"] = members;
  return d;
}

AttackEvent event_from_dict(const py::dict& d) {
  AttackEvent e;
  e.observatory = d["observatory"].cast<std::string>();
  e.attack_type = parse_attack_type(d["attack_type"].cast<std::string>());
  e.target = parse_prefix(d["target"].cast<std::string>());
  e.start_ts = d["start_ts_us"].cast<Micros>();
  e.end_ts = d["end_ts_us"].cast<Micros>();
  e.packets = d["packets"].cast<std::uint64_t>();
  if (d.contains("sensors")) {
    for (const auto& s : d["sensors"]) e.sensors.push_back(parse_ipv4(s.cast<std::string>()));
    std::sort(e.sensors.begin(), e.sensors.end());
  }
  if (d.contains("members")) {
    for (const auto& m : d["members"]) e.members.push_back(parse_prefix(m.cast<std::string>()));
    std::sort(e.members.begin(), e.members.end());
  }
  return e;
}

py::list events_to_list(const std::vector<AttackEvent>& events) {
  py::list out;
  for (const auto& e : events) out.append(event_to_dict(e));
  return out;
}

std::vector<AttackEvent> events_from_list(const py::list& events) {
  std::vector<AttackEvent> out;
  for (const auto& e : events) out.push_back(event_from_dict(e.cast<py::dict>()));
  return out;
}

nlohmann::json parse_config(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
}

WeeklySeries as_series(Values values) { return WeeklySeries{parse_date("2000-01-03"), std::move(values), ""}; }

py::dict corr_to_dict(const CorrelationResult& r) {
  py::dict d;
  d["rho"] = r.rho;
  d["p_value"] = r.p_value;
  d["n"] = r.n;
  d["significant"] = r.significant;
  return d;
}

TargetSetSystem set_system(const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>& sets) {
  std::vector<std::string> labels;
  std::vector<std::vector<TargetTuple>> tuples;
  for (const auto& [name, rows] : sets) {
    labels.push_back(name);
    auto& t = tuples.emplace_back();
    for (const auto& [date, ip] : rows) t.push_back({parse_date(date), parse_ipv4(ip)});
  }
  return TargetSetSystem(std::move(labels), std::move(tuples));
}

ObservatoryConfig observatory(const std::string& name, ObservatoryKind kind, std::vector<fs::path> inputs) {
  ObservatoryConfig o;
  o.name = name;
  o.kind = kind;
  o.inputs = std::move(inputs);
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ddoscope detection and analysis core";
  m.attr("__version__") = std::string(kToolVersion);

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<DataError>(m, "DataError", base);
  py::register_exception<InvariantError>(m, "InvariantError", base);

  m.def(
      "min_detectable_rate",
      [](std::uint64_t n, double threshold, double window, double packet_bytes) {
        const auto r = min_detectable_rate(n, threshold, window, packet_bytes);
        return py::make_tuple(r.pps, r.bps);
      },
      py::arg("n_addresses"), py::arg("pkt_threshold") = 25, py::arg("window_s") = 300,
      py::arg("packet_bytes") = 110, "(pps, bps) a telescope of n addresses needs to see an attack");

  m.def(
      "detect_telescope",
      [](const fs::path& path, const std::string& config_json, unsigned threads) {
        auto o = observatory("", ObservatoryKind::Telescope, {path});
        o.telescope = telescope_config_from_json(parse_config(config_json));
        std::vector<AttackEvent> events;
        {
          py::gil_scoped_release release;
          events = detect_observatory(o, threads);
        }
        return events_to_list(events);
      },
      py::arg("path"), py::arg("config_json"), py::arg("threads") = 1);

  m.def(
      "detect_honeypot",
      [](std::vector<fs::path> paths, const std::string& preset, const std::string& name,
         std::optional<double> merge_gap, int newkid_prefix_len) {
        auto o = observatory(name, ObservatoryKind::Honeypot, std::move(paths));
        o.preset = parse_honeypot_preset(preset);
        o.merge_gap_s = merge_gap;
        o.newkid_prefix_len = newkid_prefix_len;
        return events_to_list(detect_observatory(o));
      },
      py::arg("paths"), py::arg("preset"), py::arg("observatory"), py::arg("merge_gap_s") = py::none(),
      py::arg("newkid_prefix_len") = 24);

  m.def(
      "detect_flow",
      [](const fs::path& path, const std::string& name, std::optional<std::set<std::uint16_t>> ports) {
        auto o = observatory(name, ObservatoryKind::Flow, {path});
        if (ports) o.ampl_ports = *ports;
        return events_to_list(detect_observatory(o));
      },
      py::arg("path"), py::arg("observatory") = "flow", py::arg("ampl_ports") = py::none());

  m.def(
      "aggregate_carpet",
      [](const py::list& events, const fs::path& routed, const fs::path& alloc, double gap, std::size_t min_targets) {
        CarpetOptions opt;
        opt.concurrency_gap_s = gap;
        opt.min_targets = min_targets;
        return events_to_list(
            aggregate_carpet(events_from_list(events), io::read_routed(routed), io::read_alloc(alloc), opt));
      },
      py::arg("events"), py::arg("routed"), py::arg("alloc"), py::arg("concurrency_gap_s") = 60,
      py::arg("min_targets") = 2);

  m.def("read_attacks", [](const fs::path& path) { return events_to_list(io::read_attacks(path)); });
  m.def("write_attacks",
        [](const fs::path& path, const py::list& events) { io::write_attacks(path, events_from_list(events)); });

  m.def(
      "weekly_counts",
      [](const py::list& events, const std::string& first, const std::string& last) {
        const auto s = weekly_counts(events_from_list(events), parse_date(first), parse_date(last));
        return py::make_tuple(format_date(s.start_week), s.values);
      },
      py::arg("events"), py::arg("first_day"), py::arg("last_day"),
      "(start_week, counts) of attacks starting in each ISO week");

  m.def(
      "normalize", [](Values v, std::size_t baseline) { return normalize(as_series(std::move(v)), baseline).values; },
      py::arg("values"), py::arg("baseline_weeks") = 15);
  m.def(
      "ewma", [](Values v, double span) { return ewma(as_series(std::move(v)), span).values; }, py::arg("values"),
      py::arg("span") = 12);
  m.def(
      "linreg_trend",
      [](Values v) {
        const auto t = linreg_trend(as_series(std::move(v)));
        py::dict d;
        d["slope"] = t.slope;
        d["intercept"] = t.intercept;
        d["net_change_4y"] = t.net_change_4y;
        d["trend"] = std::string(to_string(t.trend));
        d["n"] = t.n;
        return d;
      },
      py::arg("values"));
  m.def("classify_trend", [](double net) { return std::string(to_string(classify_trend(net))); });
  m.def("spearman", [](Values a, Values b) { return corr_to_dict(spearman(a, b)); });
  m.def("pearson", [](Values a, Values b) { return corr_to_dict(pearson(a, b)); });
  m.def(
      "quarterly_correlations",
      [](const std::string& start_week, Values a, Values b) {
        const Date start = parse_date(start_week);
        py::list out;
        for (const auto& q : quarterly_correlations({start, std::move(a), "a"}, {start, std::move(b), "b"})) {
          py::dict d;
          d["quarter"] = q.quarter;
          d["result"] = q.result ? py::object(corr_to_dict(*q.result)) : py::none();
          out.append(d);
        }
        return out;
      },
      py::arg("start_week"), py::arg("a"), py::arg("b"));

  m.def(
      "upset",
      [](const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>& sets) {
        const auto sys = set_system(sets);
        const auto counts = upset_exclusive(sys);
        py::list out;
        for (std::uint32_t mask = 1; mask < counts.size(); ++mask) {
          out.append(py::make_tuple(subset_label(sys, mask), mask, counts[mask]));
        }
        return out;
      },
      py::arg("sets"), "[(subset, mask, exclusive count)] for named sets of (date, ip) tuples");

  m.def("target_digest", [](const std::string& date, const std::string& ip, const std::string& salt) {
    return target_digest({parse_date(date), parse_ipv4(ip)}, salt);
  });
  m.def(
      "federated_confirm",
      [](const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>& sets,
         const std::vector<std::string>& digests, const std::string& salt) {
        const auto sys = set_system(sets);
        const std::unordered_set<std::string> external(digests.begin(), digests.end());
        py::list out;
        for (const auto& r : federated_confirm(sys, external, salt)) {
          out.append(py::make_tuple(subset_label(sys, r.mask), r.tuples, r.confirmed, r.share));
        }
        return out;
      },
      py::arg("sets"), py::arg("digests"), py::arg("salt"));

  m.def(
      "synth",
      [](const std::string& scenario_json, const fs::path& out, unsigned threads) {
        const auto spec = synth::scenario_from_json(parse_config(scenario_json));
        const auto output = synth::generate(spec, threads);
        synth::write_output(out, output);
        return synth::truth_to_json(output.truth).dump();
      },
      py::arg("scenario_json"), py::arg("out_dir"), py::arg("threads") = 1,
      "writes observatory inputs and returns the ground truth as JSON text");

  m.def(
      "run_pipeline",
      [](const std::string& config_json, const fs::path& base_dir, std::optional<fs::path> out,
         std::optional<unsigned> parallelism) {
        auto cfg = pipeline_config_from_json(parse_config(config_json), base_dir);
        if (out) cfg.output_dir = *out;
        if (parallelism) cfg.parallelism = *parallelism;
        {
          py::gil_scoped_release release;
          run_pipeline(cfg);
        }
        return io::read_file(cfg.output_dir / "manifest.json");
      },
      py::arg("config_json"), py::arg("base_dir"), py::arg("out_dir") = py::none(),
      py::arg("parallelism") = py::none(), "runs the pipeline and returns manifest.json text");
}
