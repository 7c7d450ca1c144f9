#include "ddoscope/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ddoscope/error.hpp"

namespace ddoscope::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Line reader that tracks numbers for error messages and strips CR.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw DataError(source_ + ":" + std::to_string(number_) + ": " + reason);
  }

  template <typename Fn>
  auto guarded(Fn&& fn) const {
    try {
      return fn();
    } catch (const DataError& e) {
      fail(e.what());
    }
  }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t number_ = 0;
};

template <typename T>
T parse_number(std::string_view text, std::string_view field) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw DataError("bad " + std::string(field) + " '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
T parse_bounded(std::string_view text, std::string_view field, std::uint64_t max) {
  const auto v = parse_number<std::uint64_t>(text, field);
  if (v > max) throw DataError(std::string(field) + " out of range: " + std::string(text));
  return static_cast<T>(v);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::string join_ips(const std::vector<Ipv4>& ips) {
  std::string out;
  for (std::size_t i = 0; i < ips.size(); ++i) {
    if (i) out += ';';
    out += to_string(ips[i]);
  }
  return out;
}

std::string join_prefixes(const std::vector<Prefix>& prefixes) {
  std::string out;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    if (i) out += ';';
    out += to_string(prefixes[i]);
  }
  return out;
}

void expect_header(LineReader& reader, std::string& line, std::string_view header) {
  if (!reader.next(line)) reader.fail("missing header, expected '" + std::string(header) + "'");
  if (line != header) reader.fail("bad header '" + line + "', expected '" + std::string(header) + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---- packets ---------------------------------------------------------------

PacketTable read_packets(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) reader.fail("missing header");
  bool with_sensor = false;
  if (line == std::string(kPacketsHeader) + ",sensor_ip") {
    with_sensor = true;
  } else if (line != kPacketsHeader) {
    reader.fail("bad header '" + line + "', expected '" + std::string(kPacketsHeader) + "'");
  }
  const std::size_t columns = with_sensor ? 9 : 8;

  PacketTable table;
  while (reader.next(line)) {
    reader.guarded([&] {
      const auto f = split(line);
      if (f.size() != columns) {
        throw DataError("expected " + std::to_string(columns) + " columns, got " + std::to_string(f.size()));
      }
      PacketRecord p;
      p.ts = parse_number<Micros>(f[0], "ts_us");
      p.protocol = parse_bounded<std::uint8_t>(f[1], "protocol", 255);
      p.src_ip = parse_ipv4(f[2]);
      p.src_port = parse_bounded<std::uint16_t>(f[3], "src_port", 65535);
      p.dst_ip = parse_ipv4(f[4]);
      p.dst_port = parse_bounded<std::uint16_t>(f[5], "dst_port", 65535);
      p.len_bytes = parse_bounded<std::uint32_t>(f[6], "len_bytes", 0xffffffffu);
      p.tcp_flags = parse_tcp_flags(f[7]);
      validate(p);
      table.packets.push_back(p);
      if (with_sensor) table.sensors.push_back(parse_ipv4(f[8]));
      return 0;
    });
  }
  return table;
}

PacketTable read_packets(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_packets(in, path.string());
}

void write_packets(std::ostream& out, std::span<const PacketRecord> packets) {
  out << kPacketsHeader << '\n';
  for (const auto& p : packets) {
    out << p.ts << ',' << unsigned{p.protocol} << ',' << to_string(p.src_ip) << ',' << p.src_port << ','
        << to_string(p.dst_ip) << ',' << p.dst_port << ',' << p.len_bytes << ',' << format_tcp_flags(p.tcp_flags)
        << '\n';
  }
}

void write_packets(const std::filesystem::path& path, std::span<const PacketRecord> packets) {
  std::ostringstream ss;
  write_packets(ss, packets);
  write_file(path, ss.str());
}

// ---- attacks ---------------------------------------------------------------

std::vector<AttackEvent> read_attacks(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) reader.fail("missing header");
  bool with_members = false;
  if (line == std::string(kAttacksHeader) + ",members") {
    with_members = true;
  } else if (line != kAttacksHeader) {
    reader.fail("bad header '" + line + "', expected '" + std::string(kAttacksHeader) + "'");
  }
  const std::size_t columns = with_members ? 8 : 7;

  std::vector<AttackEvent> events;
  while (reader.next(line)) {
    reader.guarded([&] {
      const auto f = split(line);
      if (f.size() != columns) {
        throw DataError("expected " + std::to_string(columns) + " columns, got " + std::to_string(f.size()));
      }
      AttackEvent ev;
      ev.observatory = std::string(f[0]);
      ev.attack_type = parse_attack_type(f[1]);
      ev.target = parse_prefix(f[2]);
      ev.start_ts = parse_number<Micros>(f[3], "start_ts_us");
      ev.end_ts = parse_number<Micros>(f[4], "end_ts_us");
      ev.packets = parse_number<std::uint64_t>(f[5], "packets");
      if (!f[6].empty()) {
        for (auto s : split(f[6], ';')) ev.sensors.push_back(parse_ipv4(s));
        std::sort(ev.sensors.begin(), ev.sensors.end());
        ev.sensors.erase(std::unique(ev.sensors.begin(), ev.sensors.end()), ev.sensors.end());
      }
      if (with_members && !f[7].empty()) {
        for (auto s : split(f[7], ';')) ev.members.push_back(parse_prefix(s));
        std::sort(ev.members.begin(), ev.members.end());
      }
      if (ev.start_ts > ev.end_ts) throw DataError("start_ts_us after end_ts_us");
      events.push_back(std::move(ev));
      return 0;
    });
  }
  return events;
}

std::vector<AttackEvent> read_attacks(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_attacks(in, path.string());
}

void write_attacks(std::ostream& out, std::span<const AttackEvent> events) {
  const bool with_members =
      std::any_of(events.begin(), events.end(), [](const AttackEvent& e) { return !e.members.empty(); });
  out << kAttacksHeader << (with_members ? ",members" : "") << '\n';
  for (const auto& ev : events) {
    if (ev.observatory.find_first_of(",\n") != std::string::npos) {
      throw DataError("observatory name contains a separator: '" + ev.observatory + "'");
    }
    out << ev.observatory << ',' << to_string(ev.attack_type) << ',' << to_string(ev.target) << ',' << ev.start_ts
        << ',' << ev.end_ts << ',' << ev.packets << ',' << join_ips(ev.sensors);
    if (with_members) out << ',' << join_prefixes(ev.members);
    out << '\n';
  }
}

void write_attacks(const std::filesystem::path& path, std::span<const AttackEvent> events) {
  std::ostringstream ss;
  write_attacks(ss, events);
  write_file(path, ss.str());
}

// ---- flows -----------------------------------------------------------------

std::vector<FlowSummary> read_flows(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  expect_header(reader, line, kFlowsHeader);
  std::vector<FlowSummary> flows;
  while (reader.next(line)) {
    reader.guarded([&] {
      const auto f = split(line);
      if (f.size() != 7) throw DataError("expected 7 columns, got " + std::to_string(f.size()));
      FlowSummary s;
      s.target_ip = parse_ipv4(f[0]);
      s.protocol = parse_bounded<std::uint8_t>(f[1], "protocol", 255);
      s.src_port = parse_bounded<std::uint16_t>(f[2], "src_port", 65535);
      s.distinct_src_ips = parse_number<std::uint64_t>(f[3], "distinct_src_ips");
      s.bitrate_bps = parse_number<double>(f[4], "bitrate_bps");
      s.start_ts = parse_number<Micros>(f[5], "start_ts_us");
      s.end_ts = parse_number<Micros>(f[6], "end_ts_us");
      if (s.distinct_src_ips < 1) throw DataError("distinct_src_ips must be >= 1");
      if (!(s.bitrate_bps >= 0)) throw DataError("bitrate_bps must be >= 0");
      if (s.start_ts > s.end_ts) throw DataError("start_ts_us after end_ts_us");
      flows.push_back(s);
      return 0;
    });
  }
  return flows;
}

std::vector<FlowSummary> read_flows(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_flows(in, path.string());
}

void write_flows(std::ostream& out, std::span<const FlowSummary> flows) {
  out << kFlowsHeader << '\n';
  for (const auto& s : flows) {
    out << to_string(s.target_ip) << ',' << unsigned{s.protocol} << ',' << s.src_port << ',' << s.distinct_src_ips
        << ',' << format_double(s.bitrate_bps) << ',' << s.start_ts << ',' << s.end_ts << '\n';
  }
}

void write_flows(const std::filesystem::path& path, std::span<const FlowSummary> flows) {
  std::ostringstream ss;
  write_flows(ss, flows);
  write_file(path, ss.str());
}

// ---- prefix tables ---------------------------------------------------------

RoutedPrefixTable read_routed(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  expect_header(reader, line, kRoutedHeader);
  std::vector<RoutedEntry> entries;
  while (reader.next(line)) {
    reader.guarded([&] {
      const auto f = split(line);
      if (f.size() != 2) throw DataError("expected 2 columns");
      entries.push_back({parse_prefix(f[0]), parse_bounded<std::uint32_t>(f[1], "asn", 0xffffffffu)});
      return 0;
    });
  }
  return RoutedPrefixTable(entries);
}

RoutedPrefixTable read_routed(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_routed(in, path.string());
}

AllocationTable read_alloc(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  expect_header(reader, line, kAllocHeader);
  std::vector<AllocationBlock> blocks;
  while (reader.next(line)) {
    reader.guarded([&] {
      const auto f = split(line);
      if (f.size() != 2) throw DataError("expected 2 columns");
      blocks.push_back({parse_prefix(f[0]), std::string(f[1])});
      return 0;
    });
  }
  try {
    return AllocationTable(std::move(blocks));
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

AllocationTable read_alloc(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_alloc(in, path.string());
}

// ---- targets & digests -----------------------------------------------------

std::vector<TargetTuple> read_targets(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  expect_header(reader, line, kTargetsHeader);
  std::vector<TargetTuple> tuples;
  while (reader.next(line)) {
    reader.guarded([&] {
      const auto f = split(line);
      if (f.size() != 2) throw DataError("expected 2 columns");
      tuples.push_back({parse_date(f[0]), parse_ipv4(f[1])});
      return 0;
    });
  }
  return tuples;
}

std::vector<TargetTuple> read_targets(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_targets(in, path.string());
}

void write_targets(std::ostream& out, std::span<const TargetTuple> tuples) {
  out << kTargetsHeader << '\n';
  for (const auto& t : tuples) out << format_date(t.date) << ',' << to_string(t.ip) << '\n';
}

void write_targets(const std::filesystem::path& path, std::span<const TargetTuple> tuples) {
  std::ostringstream ss;
  write_targets(ss, tuples);
  write_file(path, ss.str());
}

std::vector<std::string> read_digests(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  std::vector<std::string> out;
  while (reader.next(line)) {
    const bool hex = std::all_of(line.begin(), line.end(),
                                 [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
    if (line.size() != 64 || !hex) reader.fail("expected a lowercase hex SHA-256 digest");
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> read_digests(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_digests(in, path.string());
}

// ---- series ----------------------------------------------------------------

std::string series_to_json(const WeeklySeries& series) {
  nlohmann::ordered_json j;
  j["label"] = series.label;
  j["start_week"] = format_date(series.start_week);
  auto values = nlohmann::ordered_json::array();
  for (const auto& v : series.values) {
    if (v) {
      values.push_back(*v);
    } else {
      values.push_back(nullptr);
    }
  }
  j["values"] = std::move(values);
  return j.dump(2) + "\n";
}

WeeklySeries series_from_json(std::string_view text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
  try {
    WeeklySeries s;
    s.label = j.at("label").get<std::string>();
    s.start_week = parse_date(j.at("start_week").get<std::string>());
    if (week_start(s.start_week) != s.start_week) {
      throw DataError("start_week " + format_date(s.start_week) + " is not a Monday");
    }
    for (const auto& v : j.at("values")) {
      if (v.is_null()) {
        s.values.emplace_back(std::nullopt);
      } else {
        const double x = v.get<double>();
        if (!(x >= 0)) throw DataError("negative or NaN value");
        s.values.emplace_back(x);
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(source + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

WeeklySeries read_series(const std::filesystem::path& path) {
  return series_from_json(read_file(path), path.string());
}

void write_series(const std::filesystem::path& path, const WeeklySeries& series) {
  write_file(path, series_to_json(series));
}

}  // namespace ddoscope::io
