#include "ddoscope/telescope.hpp"

#include <algorithm>
#include <deque>
#include <iterator>
#include <limits>
#include <optional>
#include <thread>
#include <unordered_map>

#include "ddoscope/error.hpp"

namespace ddoscope {

void TelescopeConfig::validate() const {
  if (n_addresses < 1 || n_addresses > (std::uint64_t{1} << 32)) {
    throw ConfigError("n_addresses must lie in [1, 2^32]");
  }
  if (!(interval_s > 0)) throw ConfigError("interval must be positive");
  if (pkt_threshold < 1) throw ConfigError("pkt_threshold must be positive");
  if (!(duration_threshold_s >= 0)) throw ConfigError("duration_threshold must be non-negative");
  if (rate_threshold.packets < 1) throw ConfigError("rate threshold packets must be positive");
  if (!(rate_threshold.slide_s > 0 && rate_threshold.window_s > rate_threshold.slide_s)) {
    throw ConfigError("rate threshold needs window > slide > 0");
  }
}

std::vector<PacketRecord> backscatter_prefilter(std::span<const PacketRecord> packets, BackscatterFilter filter) {
  if (filter == BackscatterFilter::None) return {packets.begin(), packets.end()};
  std::vector<PacketRecord> out;
  for (const auto& p : packets) {
    bool keep = p.protocol == kProtoIcmp;
    if (p.protocol == kProtoTcp) {
      const bool syn_ack = (p.tcp_flags & tcp::kSyn) && (p.tcp_flags & tcp::kAck);
      keep = syn_ack || (p.tcp_flags & tcp::kRst);
    }
    if (keep) out.push_back(p);
  }
  return out;
}

namespace {

Micros floor_div(Micros a, Micros b) {
  Micros q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Params {
  Micros interval;
  Micros duration;
  Micros window;
  Micros slide;
  std::uint64_t pkt_threshold;
  std::uint64_t rate_packets;
};

struct FlowState {
  Micros first_ts = 0;
  Micros last_ts = 0;
  Micros last_interval = 0;
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  bool rate_met = false;
  std::deque<std::pair<Micros, std::uint64_t>> windows;  // (window index, packets), ascending
};

using FlowKey = std::uint64_t;

FlowKey key_of(const PacketRecord& p) {
  return (std::uint64_t{p.protocol} << 32) | p.src_ip.value;
}

class RsdosDetector {
 public:
  RsdosDetector(const Params& params, std::string observatory)
      : params_(params), observatory_(std::move(observatory)) {}

  void add(const PacketRecord& p) {
    const Micros iv = floor_div(p.ts, params_.interval);
    if (!current_interval_ || iv > *current_interval_) {
      current_interval_ = iv;
      expire_before(iv - 1);
    }
    auto [it, fresh] = flows_.try_emplace(key_of(p));
    auto& f = it->second;
    if (fresh) {
      f.first_ts = p.ts;
    }
    f.last_ts = p.ts;
    f.last_interval = iv;
    ++f.packets;
    f.bytes += p.len_bytes;
    if (!f.rate_met) update_windows(f, p.ts);
  }

  std::vector<AttackEvent> finish() {
    expire_before(std::numeric_limits<Micros>::max());
    return std::move(events_);
  }

 private:
  // Ends every flow whose last packet fell in an interval before `interval`.
  void expire_before(Micros interval) {
    for (auto it = flows_.begin(); it != flows_.end();) {
      if (it->second.last_interval < interval) {
        emit(it->first, it->second);
        it = flows_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void update_windows(FlowState& f, Micros ts) {
    const Micros k_hi = floor_div(ts, params_.slide);
    const Micros k_lo = floor_div(ts - params_.window, params_.slide) + 1;
    while (!f.windows.empty() && f.windows.front().first < k_lo) f.windows.pop_front();
    for (Micros k = k_lo; k <= k_hi; ++k) {
      auto w = std::find_if(f.windows.begin(), f.windows.end(), [k](const auto& e) { return e.first == k; });
      if (w == f.windows.end()) {
        f.windows.emplace_back(k, 1);
        w = std::prev(f.windows.end());
      } else {
        ++w->second;
      }
      if (w->second >= params_.rate_packets) {
        f.rate_met = true;
        f.windows.clear();
        return;
      }
    }
  }

  void emit(FlowKey key, const FlowState& f) {
    const bool attack = f.packets >= params_.pkt_threshold && (f.last_ts - f.first_ts) >= params_.duration &&
                        f.rate_met;
    if (!attack) return;
    AttackEvent ev;
    ev.observatory = observatory_;
    ev.attack_type = AttackType::RSDoS;
    ev.target = Prefix::host(Ipv4{static_cast<std::uint32_t>(key & 0xffffffffu)});
    ev.start_ts = f.first_ts;
    ev.end_ts = f.last_ts;
    ev.packets = f.packets;
    ev.bytes = f.bytes;
    events_.push_back(std::move(ev));
  }

  Params params_;
  std::string observatory_;
  std::optional<Micros> current_interval_;
  std::unordered_map<FlowKey, FlowState> flows_;
  std::vector<AttackEvent> events_;
};

void check_sorted(std::span<const PacketRecord> packets) {
  for (std::size_t i = 1; i < packets.size(); ++i) {
    if (packets[i].ts < packets[i - 1].ts) {
      throw DataError("packets not time-ordered: record " + std::to_string(i + 1) + " (ts_us=" +
                      std::to_string(packets[i].ts) + ") precedes record " + std::to_string(i) +
                      " (ts_us=" + std::to_string(packets[i - 1].ts) + ")");
    }
  }
}

}  // namespace

std::vector<AttackEvent> detect_rsdos(std::span<const PacketRecord> packets, const TelescopeConfig& cfg,
                                      unsigned threads) {
  cfg.validate();
  check_sorted(packets);
  const auto filtered = backscatter_prefilter(packets, cfg.backscatter_filter);

  const Params params{
      seconds_to_micros(cfg.interval_s),
      seconds_to_micros(cfg.duration_threshold_s),
      seconds_to_micros(cfg.rate_threshold.window_s),
      seconds_to_micros(cfg.rate_threshold.slide_s),
      cfg.pkt_threshold,
      cfg.rate_threshold.packets,
  };
  if (params.interval <= 0 || params.slide <= 0 || params.window <= params.slide) {
    throw ConfigError("interval, window and slide must be at least one microsecond apart");
  }

  std::vector<AttackEvent> events;
  threads = std::max(1u, threads);
  if (threads == 1) {
    RsdosDetector detector(params, cfg.observatory);
    for (const auto& p : filtered) detector.add(p);
    events = detector.finish();
  } else {
    // Flow outcomes depend only on the flow's own packets, so any partition
    // by key yields the same event set.
    std::vector<std::vector<AttackEvent>> parts(threads);
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        RsdosDetector detector(params, cfg.observatory);
        for (const auto& p : filtered) {
          if (std::hash<FlowKey>{}(key_of(p)) % threads == w) detector.add(p);
        }
        parts[w] = detector.finish();
      });
    }
    for (auto& t : workers) t.join();
    for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(events));
  }
  sort_canonical(events);
  return events;
}

DetectableRate min_detectable_rate(std::uint64_t n_addresses, double pkt_threshold, double window_s,
                                   double packet_bytes) {
  if (n_addresses == 0) throw ConfigError("telescope size must be positive");
  if (n_addresses > (std::uint64_t{1} << 32)) throw ConfigError("telescope size exceeds the IPv4 space");
  if (!(pkt_threshold > 0 && window_s > 0 && packet_bytes > 0)) {
    throw ConfigError("threshold, window and packet size must be positive");
  }
  const double coverage = static_cast<double>(n_addresses) / 4294967296.0;
  DetectableRate r;
  r.pps = pkt_threshold / (coverage * window_s);
  r.bps = r.pps * packet_bytes * 8.0;
  return r;
}

}  // namespace ddoscope
