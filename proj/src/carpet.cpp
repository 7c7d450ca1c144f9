#include "ddoscope/carpet.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ddoscope/error.hpp"

namespace ddoscope {

namespace {

class CarpetMerger {
 public:
  CarpetMerger(const RoutedPrefixTable& routed, const CarpetOptions& options, std::vector<AttackEvent>& out)
      : routed_(routed), options_(options), out_(out) {}

  // `group` holds events whose targets share one allocation block.
  void process(std::vector<const AttackEvent*> group) {
    std::set<Prefix> targets;
    for (const auto* ev : group) targets.insert(ev->target);
    if (targets.size() < options_.min_targets) {
      for (const auto* ev : group) out_.push_back(*ev);
      return;
    }
    const std::vector<Prefix> target_list(targets.begin(), targets.end());
    const Prefix common = covering_prefix(target_list);
    const auto route = routed_.longest_covering(common);
    if (route && route->prefix.length() >= options_.min_prefix_len &&
        route->prefix.length() <= options_.max_prefix_len) {
      out_.push_back(merge(group, route->prefix));
      return;
    }
    // Split on the first bit past the common prefix. Nested targets (one
    // target prefix containing another) cannot be separated this way.
    std::vector<const AttackEvent*> low, high;
    const std::uint32_t bit = std::uint32_t{1} << (31 - common.length());
    for (const auto* ev : group) (ev->target.network().value & bit ? high : low).push_back(ev);
    if (low.empty() || high.empty()) {
      for (const auto* ev : group) out_.push_back(*ev);
      return;
    }
    process(std::move(low));
    process(std::move(high));
  }

 private:
  static AttackEvent merge(const std::vector<const AttackEvent*>& group, const Prefix& target) {
    AttackEvent merged = *group.front();
    merged.target = target;
    bool all_bytes = true;
    std::uint64_t bytes = 0;
    std::set<Ipv4> sensors;
    std::set<Prefix> members;
    merged.packets = 0;
    for (const auto* ev : group) {
      merged.start_ts = std::min(merged.start_ts, ev->start_ts);
      merged.end_ts = std::max(merged.end_ts, ev->end_ts);
      merged.packets += ev->packets;
      if (ev->bytes) {
        bytes += *ev->bytes;
      } else {
        all_bytes = false;
      }
      sensors.insert(ev->sensors.begin(), ev->sensors.end());
      members.insert(ev->target);
    }
    merged.bytes = all_bytes ? std::optional(bytes) : std::nullopt;
    merged.source_ips.reset();
    merged.sensors.assign(sensors.begin(), sensors.end());
    merged.members.assign(members.begin(), members.end());
    return merged;
  }

  const RoutedPrefixTable& routed_;
  const CarpetOptions& options_;
  std::vector<AttackEvent>& out_;
};

}  // namespace

std::vector<AttackEvent> aggregate_carpet(std::span<const AttackEvent> events, const RoutedPrefixTable& routed,
                                          const AllocationTable& alloc, const CarpetOptions& options) {
  if (routed.empty()) throw ConfigError("carpet aggregation needs a routed prefix table");
  if (alloc.empty()) throw ConfigError("carpet aggregation needs an allocation table");
  if (options.min_targets < 1) throw ConfigError("min_targets must be >= 1");
  if (options.concurrency_gap_s < 0) throw ConfigError("concurrency gap must be non-negative");
  const Micros gap = seconds_to_micros(options.concurrency_gap_s);

  std::map<std::pair<std::string, AttackType>, std::vector<const AttackEvent*>> streams;
  for (const auto& ev : events) streams[{ev.observatory, ev.attack_type}].push_back(&ev);

  std::vector<AttackEvent> out;
  CarpetMerger merger(routed, options, out);

  auto flush_cluster = [&](const std::vector<const AttackEvent*>& cluster) {
    std::map<Prefix, std::vector<const AttackEvent*>> by_block;
    for (const auto* ev : cluster) {
      const auto block = ev->members.empty() ? alloc.find(ev->target) : std::nullopt;
      if (block) {
        by_block[block->prefix].push_back(ev);
      } else {
        out.push_back(*ev);
      }
    }
    for (auto& [block, group] : by_block) merger.process(std::move(group));
  };

  for (auto& [key, stream] : streams) {
    std::sort(stream.begin(), stream.end(),
              [](const AttackEvent* a, const AttackEvent* b) { return canonical_less(*a, *b); });
    std::vector<const AttackEvent*> cluster;
    Micros cluster_end = 0;
    for (const auto* ev : stream) {
      if (!cluster.empty() && ev->start_ts > cluster_end + gap) {
        flush_cluster(cluster);
        cluster.clear();
      }
      cluster_end = cluster.empty() ? ev->end_ts : std::max(cluster_end, ev->end_ts);
      cluster.push_back(ev);
    }
    if (!cluster.empty()) flush_cluster(cluster);
  }
  sort_canonical(out);
  return out;
}

}  // namespace ddoscope
