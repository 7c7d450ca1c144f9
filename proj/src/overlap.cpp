#include "ddoscope/overlap.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "ddoscope/digest.hpp"
#include "ddoscope/error.hpp"

namespace ddoscope {

using std::chrono::days;

namespace {

void sort_unique(std::vector<TargetTuple>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<TargetTuple> build_targets(std::span<const AttackEvent> events, TargetMode mode) {
  std::vector<TargetTuple> out;
  for (const auto& ev : events) {
    std::vector<Ipv4> hosts;
    if (ev.members.empty()) {
      hosts.push_back(ev.target.network());
    } else {
      for (const auto& m : ev.members) hosts.push_back(m.network());
    }
    const Date first = date_of(ev.start_ts);
    const Date last = mode == TargetMode::PerDay ? date_of(ev.end_ts) : first;
    for (Date d = first; d <= last; d += days{1}) {
      for (auto ip : hosts) out.push_back({d, ip});
    }
  }
  sort_unique(out);
  return out;
}

TargetSetSystem::TargetSetSystem(std::vector<std::string> labels, std::vector<std::vector<TargetTuple>> sets)
    : labels_(std::move(labels)), sets_(std::move(sets)) {
  if (labels_.size() != sets_.size()) throw ConfigError("one label per target set required");
  if (labels_.empty()) throw ConfigError("at least one observatory required");
  if (labels_.size() > kMaxObservatories) {
    throw ConfigError("at most " + std::to_string(kMaxObservatories) + " observatories supported");
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw ConfigError("duplicate observatory label '" + l + "'");
  }
  for (auto& s : sets_) sort_unique(s);
}

std::vector<std::pair<TargetTuple, std::uint32_t>> TargetSetSystem::memberships() const {
  std::unordered_map<TargetTuple, std::uint32_t> masks;
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    for (const auto& t : sets_[i]) masks[t] |= std::uint32_t{1} << i;
  }
  std::vector<std::pair<TargetTuple, std::uint32_t>> out(masks.begin(), masks.end());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

std::string subset_label(const TargetSetSystem& sys, std::uint32_t mask) {
  std::string out;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (mask >> i & 1u) {
      if (!out.empty()) out += '&';
      out += sys.labels()[i];
    }
  }
  return out;
}

std::vector<std::uint64_t> upset_exclusive(const TargetSetSystem& sys) {
  std::vector<std::uint64_t> counts(std::size_t{1} << sys.size(), 0);
  std::unordered_map<TargetTuple, std::uint32_t> masks;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    for (const auto& t : sys.set(i)) masks[t] |= std::uint32_t{1} << i;
  }
  for (const auto& [t, mask] : masks) ++counts[mask];
  return counts;
}

OverlapSeries overlap_timeseries(std::span<const TargetTuple> a, std::span<const TargetTuple> b) {
  std::map<Date, std::uint64_t> per_a, per_b, per_both;
  std::set<TargetTuple> set_a(a.begin(), a.end());
  std::set<TargetTuple> set_b(b.begin(), b.end());
  for (const auto& t : set_a) {
    ++per_a[t.date];
    if (set_b.contains(t)) ++per_both[t.date];
  }
  for (const auto& t : set_b) ++per_b[t.date];

  OverlapSeries out;
  out.a.label = "a";
  out.b.label = "b";
  out.both.label = "a&b";
  if (set_a.empty() && set_b.empty()) {
    const Date epoch_week = week_start(Date{});
    out.a.start_week = out.b.start_week = out.both.start_week = epoch_week;
    return out;
  }
  Date first = Date::max(), last = Date::min();
  for (const auto* m : {&per_a, &per_b}) {
    if (!m->empty()) {
      first = std::min(first, m->begin()->first);
      last = std::max(last, m->rbegin()->first);
    }
  }
  const Date start = week_start(first);
  const auto weeks = static_cast<std::size_t>((last - start).count() / 7 + 1);
  for (auto* s : {&out.a, &out.b, &out.both}) {
    s->start_week = start;
    s->values.assign(weeks, 0.0);
  }
  auto fill = [&](const std::map<Date, std::uint64_t>& per_day, WeeklySeries& s) {
    for (const auto& [day, n] : per_day) *s.values[(day - start).count() / 7] += static_cast<double>(n);
  };
  fill(per_a, out.a);
  fill(per_b, out.b);
  fill(per_both, out.both);
  return out;
}

std::vector<NewRecurringWeek> new_vs_recurring(std::span<const TargetTuple> tuples) {
  std::vector<TargetTuple> sorted(tuples.begin(), tuples.end());
  sort_unique(sorted);
  std::vector<NewRecurringWeek> out;
  if (sorted.empty()) return out;

  const Date start = week_start(sorted.front().date);
  const auto weeks = static_cast<std::size_t>((sorted.back().date - start).count() / 7 + 1);
  out.resize(weeks);
  for (std::size_t w = 0; w < weeks; ++w) out[w].week = start + days{7 * static_cast<long>(w)};

  // Tuples are sorted by date, so an address is new exactly on its first date.
  std::unordered_set<Ipv4> seen;
  for (const auto& t : sorted) {
    auto& row = out[(t.date - start).count() / 7];
    if (seen.insert(t.ip).second) {
      ++row.new_targets;
    } else {
      ++row.recurring;
    }
  }
  std::uint64_t cumulative = 0;
  for (auto& row : out) {
    cumulative += row.new_targets;
    row.cumulative_new = cumulative;
  }
  return out;
}

std::vector<AsShare> as_attribution(std::span<const TargetTuple> tuples, const RoutedPrefixTable& routed,
                                    std::size_t top_n) {
  std::map<std::uint32_t, std::uint64_t> by_asn;
  std::uint64_t unrouted = 0;
  for (const auto& t : tuples) {
    if (auto hit = routed.longest_match(t.ip)) {
      ++by_asn[hit->asn];
    } else {
      ++unrouted;
    }
  }
  std::vector<std::pair<std::uint32_t, std::uint64_t>> ranked(by_asn.begin(), by_asn.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });

  const double total = static_cast<double>(tuples.size());
  auto share = [total](std::uint64_t n) { return total > 0 ? static_cast<double>(n) / total : 0.0; };

  std::vector<AsShare> out;
  std::uint64_t other = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < top_n) {
      out.push_back({AsShare::Kind::Asn, ranked[i].first, ranked[i].second, share(ranked[i].second)});
    } else {
      other += ranked[i].second;
    }
  }
  if (other > 0) out.push_back({AsShare::Kind::Other, 0, other, share(other)});
  if (unrouted > 0) out.push_back({AsShare::Kind::Unrouted, 0, unrouted, share(unrouted)});
  return out;
}

std::string target_digest(const TargetTuple& tuple, std::string_view salt) {
  std::string message;
  message.reserve(salt.size() + 28);
  message.append(salt);
  message += '|';
  message += format_date(tuple.date);
  message += '|';
  message += to_string(tuple.ip);

  return sha256_hex(message);
}

std::vector<std::string> hash_targets(std::span<const TargetTuple> tuples, std::string_view salt) {
  std::vector<std::string> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) out.push_back(target_digest(t, salt));
  return out;
}

std::vector<SubsetConfirmation> federated_confirm(const TargetSetSystem& local,
                                                  const std::unordered_set<std::string>& external,
                                                  std::string_view salt) {
  std::vector<SubsetConfirmation> out(std::size_t{1} << local.size());
  for (std::uint32_t mask = 0; mask < out.size(); ++mask) out[mask].mask = mask;
  for (const auto& [tuple, mask] : local.memberships()) {
    auto& row = out[mask];
    ++row.tuples;
    if (external.contains(target_digest(tuple, salt))) ++row.confirmed;
  }
  for (auto& row : out) {
    row.share = row.tuples ? static_cast<double>(row.confirmed) / static_cast<double>(row.tuples) : 0.0;
  }
  out.erase(out.begin());  // drop the empty subset
  return out;
}

}  // namespace ddoscope
