#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>

#include "ddoscope/digest.hpp"
#include "ddoscope/overlap.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace ddoscope;
using namespace std::chrono;

namespace {

const Date kDay = sys_days{year{2021} / 3 / 1};  // Monday

AttackEvent event(const char* target, Date day, int days_long = 0) {
  AttackEvent e;
  e.observatory = "x";
  e.target = parse_prefix(target);
  e.start_ts = micros_of(day) + 3600 * kMicrosPerSecond;
  e.end_ts = e.start_ts + days_long * kMicrosPerDay;
  return e;
}

TargetTuple tuple(int day, std::uint32_t ip) { return {kDay + days{day}, Ipv4{ip}}; }

std::vector<TargetTuple> tuples(std::initializer_list<std::uint32_t> ips) {
  std::vector<TargetTuple> out;
  for (auto ip : ips) out.push_back(tuple(0, ip));
  return out;
}

}  // namespace

TEST(BuildTargets, Modes) {
  const std::vector<AttackEvent> one{event("198.51.100.1", kDay)};
  EXPECT_EQ(build_targets(one, TargetMode::StartDate), build_targets(one, TargetMode::PerDay));
  const std::vector<AttackEvent> three{event("198.51.100.1", kDay, 2)};
  EXPECT_EQ(build_targets(three, TargetMode::StartDate).size(), 1u);
  EXPECT_EQ(build_targets(three, TargetMode::PerDay).size(), 3u);
  const std::vector<AttackEvent> dup{event("198.51.100.1", kDay), event("198.51.100.1", kDay)};
  EXPECT_EQ(build_targets(dup, TargetMode::StartDate).size(), 1u);
}

TEST(BuildTargets, AggregatedEventsExpandMembers) {
  auto e = event("198.51.100.0/24", kDay);
  e.members = {parse_prefix("198.51.100.1"), parse_prefix("198.51.100.9")};
  const auto t = build_targets(std::vector{e}, TargetMode::StartDate);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1].ip, parse_ipv4("198.51.100.9"));
}

TEST(Upset, WorkedExample) {
  const TargetSetSystem sys({"A", "B", "C"}, {tuples({1, 2, 3}), tuples({2, 3, 4}), tuples({3, 4, 5})});
  const auto c = upset_exclusive(sys);
  ASSERT_EQ(c.size(), 8u);
  EXPECT_EQ(c[0b001], 1u);  // A
  EXPECT_EQ(c[0b011], 1u);  // A&B
  EXPECT_EQ(c[0b111], 1u);
  EXPECT_EQ(c[0b110], 1u);  // B&C
  EXPECT_EQ(c[0b100], 1u);  // C
  EXPECT_EQ(c[0b010], 0u);
  EXPECT_EQ(c[0b101], 0u);
  EXPECT_EQ(subset_label(sys, 0b110), "B&C");
}

TEST(Upset, DisjointAndIdentical) {
  const TargetSetSystem disjoint({"A", "B"}, {tuples({1, 2}), tuples({3})});
  EXPECT_EQ(upset_exclusive(disjoint), (std::vector<std::uint64_t>{0, 2, 1, 0}));
  const TargetSetSystem same({"A", "B", "C"}, {tuples({1, 2}), tuples({1, 2}), tuples({2, 1})});
  const auto c = upset_exclusive(same);
  for (std::size_t m = 0; m < 7; ++m) EXPECT_EQ(c[m], 0u);
  EXPECT_EQ(c[7], 2u);
}

TEST(Upset, RejectsBadSystems) {
  EXPECT_THROW(TargetSetSystem({"A", "A"}, {{}, {}}), std::exception);
  std::vector<std::string> labels;
  for (int i = 0; i < 11; ++i) labels.push_back("o" + std::to_string(i));
  EXPECT_THROW(TargetSetSystem(labels, std::vector<std::vector<TargetTuple>>(11)), std::exception);
}

TEST(Upset, PartitionLawAndOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 1 + seed % 6;
    const auto sets = gen::set_system(seed, n, 600);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('A' + i)));
    const auto c = upset_exclusive(TargetSetSystem(labels, sets));
    EXPECT_EQ(c, oracle::exclusive_counts(sets));
    std::set<TargetTuple> all;
    for (const auto& s : sets) all.insert(s.begin(), s.end());
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::uint64_t{0}), all.size());
  }
}

TEST(OverlapTimeseries, Examples) {
  const std::vector<TargetTuple> a{tuple(0, 1), tuple(1, 1), tuple(8, 2)};
  const auto same = overlap_timeseries(a, a);
  EXPECT_EQ(same.both.values, same.a.values);
  EXPECT_EQ(same.a.values, (std::vector<std::optional<double>>{2, 1}));

  const std::vector<TargetTuple> b{tuple(3, 7)};
  const auto disjoint = overlap_timeseries(a, b);
  for (const auto& v : disjoint.both.values) EXPECT_EQ(v, 0.0);

  // Two weeks, checked day by day.
  const std::vector<TargetTuple> x{tuple(0, 1), tuple(0, 2), tuple(2, 1), tuple(9, 3), tuple(13, 4)};
  const std::vector<TargetTuple> y{tuple(0, 2), tuple(2, 1), tuple(2, 5), tuple(13, 4), tuple(12, 4)};
  const auto s = overlap_timeseries(x, y);
  EXPECT_EQ(s.a.start_week, kDay);
  EXPECT_EQ(s.a.values, (std::vector<std::optional<double>>{3, 2}));
  EXPECT_EQ(s.b.values, (std::vector<std::optional<double>>{3, 2}));
  EXPECT_EQ(s.both.values, (std::vector<std::optional<double>>{2, 1}));
}

TEST(NewVsRecurring, Examples) {
  const auto fresh = new_vs_recurring(std::vector{tuple(0, 1), tuple(1, 2), tuple(8, 3)});
  ASSERT_EQ(fresh.size(), 2u);
  EXPECT_EQ(fresh[0].new_targets, 2u);
  EXPECT_EQ(fresh[0].recurring, 0u);
  EXPECT_EQ(fresh[1].cumulative_new, 3u);

  const auto again = new_vs_recurring(std::vector{tuple(0, 1), tuple(3, 1), tuple(4, 1)});
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].new_targets, 1u);
  EXPECT_EQ(again[0].recurring, 2u);
}

TEST(NewVsRecurring, ReplayOracle) {
  const auto sets = gen::set_system(77, 1, 3000);
  auto t = sets[0];
  // Reuse addresses so recurrences happen.
  for (std::size_t i = 0; i < t.size(); ++i) t[i].ip = Ipv4{t[i].ip.value % 300};
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  const auto weeks = new_vs_recurring(t);
  std::set<std::uint32_t> seen;
  std::map<Date, std::pair<std::uint64_t, std::uint64_t>> expected;
  Date current{};
  std::set<std::uint32_t> today;
  for (const auto& x : t) {
    if (x.date != current) {
      seen.insert(today.begin(), today.end());
      today.clear();
      current = x.date;
    }
    auto& e = expected[week_start(x.date)];
    if (seen.count(x.ip.value)) {
      ++e.second;
    } else {
      ++e.first;
    }
    today.insert(x.ip.value);
  }
  std::uint64_t cumulative = 0;
  std::size_t k = 0;
  for (const auto& [week, counts] : expected) {
    while (k < weeks.size() && weeks[k].week < week) {
      EXPECT_EQ(weeks[k].new_targets + weeks[k].recurring, 0u);
      ++k;
    }
    ASSERT_LT(k, weeks.size());
    cumulative += counts.first;
    EXPECT_EQ(weeks[k].new_targets, counts.first);
    EXPECT_EQ(weeks[k].recurring, counts.second);
    EXPECT_EQ(weeks[k].cumulative_new, cumulative);
    ++k;
  }
  std::set<std::uint32_t> distinct;
  for (const auto& x : t) distinct.insert(x.ip.value);
  EXPECT_EQ(cumulative, distinct.size());
}

TEST(AsAttribution, Examples) {
  const RoutedPrefixTable routed({{parse_prefix("198.51.100.0/24"), 64500}, {parse_prefix("203.0.113.0/24"), 64501},
                                  {parse_prefix("203.0.113.128/25"), 64502}});
  std::vector<TargetTuple> one;
  for (int i = 0; i < 5; ++i) one.push_back({kDay, Ipv4{parse_ipv4("198.51.100.0").value + static_cast<std::uint32_t>(i)}});
  auto r = as_attribution(one, routed);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].asn, 64500u);
  EXPECT_EQ(r[0].share, 1.0);

  std::vector<TargetTuple> split;
  for (int i = 0; i < 8; ++i) split.push_back({kDay, Ipv4{parse_ipv4("198.51.100.0").value + static_cast<std::uint32_t>(i)}});
  for (int i = 0; i < 2; ++i) split.push_back({kDay, Ipv4{parse_ipv4("203.0.113.0").value + static_cast<std::uint32_t>(i)}});
  r = as_attribution(split, routed);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r[0].share, 0.8);
  EXPECT_DOUBLE_EQ(r[1].share, 0.2);

  // Nested prefixes and unrouted space, against the linear scan.
  std::vector<TargetTuple> mixed{{kDay, parse_ipv4("203.0.113.200")}, {kDay, parse_ipv4("203.0.113.5")},
                                 {kDay, parse_ipv4("203.0.113.129")}, {kDay, parse_ipv4("8.8.8.8")}};
  r = as_attribution(mixed, routed, 1);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].asn, oracle::lpm(routed.entries(), parse_ipv4("203.0.113.200"))->asn);
  EXPECT_EQ(r[0].tuples, 2u);
  EXPECT_EQ(r[1].kind, AsShare::Kind::Other);
  EXPECT_EQ(r[2].kind, AsShare::Kind::Unrouted);
  double total = 0;
  for (const auto& row : r) total += row.share;
  EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(Federated, DigestFormat) {
  const TargetTuple t{kDay, parse_ipv4("198.51.100.7")};
  EXPECT_EQ(target_digest(t, "s1"), sha256_hex("s1|2021-03-01|198.51.100.7"));
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Federated, Examples) {
  std::vector<TargetTuple> ten;
  for (std::uint32_t i = 0; i < 10; ++i) ten.push_back(tuple(0, i + 1));
  const TargetSetSystem sys({"A"}, {ten});
  const auto hashed = hash_targets(std::vector{ten[0], ten[4], ten[9]}, "pepper");
  const std::unordered_set<std::string> external(hashed.begin(), hashed.end());
  const auto r = federated_confirm(sys, external, "pepper");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].share, 0.3);
  EXPECT_EQ(r[0].confirmed, 3u);
  EXPECT_EQ(federated_confirm(sys, {}, "pepper")[0].share, 0.0);
  EXPECT_EQ(federated_confirm(sys, external, "salt")[0].share, 0.0);
}

TEST(Federated, FourWayIntersection) {
  const auto a = tuples({1, 2, 9}), b = tuples({2, 3, 9}), c = tuples({3, 4, 9}), d = tuples({4, 5, 9});
  const TargetSetSystem sys({"A", "B", "C", "D"}, {a, b, c, d});
  const auto hashed = hash_targets(tuples({9}), "k");
  const std::unordered_set<std::string> external(hashed.begin(), hashed.end());
  for (const auto& row : federated_confirm(sys, external, "k")) {
    EXPECT_EQ(row.share, row.mask == 0b1111 ? 1.0 : 0.0) << row.mask;
  }
}
