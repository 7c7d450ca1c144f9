#include <gtest/gtest.h>

#include "ddoscope/flow.hpp"

using namespace ddoscope;

namespace {

FlowSummary flow(std::uint8_t proto, std::uint16_t port, std::uint64_t sources, double bps) {
  FlowSummary f;
  f.target_ip = parse_ipv4("198.51.100.20");
  f.protocol = proto;
  f.src_port = port;
  f.distinct_src_ips = sources;
  f.bitrate_bps = bps;
  f.start_ts = 0;
  f.end_ts = 60 * kMicrosPerSecond;
  return f;
}

std::optional<AttackType> classify(const FlowSummary& f) {
  const auto ev = classify_flow(f, default_amplification_ports());
  return ev ? std::optional(ev->attack_type) : std::nullopt;
}

}  // namespace

TEST(Flow, Examples) {
  EXPECT_EQ(classify(flow(kProtoUdp, 123, 12, 1.2e9)), AttackType::RA);
  EXPECT_EQ(classify(flow(kProtoUdp, 123, 9, 5e9)), std::nullopt);
  EXPECT_EQ(classify(flow(kProtoTcp, 0, 15, 150e6)), AttackType::DP);
}

TEST(Flow, ThresholdsStrictAsWritten) {
  EXPECT_EQ(classify(flow(kProtoUdp, 123, 12, 1e9)), std::nullopt);
  EXPECT_EQ(classify(flow(kProtoUdp, 123, 10, 2e9)), AttackType::RA);
  EXPECT_EQ(classify(flow(kProtoTcp, 80, 10, 100e6)), std::nullopt);
  EXPECT_EQ(classify(flow(kProtoTcp, 80, 10, 100e6 + 1)), AttackType::DP);
}

TEST(Flow, ProtocolAndPortRules) {
  EXPECT_EQ(classify(flow(kProtoUdp, 4444, 50, 5e9)), std::nullopt);
  EXPECT_EQ(classify(flow(kProtoTcp, 53, 50, 5e9)), AttackType::DP);
  EXPECT_EQ(classify(flow(kProtoIcmp, 0, 50, 5e9)), std::nullopt);
  for (std::uint16_t port = 0; port < 2000; ++port) {
    EXPECT_NE(classify(flow(kProtoTcp, port, 50, 5e9)), AttackType::RA);
    EXPECT_NE(classify(flow(kProtoUdp, port, 50, 5e9)), AttackType::DP);
  }
}

TEST(Flow, EventFields) {
  const auto ev = classify_flow(flow(kProtoUdp, 123, 12, 1.2e9), default_amplification_ports(), {}, "ixp");
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->observatory, "ixp");
  EXPECT_EQ(ev->source_ips, 12u);
  EXPECT_EQ(ev->bytes, static_cast<std::uint64_t>(1.2e9 * 60 / 8));
  EXPECT_EQ(to_string(ev->target), "198.51.100.20/32");
}

TEST(Flow, CustomPortsAndThresholds) {
  const std::set<std::uint16_t> ports{4444};
  FlowThresholds t;
  t.min_sources = 2;
  t.ra_min_bps = 1e6;
  const auto ev = classify_flow(flow(kProtoUdp, 4444, 2, 2e6), ports, t);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->attack_type, AttackType::RA);
  const std::vector<FlowSummary> flows{flow(kProtoUdp, 4444, 2, 2e6), flow(kProtoUdp, 53, 2, 2e6)};
  EXPECT_EQ(detect_flow(flows, ports, t).size(), 1u);
}
