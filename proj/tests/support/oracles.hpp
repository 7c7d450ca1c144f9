// Slow reference implementations written straight from the detection and
// statistics rules. They share no code with the library beyond plain types.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddoscope/model.hpp"
#include "ddoscope/prefix_table.hpp"
#include "ddoscope/telescope.hpp"

namespace oracle {

using namespace ddoscope;

std::vector<AttackEvent> rsdos(std::span<const PacketRecord> packets, const TelescopeConfig& cfg);

// Same rules, but the three conditions are re-evaluated from scratch after
// every packet of a flow. Quadratic; keep inputs small.
std::vector<AttackEvent> rsdos_incremental(std::span<const PacketRecord> packets, const TelescopeConfig& cfg);

struct Trace {
  Ipv4 sensor;
  std::vector<PacketRecord> packets;
};

std::vector<AttackEvent> honeypot(const std::vector<Trace>& traces, const AttackDefinition& def,
                                  const std::string& observatory);

std::optional<RoutedEntry> lpm(const std::vector<RoutedEntry>& entries, Ipv4 ip);
Prefix covering(std::span<const Ipv4> ips);

double median(std::vector<double> v);
std::vector<std::optional<double>> normalize(const std::vector<std::optional<double>>& x, std::size_t baseline);
std::vector<std::optional<double>> ewma(const std::vector<std::optional<double>>& x, double span);

struct Line {
  long double slope;
  long double intercept;
};
Line ols(const std::vector<std::optional<double>>& y);

struct Corr {
  double rho;
  double p;
  std::size_t n;
};
Corr pearson(const std::vector<std::optional<double>>& a, const std::vector<std::optional<double>>& b);
Corr spearman(const std::vector<std::optional<double>>& a, const std::vector<std::optional<double>>& b);

// Exclusive intersection sizes by walking every subset and testing every
// element against every set.
std::vector<std::uint64_t> exclusive_counts(const std::vector<std::vector<TargetTuple>>& sets);

}  // namespace oracle
