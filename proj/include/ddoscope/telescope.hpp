#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddoscope/model.hpp"

namespace ddoscope {

enum class BackscatterFilter { None, Default };

struct TelescopeConfig {
  std::string observatory = "telescope";
  std::uint64_t n_addresses = 1;
  double interval_s = 300;
  std::uint64_t pkt_threshold = 25;
  double duration_threshold_s = 60;
  RateThreshold rate_threshold{30, 60, 10};
  BackscatterFilter backscatter_filter = BackscatterFilter::Default;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Keeps TCP SYN-ACK or RST packets and all ICMP under the default filter.
std::vector<PacketRecord> backscatter_prefilter(std::span<const PacketRecord> packets, BackscatterFilter filter);

/// Randomly-spoofed DoS inference over a time-ordered telescope trace.
///
/// Packets are grouped into flows keyed by (protocol, source IP); the source
/// of a backscatter packet is the victim. A flow ends once a whole timeout
/// interval (aligned to the epoch) passes without one of its packets, so a
/// packet starts a new flow when its interval index is at least two past the
/// flow's last one. A flow is an attack if it reaches pkt_threshold packets,
/// lasts duration_threshold seconds, and some rate window (window_s long,
/// starting on a multiple of slide_s since the epoch) holds rate.packets of
/// its packets. All three conditions are monotone in the packets seen, so a
/// flow that qualifies once stays an attack for the rest of its lifetime.
///
/// The backscatter filter from `cfg` is applied first. Unsorted input throws
/// DataError naming the offending record. `threads` > 1 partitions flows by
/// key hash; output is sorted canonically either way.
std::vector<AttackEvent> detect_rsdos(std::span<const PacketRecord> packets, const TelescopeConfig& cfg,
                                      unsigned threads = 1);

struct DetectableRate {
  double pps = 0;
  double bps = 0;
};

/// Smallest victim packet rate whose expected backscatter at a telescope of
/// n_addresses reaches pkt_threshold within window_s, assuming uniformly
/// spoofed sources: pps = threshold / ((n / 2^32) * window).
DetectableRate min_detectable_rate(std::uint64_t n_addresses, double pkt_threshold, double window_s,
                                   double packet_bytes = 110);

}  // namespace ddoscope
