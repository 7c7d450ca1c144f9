#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddoscope/carpet.hpp"
#include "ddoscope/flow.hpp"
#include "ddoscope/honeypot.hpp"
#include "ddoscope/synth.hpp"
#include "ddoscope/telescope.hpp"

namespace ddoscope {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// Telescope config document: {"observatory", "n_addresses", "interval",
/// "pkt_threshold", "duration_threshold", "rate_threshold": {"packets",
/// "window", "slide"}, "backscatter_filter": "default"|"none"}. Only
/// n_addresses is required.
TelescopeConfig telescope_config_from_json(const nlohmann::json& j);

enum class ObservatoryKind { Telescope, Honeypot, Flow };

struct ObservatoryConfig {
  std::string name;
  ObservatoryKind kind = ObservatoryKind::Telescope;
  TelescopeConfig telescope;
  HoneypotPreset preset = HoneypotPreset::Hopscotch;
  std::optional<double> merge_gap_s;  // defaults to the preset timeout
  int newkid_prefix_len = 24;
  std::set<std::uint16_t> ampl_ports = default_amplification_ports();
  // Telescope and flow: one CSV. Honeypot: CSV files and/or directories of
  // CSV files. Empty when a scenario provides the inputs.
  std::vector<std::filesystem::path> inputs;
};

struct ConfirmConfig {
  std::filesystem::path external;
  std::string salt;
};

struct PipelineConfig {
  std::vector<ObservatoryConfig> observatories;
  std::optional<std::filesystem::path> routed;
  std::optional<std::filesystem::path> alloc;
  bool aggregate = false;
  CarpetOptions carpet;

  bool normalize = true;
  std::size_t baseline_weeks = 15;
  double ewma_span = 12;
  std::string correlation = "spearman";  // or "pearson"
  bool quarterly = false;
  bool upset = true;
  std::size_t top_ases = 10;
  std::optional<ConfirmConfig> confirm;
  std::optional<Date> range_from;
  std::optional<Date> range_to;

  std::optional<synth::ScenarioSpec> scenario;
  std::filesystem::path output_dir = "bundle";
  unsigned parallelism = 1;

  /// Canonical config document used for the manifest hash; excludes the
  /// output directory and parallelism so bundles compare across runs.
  nlohmann::json canonical;

  void validate() const;
};

/// Parses a pipeline config. Relative paths resolve against `base_dir`.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads one observatory's inputs and returns its attack events, exactly as
/// the pipeline's detect stage does.
std::vector<AttackEvent> detect_observatory(const ObservatoryConfig& obs, unsigned threads = 1);

struct RecoveryScore {
  std::string observatory;
  std::size_t detected = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t expected = 0;
  std::size_t recovered = 0;
  double precision = 1;
  double recall = 1;
};

/// Scores one observatory's events against scenario ground truth. An event
/// is a true positive when it overlaps (in target and time) an attack the
/// observatory is certain to see, a false positive when it overlaps no
/// compatible attack, and is ignored when it only overlaps attacks of
/// uncertain visibility.
RecoveryScore score_recovery(const ObservatoryConfig& obs, std::span<const AttackEvent> events,
                             std::span<const synth::AttackTruth> truth);

/// Runs detection, optional carpet aggregation, and every analysis, writing
/// the bundle into cfg.output_dir. The bundle is assembled in a sibling
/// staging directory and only moved into place on success; failures remove
/// it and rethrow with the failing stage named.
void run_pipeline(const PipelineConfig& cfg);

}  // namespace ddoscope
