// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "azpos/beamtraining.hpp"
#include "azpos/channel.hpp"
#include "azpos/session.hpp"
#include "azpos/solver.hpp"

namespace azpos {

struct RstaSpec {
  std::string label;
  Vec3 position;
  bool los = true;  // placement truth; drives the AoA error envelope
};

struct NoiseModel {
  double tof_jitter_sigma_ps = 50.0;
  double aoa_error_max_deg_los = 5.1;
  double aoa_error_max_deg_nlos = 8.3;
  double snr_db = 30.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Geometry geometry;  // sta_positions must contain "ista"
  ArrayConfig array;
  std::vector<RstaSpec> rsta_specs;
  NoiseModel noise;
  ReflectionModel reflection;
  int repetitions = 100;
  uint64_t seed = 1;
  // Draw the ToF from an independent channel realization, the way a split
  // FTM + beam-sweep implementation would; adds variance at fixed AoA error.
  bool legacy_tof_mismatch = false;
};

ScenarioConfig parse_config_json(const std::string& text);
ScenarioConfig load_config(const std::string& path);

struct RunSample {
  double aoa_error_deg = 0.0;
  double position_error_cm = 0.0;
  double distance_error_cm = 0.0;
  double los_likelihood = 0.0;
};

struct RunResult {
  std::vector<std::string> labels;                     // config order
  std::map<std::string, std::vector<RunSample>> per_rsta;  // label -> one sample per repetition
};

// Per repetition and responder: negotiation, beam training, LOS assessment,
// a timestamped burst, then the LOS or wall-bounce solver depending on the
// assessed likelihood. Deterministic in (seed, repetition, label).
RunResult run_scenario(const ScenarioConfig& config);

// CSV emission: header plus one row per (rsta, repetition), %.17g fields so a
// re-parse reproduces the result exactly.
std::string csv_string(const RunResult& result);
void emit_csv(const RunResult& result, const std::string& path);
RunResult parse_csv(const std::string& text);

// Bundled six-station room: three line-of-sight placements at 2/4/8 m and
// three screened placements whose wall-bounce paths run 2/4/8 m, all 1 m
// above the floor.
ScenarioConfig default_fig4_scenario();

// Single-responder rooms at the distances the reported baselines used.
std::vector<ScenarioConfig> default_compare_scenarios();

struct CompareBaseline {
  const char* distance;    // "7m", "7.07m", ...
  const char* technology;  // reported system
  double p25, p50, p75, p100;  // percentile error, cm
};

std::span<const CompareBaseline> compare_baselines();
std::span<const CompareBaseline> az_reference_rows();

// Side-by-side table of reported baselines and simulated percentiles. The
// input maps a distance label to the run for that scenario.
std::string compare_report(const std::map<std::string, RunResult>& by_distance);

}  // namespace azpos
