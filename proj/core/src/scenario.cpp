// SPDX-License-Identifier: Apache-2.0
#include "azpos/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "azpos/errors.hpp"
#include "azpos/rng.hpp"
#include "json.hpp"

namespace azpos {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void require_inside_room(const RoomBox& room, const Vec3& p, const std::string& path) {
  if (!(p.x > 0.0 && p.x < room.width_m && p.y > 0.0 && p.y < room.depth_m && p.z > 0.0 &&
        p.z < room.height_m)) {
    raise(Errc::config_error, path + ": position not strictly inside the room");
  }
}

// 36-candidate azimuth sweep at zero elevation, 10 degree spacing.
SweepPlan full_azimuth_sweep() {
  SweepPlan plan;
  plan.trn = TrnConfig{36, 1, 2, 2};
  plan.candidates.reserve(36);
  for (int i = 0; i < 36; ++i) {
    plan.candidates.push_back(AwvConfig{i, -180.0 + 10.0 * i + 10.0, 0.0});
  }
  return plan;
}

struct RstaTruth {
  std::vector<ChannelTap> taps;
  const ChannelTap* first = nullptr;
  Vec3 position;
};

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
  raise(Errc::config_error, path + ": " + what);
}

double get_number(const json& j, const char* key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) config_fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

bool get_bool(const json& j, const char* key, bool fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) config_fail(path + "." + key, "expected a boolean");
  return j[key].get<bool>();
}

Vec3 get_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    config_fail(path, "expected [x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    raise(Errc::config_error, std::string("invalid JSON: ") + err.what());
  }

  ScenarioConfig config;
  if (j.contains("name")) {
    if (!j["name"].is_string()) config_fail("name", "expected a string");
    config.name = j["name"].get<std::string>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_fail("seed", "expected an unsigned integer");
    config.seed = j["seed"].get<uint64_t>();
  }
  double reps = get_number(j, "repetitions", config.repetitions, "");
  if (reps < 1) config_fail("repetitions", "must be at least 1");
  config.repetitions = static_cast<int>(reps);
  config.legacy_tof_mismatch = get_bool(j, "legacy_tof_mismatch", false, "");

  const json& geometry = j.contains("geometry") ? j["geometry"] : json::object();
  const json& room = geometry.contains("room") ? geometry["room"] : json::object();
  config.geometry.room.width_m = get_number(room, "width_m", 10.0, "geometry.room");
  config.geometry.room.depth_m = get_number(room, "depth_m", 5.0, "geometry.room");
  config.geometry.room.height_m = get_number(room, "height_m", 3.0, "geometry.room");
  if (!geometry.contains("ista")) config_fail("geometry.ista", "missing initiator position");
  Vec3 ista = get_vec3(geometry["ista"], "geometry.ista");
  require_inside_room(config.geometry.room, ista, "geometry.ista");
  config.geometry.sta_positions["ista"] = ista;
  if (geometry.contains("blockers")) {
    if (!geometry["blockers"].is_array()) config_fail("geometry.blockers", "expected an array");
    int i = 0;
    for (const auto& b : geometry["blockers"]) {
      std::string path = "geometry.blockers[" + std::to_string(i++) + "]";
      BlockerSegment seg;
      seg.x1 = get_number(b, "x1", 0.0, path);
      seg.y1 = get_number(b, "y1", 0.0, path);
      seg.x2 = get_number(b, "x2", 0.0, path);
      seg.y2 = get_number(b, "y2", 0.0, path);
      config.geometry.blockers.push_back(seg);
    }
  }

  const json& array = j.contains("array") ? j["array"] : json::object();
  config.array.rows = static_cast<int>(get_number(array, "rows", 6, "array"));
  config.array.cols = static_cast<int>(get_number(array, "cols", 6, "array"));
  config.array.element_spacing_wavelengths =
      get_number(array, "element_spacing_wavelengths", 0.5, "array");
  config.array.carrier_ghz = get_number(array, "carrier_ghz", 60.48, "array");
  config.array.bandwidth_ghz = get_number(array, "bandwidth_ghz", 2.16, "array");
  try {
    validate_array_config(config.array);
  } catch (const Error& err) {
    config_fail("array", err.what());
  }

  if (!j.contains("rsta_specs") || !j["rsta_specs"].is_array() || j["rsta_specs"].empty()) {
    config_fail("rsta_specs", "expected a non-empty array");
  }
  int i = 0;
  for (const auto& spec : j["rsta_specs"]) {
    std::string path = "rsta_specs[" + std::to_string(i++) + "]";
    RstaSpec r;
    if (!spec.contains("label") || !spec["label"].is_string()) {
      config_fail(path + ".label", "expected a string");
    }
    r.label = spec["label"].get<std::string>();
    if (!spec.contains("position")) config_fail(path + ".position", "missing");
    r.position = get_vec3(spec["position"], path + ".position");
    require_inside_room(config.geometry.room, r.position, path + ".position");
    r.los = get_bool(spec, "los", true, path);
    config.rsta_specs.push_back(r);
    config.geometry.sta_positions[r.label] = r.position;
  }

  const json& noise = j.contains("noise") ? j["noise"] : json::object();
  config.noise.tof_jitter_sigma_ps = get_number(noise, "tof_jitter_sigma_ps", 50.0, "noise");
  config.noise.aoa_error_max_deg_los = get_number(noise, "aoa_error_max_deg_los", 5.1, "noise");
  config.noise.aoa_error_max_deg_nlos = get_number(noise, "aoa_error_max_deg_nlos", 8.3, "noise");
  config.noise.snr_db = get_number(noise, "snr_db", 30.0, "noise");

  const json& reflection = j.contains("reflection") ? j["reflection"] : json::object();
  config.reflection.loss_db = get_number(reflection, "loss_db", 5.0, "reflection");
  config.reflection.cross_coupling_deg =
      get_number(reflection, "cross_coupling_deg", 55.0, "reflection");
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

// ---------------------------------------------------------------------------
// Monte Carlo runner
// ---------------------------------------------------------------------------

RunResult run_scenario(const ScenarioConfig& config) {
  if (config.repetitions < 1) raise(Errc::config_error, "repetitions: must be at least 1");
  if (!config.geometry.sta_positions.contains("ista")) {
    raise(Errc::config_error, "geometry.ista: missing initiator position");
  }
  const Vec3 anchor_pos = config.geometry.sta_positions.at("ista");
  const Position anchor{anchor_pos.x, anchor_pos.y, anchor_pos.z};
  const GolaySequencePair pair = golay_pair(128);
  const SweepPlan plan = full_azimuth_sweep();
  const auto walls = wall_planes(config.geometry.room);

  ArrayConfig omni{1, 1, 0.5, config.array.carrier_ghz, config.array.bandwidth_ghz};

  RunResult result;
  for (size_t ri = 0; ri < config.rsta_specs.size(); ++ri) {
    const RstaSpec& spec = config.rsta_specs[ri];
    if (!config.geometry.sta_positions.contains(spec.label)) {
      raise(Errc::config_error, "rsta_specs[" + std::to_string(ri) + "]: not placed in geometry");
    }
    result.labels.push_back(spec.label);

    auto taps = compute_paths(config.geometry, "ista", spec.label, config.reflection);
    if (taps.empty()) {
      raise(Errc::config_error,
            "rsta_specs[" + std::to_string(ri) + "]: no propagation path to " + spec.label);
    }
    const ChannelTap& first = taps.front();
    const double true_length = first.path_length_m;
    const Position truth{spec.position.x, spec.position.y, spec.position.z};
    SimLink link{taps, config.array, omni, AwvConfig{0, 0.0, 0.0}};

    const double aoa_max_deg =
        spec.los ? config.noise.aoa_error_max_deg_los : config.noise.aoa_error_max_deg_nlos;

    std::vector<RunSample>& samples = result.per_rsta[spec.label];
    samples.reserve(config.repetitions);
    for (int rep = 0; rep < config.repetitions; ++rep) {
      const uint64_t sub = derive_seed(config.seed, static_cast<uint64_t>(rep),
                                       hash_label(spec.label));

      SessionScenario ss;
      ss.geometry = config.geometry;
      ss.rsta = spec.label;
      ss.clock = ClockModel{1500.0, -700.0, config.noise.tof_jitter_sigma_ps};
      ss.reflection = config.reflection;
      SessionState session = run_session(ss, IftmrParams{1, 100, config.array.bandwidth_ghz},
                                         derive_seed(sub, 1));
      if (session.phase != Phase::done) {
        raise(Errc::config_error, spec.label + ": session failed");
      }
      const MeasurementExchange& best = select_best_exchange(session.exchanges);
      double dist = rtt_to_distance(compute_rtt(best));

      BestAwvResult trained = fpbt(link, plan, pair, config.noise.snr_db, derive_seed(sub, 2));
      LosLikelihoodReport report =
          los_assessment(link, trained.awv, pair, config.noise.snr_db, derive_seed(sub, 3));

      SplitMix64 draw(derive_seed(sub, 4));
      double aoa_error_deg = draw.next_uniform(-aoa_max_deg, aoa_max_deg);
      if (config.legacy_tof_mismatch) {
        // ToF from a separate sounding: perturb the measured path length by
        // the chord of an independent bearing draw.
        double detached_deg = draw.next_uniform(-aoa_max_deg, aoa_max_deg);
        double chord = 2.0 * true_length * std::sin(std::abs(detached_deg) * kDegToRad / 2.0);
        dist += detached_deg < 0.0 ? -chord : chord;
      }

      AngleEstimate angle{first.aod_azimuth_deg + aoa_error_deg, first.aod_elevation_deg,
                          AngleSource::i2r_aoa};

      Position estimate;
      if (classify_los(report) || first.kind != PathKind::reflected) {
        estimate = position_los(anchor, dist, angle);
      } else {
        try {
          estimate = position_nlos(anchor, dist, angle, walls[first.wall_id]).first;
        } catch (const Error&) {
          estimate = position_los(anchor, dist, angle);  // degenerate draw
        }
      }

      RunSample sample;
      sample.aoa_error_deg = aoa_error_deg;
      sample.position_error_cm = position_error(estimate, truth) * 100.0;
      sample.distance_error_cm = std::abs(dist - true_length) * 100.0;
      sample.los_likelihood = report.likelihood;
      samples.push_back(sample);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_string(const RunResult& result) {
  std::ostringstream out;
  out << "rsta_label,repetition,aoa_error_deg,position_error_cm,distance_error_cm,"
         "los_likelihood\n";
  for (const auto& label : result.labels) {
    auto it = result.per_rsta.find(label);
    if (it == result.per_rsta.end()) continue;
    const auto& samples = it->second;
    for (size_t rep = 0; rep < samples.size(); ++rep) {
      const RunSample& s = samples[rep];
      out << label << ',' << rep << ',' << format_g17(s.aoa_error_deg) << ','
          << format_g17(s.position_error_cm) << ',' << format_g17(s.distance_error_cm) << ','
          << format_g17(s.los_likelihood) << '\n';
    }
  }
  return out.str();
}

void emit_csv(const RunResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io_error, "cannot write " + path);
  out << csv_string(result);
  if (!out) raise(Errc::io_error, "short write to " + path);
}

RunResult parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) raise(Errc::io_error, "empty CSV");
  RunResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string label, field;
    if (!std::getline(row, label, ',')) raise(Errc::io_error, "bad CSV row: " + line);
    std::getline(row, field, ',');  // repetition index is implied by order
    RunSample s;
    auto next_double = [&](double& v) {
      if (!std::getline(row, field, ',')) raise(Errc::io_error, "bad CSV row: " + line);
      v = std::strtod(field.c_str(), nullptr);
    };
    next_double(s.aoa_error_deg);
    next_double(s.position_error_cm);
    next_double(s.distance_error_cm);
    next_double(s.los_likelihood);
    if (result.per_rsta.find(label) == result.per_rsta.end()) result.labels.push_back(label);
    result.per_rsta[label].push_back(s);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Bundled scenarios
// ---------------------------------------------------------------------------

namespace {

// Vertical screen across the midpoint of the direct segment, 0.5 m wide.
BlockerSegment screen_between(const Vec3& a, const Vec3& b) {
  double mx = (a.x + b.x) / 2.0;
  double my = (a.y + b.y) / 2.0;
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  double len = std::hypot(dx, dy);
  double px = -dy / len, py = dx / len;
  return {mx - 0.25 * px, my - 0.25 * py, mx + 0.25 * px, my + 0.25 * py};
}

}  // namespace

ScenarioConfig default_fig4_scenario() {
  ScenarioConfig config;
  config.name = "fig4_room";
  config.geometry.room = {10.0, 5.0, 3.0};
  const Vec3 ista{1.0, 1.0, 1.0};
  config.geometry.sta_positions["ista"] = ista;

  // Line-of-sight placements 2/4/8 m out; screened placements whose shortest
  // wall bounce (off y=0) runs 2/4/8 m. Everything 1 m above the floor so the
  // beam elevation is zero.
  auto los_pos = [&](double d) { return Vec3{1.0 + std::sqrt(d * d - 1.5 * 1.5), 2.5, 1.0}; };
  auto nlos_pos = [&](double d, double y) {
    // Image of the initiator across y=0 sits at (1, -1, 1).
    double reach = 1.0 + y;
    return Vec3{1.0 + std::sqrt(d * d - reach * reach), y, 1.0};
  };

  config.rsta_specs = {
      {"los_2m", los_pos(2.0), true},    {"los_4m", los_pos(4.0), true},
      {"los_8m", los_pos(8.0), true},    {"nlos_2m", nlos_pos(2.0, 0.5), false},
      {"nlos_4m", nlos_pos(4.0, 1.0), false}, {"nlos_8m", nlos_pos(8.0, 1.5), false},
  };
  for (const auto& spec : config.rsta_specs) {
    config.geometry.sta_positions[spec.label] = spec.position;
    if (!spec.los) {
      config.geometry.blockers.push_back(screen_between(ista, spec.position));
    }
  }
  return config;
}

std::vector<ScenarioConfig> default_compare_scenarios() {
  // Reported-baseline scenarios give distances only; reuse the room geometry
  // stretched to fit, single line-of-sight responder each. The tighter AoA
  // envelope reflects a beam-trained link carrying ToF and angle in one frame.
  static const std::pair<const char*, double> kDistances[] = {
      {"7m", 7.0}, {"7.07m", 7.07}, {"9m", 9.0}, {"11.2m", 11.2}, {"14.2m", 14.2}};
  std::vector<ScenarioConfig> configs;
  for (const auto& [label, d] : kDistances) {
    ScenarioConfig config;
    config.name = std::string("compare_") + label;
    config.geometry.room = {16.0, 5.0, 3.0};
    config.geometry.sta_positions["ista"] = {0.5, 1.0, 1.0};
    config.rsta_specs = {{"rsta", Vec3{0.5 + d, 1.0, 1.0}, true}};
    config.geometry.sta_positions["rsta"] = config.rsta_specs[0].position;
    config.noise.aoa_error_max_deg_los = 1.0;
    config.noise.aoa_error_max_deg_nlos = 1.6;
    config.noise.tof_jitter_sigma_ps = 50.0;
    configs.push_back(config);
  }
  return configs;
}

// ---------------------------------------------------------------------------
// Comparison table
// ---------------------------------------------------------------------------

namespace {

constexpr CompareBaseline kBaselines[] = {
    {"7m", "3GPP Sub-6 GHz", 2.00, 8.25, 15.50, 30.00},
    {"7.07m", "Bluetooth 5.1", 30.00, 37.50, 46.50, 80.00},
    {"9m", "3GPP Sub-6 GHz", 3.00, 8.00, 16.00, 56.00},
    {"11.2m", "3GPP mmWave", 6.50, 7.80, 15.00, 80.00},
    {"14.2m", "3GPP mmWave", 7.50, 10.50, 18.75, 85.50},
};

constexpr CompareBaseline kAzReference[] = {
    {"7m", "802.11az mmWave (measured)", 1.76, 3.13, 5.02, 33.15},
    {"7.07m", "802.11az mmWave (measured)", 4.99, 5.85, 11.46, 36.49},
    {"9m", "802.11az mmWave (measured)", 6.19, 7.72, 15.65, 33.67},
    {"11.2m", "802.11az mmWave (measured)", 5.67, 7.91, 20.35, 52.75},
    {"14.2m", "802.11az mmWave (measured)", 4.39, 9.78, 22.34, 56.30},
};

void print_row(std::ostringstream& out, const char* distance, const std::string& technology,
               double p25, double p50, double p75, double p100) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %-34s %8.2f %8.2f %8.2f %8.2f\n", distance,
                technology.c_str(), p25, p50, p75, p100);
  out << buf;
}

}  // namespace

std::span<const CompareBaseline> compare_baselines() { return kBaselines; }
std::span<const CompareBaseline> az_reference_rows() { return kAzReference; }

std::string compare_report(const std::map<std::string, RunResult>& by_distance) {
  for (const auto& row : kBaselines) {
    if (!by_distance.contains(row.distance)) {
      raise(Errc::missing_scenario, std::string("no run for ") + row.distance);
    }
  }

  std::ostringstream out;
  out << "Indoor positioning comparison, percentile error (cm)\n";
  char header[160];
  std::snprintf(header, sizeof(header), "%-8s %-34s %8s %8s %8s %8s\n", "Distance", "Technology",
                "25%", "50%", "75%", "100%");
  out << header;

  for (size_t i = 0; i < std::size(kBaselines); ++i) {
    const CompareBaseline& base = kBaselines[i];
    print_row(out, base.distance, base.technology, base.p25, base.p50, base.p75, base.p100);
    const CompareBaseline& ref = kAzReference[i];
    print_row(out, "", ref.technology, ref.p25, ref.p50, ref.p75, ref.p100);

    const RunResult& run = by_distance.at(base.distance);
    std::vector<double> errors;
    for (const auto& [label, samples] : run.per_rsta) {
      for (const auto& s : samples) errors.push_back(s.position_error_cm);
    }
    auto pct = percentile_report(errors);
    print_row(out, "", "802.11az mmWave (simulated)", pct[0], pct[1], pct[2], pct[3]);
  }
  return out.str();
}

}  // namespace azpos
