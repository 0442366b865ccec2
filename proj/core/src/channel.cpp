// SPDX-License-Identifier: Apache-2.0
#include "azpos/channel.hpp"

#include <algorithm>
#include <numbers>

#include "azpos/errors.hpp"
#include "azpos/rng.hpp"

namespace azpos {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

// 2D segment intersection in the floor plane, used for blocker occlusion.
bool segments_intersect(double ax1, double ay1, double ax2, double ay2, double bx1, double by1,
                        double bx2, double by2) {
  auto orient = [](double ox, double oy, double px, double py, double qx, double qy) {
    double v = (px - ox) * (qy - oy) - (py - oy) * (qx - ox);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
  };
  int o1 = orient(ax1, ay1, ax2, ay2, bx1, by1);
  int o2 = orient(ax1, ay1, ax2, ay2, bx2, by2);
  int o3 = orient(bx1, by1, bx2, by2, ax1, ay1);
  int o4 = orient(bx1, by1, bx2, by2, ax2, ay2);
  return o1 != o2 && o3 != o4;
}

bool direct_path_blocked(const Geometry& g, const Vec3& tx, const Vec3& rx) {
  for (const auto& b : g.blockers) {
    if (segments_intersect(tx.x, tx.y, rx.x, rx.y, b.x1, b.y1, b.x2, b.y2)) return true;
  }
  return false;
}

Vec3 reflect_point(const Vec3& p, const WallPlane& wall) {
  double d = (p - wall.point).dot(wall.normal);
  return p - wall.normal * (2.0 * d);
}

bool inside_room(const RoomBox& room, const Vec3& p) {
  return p.x > 0.0 && p.x < room.width_m && p.y > 0.0 && p.y < room.depth_m && p.z > 0.0 &&
         p.z < room.height_m;
}

}  // namespace

Vec3 direction_from_angles(double azimuth_deg, double elevation_deg) {
  double az = azimuth_deg * kDegToRad;
  double el = elevation_deg * kDegToRad;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

void angles_from_direction(const Vec3& dir, double& azimuth_deg, double& elevation_deg) {
  Vec3 u = dir.normalized();
  elevation_deg = std::asin(std::clamp(u.z, -1.0, 1.0)) / kDegToRad;
  azimuth_deg = std::atan2(u.y, u.x) / kDegToRad;
}

std::array<WallPlane, 4> wall_planes(const RoomBox& room) {
  return {{
      {0, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}},            // x = 0
      {1, {room.width_m, 0.0, 0.0}, {-1.0, 0.0, 0.0}},  // x = width
      {2, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},            // y = 0
      {3, {0.0, room.depth_m, 0.0}, {0.0, -1.0, 0.0}},  // y = depth
  }};
}

std::vector<ChannelTap> compute_paths(const Geometry& geometry, const std::string& tx,
                                      const std::string& rx, const ReflectionModel& model) {
  auto tx_it = geometry.sta_positions.find(tx);
  auto rx_it = geometry.sta_positions.find(rx);
  if (tx_it == geometry.sta_positions.end()) raise(Errc::unknown_sta, tx);
  if (rx_it == geometry.sta_positions.end()) raise(Errc::unknown_sta, rx);
  const Vec3& tx_pos = tx_it->second;
  const Vec3& rx_pos = rx_it->second;

  std::vector<ChannelTap> taps;

  if (!direct_path_blocked(geometry, tx_pos, rx_pos)) {
    ChannelTap tap;
    tap.kind = PathKind::direct;
    tap.path_length_m = distance(tx_pos, rx_pos);
    tap.delay_ps = tap.path_length_m / kSpeedOfLightMetersPerPs;
    tap.gain_co = {1.0 / tap.path_length_m, 0.0};
    tap.gain_cross = {0.0, 0.0};
    angles_from_direction(rx_pos - tx_pos, tap.aod_azimuth_deg, tap.aod_elevation_deg);
    angles_from_direction(tx_pos - rx_pos, tap.aoa_azimuth_deg, tap.aoa_elevation_deg);
    taps.push_back(tap);
  }

  const double loss = db_to_amplitude(-model.loss_db);
  const double chi = model.cross_coupling_deg * kDegToRad;
  for (const auto& wall : wall_planes(geometry.room)) {
    Vec3 image = reflect_point(rx_pos, wall);
    Vec3 to_image = image - tx_pos;
    double denom = to_image.dot(wall.normal);
    if (std::abs(denom) < 1e-12) continue;  // ray parallel to the wall
    double t = (wall.point - tx_pos).dot(wall.normal) / denom;
    if (t <= 0.0 || t >= 1.0) continue;
    Vec3 bounce = tx_pos + to_image * t;
    // The bounce point must land on the wall rectangle; with both endpoints
    // strictly inside the room this is automatic, but clamp-check anyway.
    Vec3 eps_inside = bounce + wall.normal * 1e-9;
    if (!inside_room(geometry.room, {eps_inside.x, eps_inside.y, geometry.room.height_m / 2})) {
      continue;
    }

    ChannelTap tap;
    tap.kind = PathKind::reflected;
    tap.wall_id = wall.id;
    tap.path_length_m = to_image.norm();
    tap.delay_ps = tap.path_length_m / kSpeedOfLightMetersPerPs;
    double amp = loss / tap.path_length_m;
    tap.gain_co = {amp * std::cos(chi), 0.0};
    tap.gain_cross = {amp * std::sin(chi), 0.0};
    angles_from_direction(bounce - tx_pos, tap.aod_azimuth_deg, tap.aod_elevation_deg);
    angles_from_direction(bounce - rx_pos, tap.aoa_azimuth_deg, tap.aoa_elevation_deg);
    taps.push_back(tap);
  }

  std::sort(taps.begin(), taps.end(),
            [](const ChannelTap& a, const ChannelTap& b) { return a.delay_ps < b.delay_ps; });
  return taps;
}

void validate_array_config(const ArrayConfig& config) {
  if (config.rows < 1 || config.cols < 1) {
    raise(Errc::invariant_violation, "array needs at least one element");
  }
  const double bw = config.bandwidth_ghz;
  if (bw != 2.16 && bw != 4.32 && bw != 6.48 && bw != 8.64) {
    raise(Errc::invariant_violation, "bandwidth outside the EDMG set");
  }
}

std::complex<double> array_gain(const ArrayConfig& array, const AwvConfig& awv, double azimuth_deg,
                                double elevation_deg) {
  const double u = std::cos(elevation_deg * kDegToRad) * std::sin(azimuth_deg * kDegToRad);
  const double v = std::sin(elevation_deg * kDegToRad);
  const double u0 =
      std::cos(awv.steer_elevation_deg * kDegToRad) * std::sin(awv.steer_azimuth_deg * kDegToRad);
  const double v0 = std::sin(awv.steer_elevation_deg * kDegToRad);

  const double phase_col = 2.0 * std::numbers::pi * array.element_spacing_wavelengths * (u - u0);
  const double phase_row = 2.0 * std::numbers::pi * array.element_spacing_wavelengths * (v - v0);

  std::complex<double> col_sum{0.0, 0.0};
  for (int c = 0; c < array.cols; ++c) {
    col_sum += std::polar(1.0, phase_col * c);
  }
  std::complex<double> row_sum{0.0, 0.0};
  for (int r = 0; r < array.rows; ++r) {
    row_sum += std::polar(1.0, phase_row * r);
  }
  return col_sum * row_sum;
}

namespace {

std::complex<double> polarization_select(const ChannelTap& tap, Polarization tx_pol,
                                         Polarization rx_pol) {
  return tx_pol == rx_pol ? tap.gain_co : tap.gain_cross;
}

}  // namespace

double noise_sigma(std::span<const ChannelTap> taps, double snr_db) {
  if (std::isinf(snr_db)) return 0.0;
  double strongest = 0.0;
  for (const auto& tap : taps) strongest = std::max(strongest, std::abs(tap.gain_co));
  return strongest / db_to_amplitude(snr_db);
}

std::vector<std::complex<double>> propagate(std::span<const std::complex<double>> sequence,
                                            std::span<const ChannelTap> taps, const RadioEnd& tx,
                                            const RadioEnd& rx, double snr_db, uint64_t seed) {
  if (taps.empty()) raise(Errc::empty_channel, "no propagation paths");
  validate_array_config(tx.array);
  validate_array_config(rx.array);

  const double ts_ps = sample_period_ps(tx.array.bandwidth_ghz);
  int max_delay = 0;
  struct Effective {
    int delay_samples;
    std::complex<double> gain;
  };
  std::vector<Effective> effective;
  effective.reserve(taps.size());
  for (const auto& tap : taps) {
    int d = static_cast<int>(std::llround(tap.delay_ps / ts_ps));
    max_delay = std::max(max_delay, d);
    std::complex<double> g = polarization_select(tap, tx.pol, rx.pol);
    g *= array_gain(tx.array, tx.awv, tap.aod_azimuth_deg, tap.aod_elevation_deg);
    g *= array_gain(rx.array, rx.awv, tap.aoa_azimuth_deg, tap.aoa_elevation_deg);
    effective.push_back({d, g});
  }

  std::vector<std::complex<double>> out(sequence.size() + static_cast<size_t>(max_delay),
                                        {0.0, 0.0});
  for (const auto& e : effective) {
    if (e.gain == std::complex<double>{0.0, 0.0}) continue;
    for (size_t k = 0; k < sequence.size(); ++k) {
      out[k + static_cast<size_t>(e.delay_samples)] += e.gain * sequence[k];
    }
  }

  const double sigma = noise_sigma(taps, snr_db);
  if (sigma > 0.0) {
    SplitMix64 rng(seed);
    for (auto& sample : out) sample += rng.next_cgaussian() * sigma;
  }
  return out;
}

Pdp measure_pdp(std::span<const std::complex<double>> rx_ga,
                std::span<const std::complex<double>> rx_gb, const GolaySequencePair& pair,
                double noise_floor) {
  Cir cir = estimate_cir(rx_ga, rx_gb, pair);
  Pdp pdp;
  pdp.taps.reserve(cir.taps.size());
  const double floor = noise_floor > 0.0 ? noise_floor : 1e-6;
  for (const auto& tap : cir.taps) {
    PdpTap p;
    p.delay_sample_index = tap.delay_sample_index;
    p.i = tap.gain.real();
    p.q = tap.gain.imag();
    p.snr_db = 10.0 * std::log10(std::norm(tap.gain) / (floor * floor));
    pdp.taps.push_back(p);
  }
  return pdp;
}

}  // namespace azpos
