// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "azpos/golay.hpp"

namespace azpos {

constexpr double kSpeedOfLightMps = 299792458.0;
constexpr double kSpeedOfLightMetersPerPs = kSpeedOfLightMps * 1e-12;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

struct RoomBox {
  double width_m = 10.0;  // x extent
  double depth_m = 5.0;   // y extent
  double height_m = 3.0;  // z extent
};

// Vertical screen spanning the full room height, given by its floor segment.
// Blockers occlude the direct path only; they are how a placement is forced
// into NLOS.
struct BlockerSegment {
  double x1 = 0.0, y1 = 0.0;
  double x2 = 0.0, y2 = 0.0;
};

struct Geometry {
  RoomBox room;
  std::map<std::string, Vec3> sta_positions;
  std::vector<BlockerSegment> blockers;
};

struct WallPlane {
  int id = 0;
  Vec3 point;   // a point on the plane
  Vec3 normal;  // inward unit normal
};

// The four vertical boundary planes: x=0, x=width, y=0, y=depth.
std::array<WallPlane, 4> wall_planes(const RoomBox& room);

enum class PathKind { direct, reflected };

struct ChannelTap {
  double delay_ps = 0.0;
  std::complex<double> gain_co;     // co-polarized amplitude
  std::complex<double> gain_cross;  // cross-polarized amplitude (0 on direct paths)
  PathKind kind = PathKind::direct;
  int wall_id = -1;
  double path_length_m = 0.0;
  double aod_azimuth_deg = 0.0;  // departure bearing at the transmitter
  double aod_elevation_deg = 0.0;
  double aoa_azimuth_deg = 0.0;  // arrival bearing at the receiver
  double aoa_elevation_deg = 0.0;
};

struct ReflectionModel {
  double loss_db = 5.0;
  // Polarization rotation per bounce; co-pol keeps cos(chi), cross-pol gets
  // sin(chi). Calibration knob, see channel.cpp.
  double cross_coupling_deg = 55.0;
};

// Direct ray (unless occluded by a blocker) plus one single-bounce ray per
// wall via the image method. Amplitudes are 1/d with the reflection loss and
// polarization split applied to bounced rays.
std::vector<ChannelTap> compute_paths(const Geometry& geometry, const std::string& tx,
                                      const std::string& rx, const ReflectionModel& model = {});

struct ArrayConfig {
  int rows = 6;
  int cols = 6;
  double element_spacing_wavelengths = 0.5;
  double carrier_ghz = 60.48;
  double bandwidth_ghz = 2.16;  // one of 2.16, 4.32, 6.48, 8.64
};

void validate_array_config(const ArrayConfig& config);

struct AwvConfig {
  int awv_id = 0;
  double steer_azimuth_deg = 0.0;  // (-180, 180]
  double steer_elevation_deg = 0.0;  // [-90, 90]
};

// Uniform rectangular array factor with phase steering. Columns span azimuth
// (u = cos el * sin az), rows span elevation (v = sin el); the gain at the
// steering direction is rows*cols.
std::complex<double> array_gain(const ArrayConfig& array, const AwvConfig& awv, double azimuth_deg,
                                double elevation_deg);

enum class Polarization { vertical, horizontal };

struct RadioEnd {
  ArrayConfig array;
  AwvConfig awv;
  Polarization pol = Polarization::vertical;
};

inline double sample_period_ps(double bandwidth_ghz) { return 1000.0 / bandwidth_ghz; }

// Convolves the sequence with the channel. Per-tap effective gain is
// tx_array_gain * rx_array_gain * polarization-selected amplitude; delays are
// quantized to the tx bandwidth's sample grid. Complex white noise is added at
// snr_db relative to the strongest tap's co-polarized amplitude (pass
// +infinity for a noiseless run). Deterministic given the seed.
std::vector<std::complex<double>> propagate(std::span<const std::complex<double>> sequence,
                                            std::span<const ChannelTap> taps, const RadioEnd& tx,
                                            const RadioEnd& rx, double snr_db, uint64_t seed);

// Noise standard deviation implied by snr_db for these taps (0 when noiseless).
double noise_sigma(std::span<const ChannelTap> taps, double snr_db);

struct PdpTap {
  int delay_sample_index = 0;
  double i = 0.0;
  double q = 0.0;
  double snr_db = 0.0;
};

struct Pdp {
  std::vector<PdpTap> taps;  // sorted by delay index
};

// Channel estimate of a received ga/gb pair reduced to per-tap I/Q and SNR
// against the given noise floor.
Pdp measure_pdp(std::span<const std::complex<double>> rx_ga,
                std::span<const std::complex<double>> rx_gb, const GolaySequencePair& pair,
                double noise_floor);

// Bearing helpers shared with the solver: azimuth counterclockwise from +x in
// the floor plane, elevation from the floor plane.
Vec3 direction_from_angles(double azimuth_deg, double elevation_deg);
void angles_from_direction(const Vec3& dir, double& azimuth_deg, double& elevation_deg);

}  // namespace azpos
