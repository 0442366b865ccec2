// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "azpos/channel.hpp"

namespace azpos {

struct Position {
  double x_m = 0.0;
  double y_m = 0.0;
  double z_m = 0.0;
};

enum class AngleSource { i2r_aoa, i2r_aod, r2i_aod };

struct AngleEstimate {
  double azimuth_deg = 0.0;    // (-180, 180], counterclockwise from +x
  double elevation_deg = 0.0;  // [-90, 90], from the floor plane
  AngleSource source = AngleSource::i2r_aoa;
};

// anchor + distance * (cos el cos az, cos el sin az, sin el).
Position position_los(const Position& anchor, double distance_m, const AngleEstimate& angle);

// Wall-bounce triangle: side a from the anchor to the bounce point, side b
// from the bounce to the solved position, psi between the incident ray and
// the wall plane.
struct NlosTriangle {
  double a_m = 0.0;
  double b_m = 0.0;
  double psi_rad = 0.0;
  int wall_id = -1;
};

// Casts the ray from the anchor, bounces it off the wall plane, and walks the
// remaining path length along the reflected direction.
std::pair<Position, NlosTriangle> position_nlos(const Position& anchor, double path_length_m,
                                                const AngleEstimate& angle, const WallPlane& wall);

double position_error(const Position& estimate, const Position& truth);

// Nearest-rank percentiles; 100% is the maximum.
std::vector<double> percentile_report(std::span<const double> values,
                                      std::span<const int> percentiles);
std::vector<double> percentile_report(std::span<const double> values);

}  // namespace azpos
