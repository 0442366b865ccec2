// SPDX-License-Identifier: Apache-2.0
#include "azpos/solver.hpp"

#include <algorithm>
#include <cmath>

#include "azpos/errors.hpp"

namespace azpos {

Position position_los(const Position& anchor, double distance_m, const AngleEstimate& angle) {
  Vec3 dir = direction_from_angles(angle.azimuth_deg, angle.elevation_deg);
  return {anchor.x_m + distance_m * dir.x, anchor.y_m + distance_m * dir.y,
          anchor.z_m + distance_m * dir.z};
}

std::pair<Position, NlosTriangle> position_nlos(const Position& anchor, double path_length_m,
                                                const AngleEstimate& angle,
                                                const WallPlane& wall) {
  Vec3 origin{anchor.x_m, anchor.y_m, anchor.z_m};
  Vec3 dir = direction_from_angles(angle.azimuth_deg, angle.elevation_deg);

  double denom = dir.dot(wall.normal);
  if (std::abs(denom) < 1e-12) {
    raise(Errc::ray_misses_wall, "ray parallel to the wall plane");
  }
  double a = (wall.point - origin).dot(wall.normal) / denom;
  if (a <= 0.0) {
    raise(Errc::ray_misses_wall, "wall is behind the ray");
  }
  if (path_length_m <= a) {
    raise(Errc::path_too_short, "path ends before the bounce");
  }

  Vec3 bounce = origin + dir * a;
  Vec3 reflected = dir - wall.normal * (2.0 * dir.dot(wall.normal));
  double b = path_length_m - a;
  Vec3 solved = bounce + reflected * b;

  NlosTriangle triangle;
  triangle.a_m = a;
  triangle.b_m = b;
  triangle.psi_rad = std::asin(std::clamp(std::abs(dir.dot(wall.normal)), 0.0, 1.0));
  triangle.wall_id = wall.id;
  return {{solved.x, solved.y, solved.z}, triangle};
}

double position_error(const Position& estimate, const Position& truth) {
  double dx = estimate.x_m - truth.x_m;
  double dy = estimate.y_m - truth.y_m;
  double dz = estimate.z_m - truth.z_m;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<double> percentile_report(std::span<const double> values,
                                      std::span<const int> percentiles) {
  if (values.empty()) raise(Errc::empty_list, "no values to rank");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(percentiles.size());
  const double n = static_cast<double>(sorted.size());
  for (int p : percentiles) {
    size_t rank = static_cast<size_t>(std::ceil(p / 100.0 * n));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    out.push_back(sorted[rank - 1]);
  }
  return out;
}

std::vector<double> percentile_report(std::span<const double> values) {
  static constexpr int kDefault[] = {25, 50, 75, 100};
  return percentile_report(values, kDefault);
}

}  // namespace azpos
