// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "azpos/channel.hpp"
#include "azpos/errors.hpp"
#include "azpos/rng.hpp"
#include "azpos/solver.hpp"
#include "doctest.h"

using namespace azpos;

TEST_CASE("polar to cartesian") {
  Position p = position_los({0, 0, 0}, 4.0, {30.0, 0.0, AngleSource::i2r_aoa});
  CHECK(p.x_m == doctest::Approx(3.4641016151).epsilon(1e-9));
  CHECK(p.y_m == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(p.z_m == doctest::Approx(0.0));
}

TEST_CASE("zero distance returns the anchor") {
  Position anchor{1.5, -2.0, 0.7};
  Position p = position_los(anchor, 0.0, {123.0, -45.0, AngleSource::i2r_aoa});
  CHECK(position_error(p, anchor) == 0.0);
}

TEST_CASE("straight-up ray") {
  Position p = position_los({1, 2, 3}, 1.0, {0.0, 90.0, AngleSource::i2r_aoa});
  CHECK(p.x_m == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.y_m == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.z_m == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("wall bounce solution on the 45-degree triangle") {
  WallPlane wall{2, {0.0, 2.0, 0.0}, {0.0, -1.0, 0.0}};
  auto [pos, triangle] =
      position_nlos({0, 0, 1}, 4.0 * std::sqrt(2.0), {45.0, 0.0, AngleSource::i2r_aoa}, wall);
  CHECK(pos.x_m == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(pos.y_m == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pos.z_m == doctest::Approx(1.0));
  CHECK(triangle.a_m == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(triangle.b_m == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(triangle.a_m + triangle.b_m == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(triangle.psi_rad == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-12));
  CHECK(triangle.wall_id == 2);
}

TEST_CASE("ray parallel to the wall misses") {
  WallPlane wall{0, {0.0, 2.0, 0.0}, {0.0, 1.0, 0.0}};
  CHECK_THROWS_AS(position_nlos({0, 0, 1}, 5.0, {0.0, 0.0, AngleSource::i2r_aoa}, wall), Error);
  // Wall behind the ray.
  CHECK_THROWS_AS(position_nlos({0, 3, 1}, 5.0, {90.0, 0.0, AngleSource::i2r_aoa}, wall), Error);
}

TEST_CASE("path ending at the bounce is degenerate") {
  WallPlane wall{0, {0.0, 2.0, 0.0}, {0.0, 1.0, 0.0}};
  double a = 2.0 * std::sqrt(2.0);
  CHECK_THROWS_AS(position_nlos({0, 0, 1}, a, {45.0, 0.0, AngleSource::i2r_aoa}, wall), Error);
  try {
    position_nlos({0, 0, 1}, a, {45.0, 0.0, AngleSource::i2r_aoa}, wall);
  } catch (const Error& err) {
    CHECK(err.code() == Errc::path_too_short);
  }
}

TEST_CASE("position error basics") {
  CHECK(position_error({1, 1, 1}, {1, 1, 1}) == 0.0);
  CHECK(position_error({0, 0, 0}, {3, 4, 0}) == doctest::Approx(5.0));
  Position p{0.3, -1.2, 2.0}, q{-0.7, 0.4, 1.1};
  CHECK(position_error(p, q) == doctest::Approx(position_error(q, p)));
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> v{1, 2, 3, 4};
  auto pct = percentile_report(v);
  CHECK(pct == std::vector<double>{1, 2, 3, 4});

  std::vector<double> single{7.5};
  pct = percentile_report(single);
  CHECK(pct == std::vector<double>{7.5, 7.5, 7.5, 7.5});

  std::vector<double> none;
  CHECK_THROWS_AS(percentile_report(none), Error);
}

TEST_CASE("percentiles are monotone under error growth") {
  SplitMix64 rng(17);
  std::vector<double> v;
  for (int i = 0; i < 40; ++i) v.push_back(rng.next_uniform(0.0, 50.0));
  auto base = percentile_report(v);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> worse = v;
    worse[rng.next_u64() % worse.size()] += rng.next_uniform(0.0, 20.0);
    auto grown = percentile_report(worse);
    for (size_t i = 0; i < base.size(); ++i) CHECK(grown[i] >= base[i] - 1e-12);
  }
}

TEST_CASE("LOS round trip against the channel geometry") {
  SplitMix64 rng(23);
  for (int i = 0; i < 30; ++i) {
    Geometry g;
    g.room = {12.0, 8.0, 3.0};
    Vec3 a{rng.next_uniform(1.0, 11.0), rng.next_uniform(1.0, 7.0), 1.0};
    Vec3 b{rng.next_uniform(1.0, 11.0), rng.next_uniform(1.0, 7.0), rng.next_uniform(0.5, 2.5)};
    if (distance(a, b) < 0.5) continue;
    g.sta_positions["a"] = a;
    g.sta_positions["b"] = b;
    auto taps = compute_paths(g, "a", "b");
    const ChannelTap& direct = taps.front();
    REQUIRE(direct.kind == PathKind::direct);
    Position est = position_los({a.x, a.y, a.z}, direct.path_length_m,
                                {direct.aod_azimuth_deg, direct.aod_elevation_deg,
                                 AngleSource::i2r_aoa});
    CHECK(position_error(est, {b.x, b.y, b.z}) < 1e-9);
  }
}

TEST_CASE("NLOS round trip against the channel geometry") {
  SplitMix64 rng(29);
  auto walls_of = [](const RoomBox& room) { return wall_planes(room); };
  for (int i = 0; i < 30; ++i) {
    Geometry g;
    g.room = {12.0, 8.0, 3.0};
    Vec3 a{rng.next_uniform(1.0, 11.0), rng.next_uniform(1.0, 7.0), 1.0};
    Vec3 b{rng.next_uniform(1.0, 11.0), rng.next_uniform(1.0, 7.0), 1.0};
    if (distance(a, b) < 0.5) continue;
    g.sta_positions["a"] = a;
    g.sta_positions["b"] = b;
    auto taps = compute_paths(g, "a", "b");
    auto walls = walls_of(g.room);
    for (const auto& tap : taps) {
      if (tap.kind != PathKind::reflected) continue;
      auto [est, triangle] = position_nlos(
          {a.x, a.y, a.z}, tap.path_length_m,
          {tap.aod_azimuth_deg, tap.aod_elevation_deg, AngleSource::i2r_aoa},
          walls[tap.wall_id]);
      CHECK(position_error(est, {b.x, b.y, b.z}) < 1e-9);
      CHECK(triangle.a_m + triangle.b_m == doctest::Approx(tap.path_length_m).epsilon(1e-12));
      CHECK(triangle.a_m > 0.0);
      CHECK(triangle.b_m > 0.0);
    }
  }
}

TEST_CASE("angle error maps to the chord bound") {
  SplitMix64 rng(31);
  Position anchor{0, 0, 0};
  for (int i = 0; i < 40; ++i) {
    double d = rng.next_uniform(0.5, 12.0);
    double az = rng.next_uniform(-180.0, 180.0);
    double delta_deg = rng.next_uniform(-6.0, 6.0);
    Position truth = position_los(anchor, d, {az, 0.0, AngleSource::i2r_aoa});
    Position skewed = position_los(anchor, d, {az + delta_deg, 0.0, AngleSource::i2r_aoa});
    double delta_rad = std::abs(delta_deg) * std::numbers::pi / 180.0;
    double chord = 2.0 * d * std::sin(delta_rad / 2.0);
    CHECK(position_error(skewed, truth) == doctest::Approx(chord).epsilon(1e-9));
    CHECK(position_error(skewed, truth) <= d * delta_rad + 1e-12);
  }
}
