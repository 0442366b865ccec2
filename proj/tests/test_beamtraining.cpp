// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "azpos/beamtraining.hpp"
#include "azpos/errors.hpp"
#include "azpos/rng.hpp"
#include "doctest.h"

using namespace azpos;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Pdp make_pdp(std::initializer_list<PdpTap> taps) { return Pdp{taps}; }

// Direct-only 2 m link, quasi-omni receive.
SimLink direct_link() {
  Geometry g;
  g.room = {20.0, 20.0, 3.0};
  g.sta_positions["a"] = {2.0, 10.0, 1.0};
  g.sta_positions["b"] = {4.0, 10.0, 1.0};
  auto taps = compute_paths(g, "a", "b");
  std::vector<ChannelTap> direct_only;
  for (const auto& t : taps) {
    if (t.kind == PathKind::direct) direct_only.push_back(t);
  }
  return SimLink{direct_only, ArrayConfig{}, ArrayConfig{1, 1, 0.5, 60.48, 2.16},
                 AwvConfig{0, 0.0, 0.0}};
}

SweepPlan bearing_plan(std::initializer_list<double> azimuths) {
  SweepPlan plan;
  int id = 0;
  for (double az : azimuths) plan.candidates.push_back(AwvConfig{id++, az, 0.0});
  plan.trn = TrnConfig{static_cast<uint16_t>(plan.candidates.size()), 1, 2, 2};
  return plan;
}

}  // namespace

TEST_CASE("combining a single pdp is the identity") {
  Pdp pdp = make_pdp({{0, 1.0, 0.0, 30.0}, {4, 0.5, 0.5, 20.0}});
  Pdp combined = combine_pdps(std::span(&pdp, 1));
  REQUIRE(combined.taps.size() == 2);
  CHECK(combined.taps[0].i == doctest::Approx(1.0));
  CHECK(combined.taps[1].q == doctest::Approx(0.5));
  CHECK(combined.taps[0].snr_db == doctest::Approx(30.0));
}

TEST_CASE("combining identical pdps keeps I/Q and gains integration SNR") {
  Pdp pdp = make_pdp({{0, 1.0, 0.0, 30.0}});
  std::vector<Pdp> group{pdp, pdp};
  Pdp combined = combine_pdps(group);
  REQUIRE(combined.taps.size() == 1);
  CHECK(combined.taps[0].i == doctest::Approx(1.0));
  CHECK(combined.taps[0].q == doctest::Approx(0.0));
  CHECK(combined.taps[0].snr_db == doctest::Approx(30.0 + 10.0 * std::log10(2.0)));
}

TEST_CASE("disjoint delay sets average against implicit zeros") {
  std::vector<Pdp> group{make_pdp({{0, 1.0, 0.0, 30.0}}), make_pdp({{5, 0.8, 0.0, 30.0}})};
  Pdp combined = combine_pdps(group);
  REQUIRE(combined.taps.size() == 2);
  CHECK(combined.taps[0].delay_sample_index == 0);
  CHECK(combined.taps[0].i == doctest::Approx(0.5));
  CHECK(combined.taps[1].delay_sample_index == 5);
  CHECK(combined.taps[1].i == doctest::Approx(0.4));
}

TEST_CASE("empty group is rejected") {
  std::vector<Pdp> none;
  CHECK_THROWS_AS(combine_pdps(none), Error);
}

TEST_CASE("quality of an isolated tap is its power") {
  CHECK(pdp_quality(make_pdp({{0, 1.0, 0.0, 30.0}})) == doctest::Approx(1.0));
}

TEST_CASE("quality splits between equal neighbors") {
  CHECK(pdp_quality(make_pdp({{0, 1.0, 0.0, 30.0}, {1, 1.0, 0.0, 30.0}})) ==
        doctest::Approx(0.5));
}

TEST_CASE("quality window arithmetic") {
  CHECK(pdp_quality(make_pdp({{4, 1.0, 0.0, 20.0}, {6, 2.0, 0.0, 30.0}, {8, 1.0, 0.0, 20.0}})) ==
        doctest::Approx(4.0 / 3.0));
  // Taps outside the 3-sample window do not count.
  CHECK(pdp_quality(make_pdp({{0, 2.0, 0.0, 30.0}, {10, 1.0, 0.0, 20.0}})) ==
        doctest::Approx(4.0));
}

TEST_CASE("quality follows the first path, not the strongest") {
  // Both taps exceed half the maximum power; the earlier one is scored.
  Pdp pdp = make_pdp({{2, 0.9, 0.0, 30.0}, {4, 1.0, 0.0, 30.0}});
  CHECK(main_tap_index(pdp) == 0);
  CHECK(pdp_quality(pdp) == doctest::Approx(0.81 / (1.0 + 1.0)));
  CHECK_THROWS_AS(pdp_quality(Pdp{}), Error);
}

TEST_CASE("fpbt picks the true bearing among offsets") {
  SimLink link = direct_link();
  SweepPlan plan = bearing_plan({0.0, 10.0, 20.0, -10.0, -20.0});
  auto pair = golay_pair(128);
  BestAwvResult best = fpbt(link, plan, pair, kInf, 1);
  CHECK(best.awv.awv_id == 0);  // candidate steered along the true 0-degree bearing
  CHECK(best.quality > 0.0);
}

TEST_CASE("fpbt equals the exhaustive sweep") {
  SimLink link = direct_link();
  SweepPlan plan = bearing_plan({-30.0, -15.0, 0.0, 15.0, 30.0});
  auto pair = golay_pair(128);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    BestAwvResult fast = fpbt(link, plan, pair, 15.0, seed);
    int best_idx = -1;
    double best_quality = -1.0;
    int best_id = 0;
    for (size_t c = 0; c < plan.candidates.size(); ++c) {
      BestAwvResult r = evaluate_candidate(link, plan, static_cast<int>(c), pair, 15.0, seed);
      if (r.quality > best_quality ||
          (r.quality == best_quality && r.awv.awv_id < best_id)) {
        best_quality = r.quality;
        best_idx = static_cast<int>(c);
        best_id = r.awv.awv_id;
      }
    }
    CHECK(fast.awv.awv_id == plan.candidates[best_idx].awv_id);
    CHECK(fast.quality == best_quality);
  }
}

TEST_CASE("equal-quality duplicates resolve to the lowest awv id") {
  SimLink link = direct_link();
  SweepPlan plan;
  plan.candidates = {AwvConfig{7, 0.0, 0.0}, AwvConfig{3, 0.0, 0.0}};
  plan.trn = TrnConfig{2, 1, 2, 2};
  auto pair = golay_pair(64);
  // Noiseless: identical candidates measure identical quality.
  BestAwvResult best = fpbt(link, plan, pair, kInf, 5);
  CHECK(best.awv.awv_id == 3);
}

TEST_CASE("noiseless selection is invariant under common gain scaling") {
  SimLink link = direct_link();
  SweepPlan plan = bearing_plan({0.0, 10.0, 20.0});
  auto pair = golay_pair(128);
  BestAwvResult base = fpbt(link, plan, pair, kInf, 2);

  SimLink scaled = link;
  for (auto& tap : scaled.taps) {
    tap.gain_co *= 3.0;
    tap.gain_cross *= 3.0;
  }
  BestAwvResult boosted = fpbt(scaled, plan, pair, kInf, 2);
  CHECK(base.awv.awv_id == boosted.awv.awv_id);
}

TEST_CASE("likelihood mapping") {
  CHECK(likelihood_from_amplitudes(1.0, 0.0) >= 1.0 - 1e-9);
  CHECK(likelihood_from_amplitudes(0.5, 0.5) == doctest::Approx(0.5));
  CHECK(likelihood_from_amplitudes(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  // Monotone: up in co-pol, down in cross-pol.
  CHECK(likelihood_from_amplitudes(0.8, 0.3) > likelihood_from_amplitudes(0.6, 0.3));
  CHECK(likelihood_from_amplitudes(0.8, 0.3) > likelihood_from_amplitudes(0.8, 0.5));
}

TEST_CASE("direct-only channel leaves the cross-polarized probe empty") {
  SimLink link = direct_link();
  auto pair = golay_pair(128);
  LosLikelihoodReport report = los_assessment(link, AwvConfig{0, 0.0, 0.0}, pair, kInf, 3);
  CHECK(report.p_main_crosspol == 0.0);
  CHECK(report.p_main_copol > 0.0);
  CHECK(report.likelihood >= 1.0 - 1e-9);
  CHECK(classify_los(report));
}

TEST_CASE("pure line-of-sight stays above 0.99 likelihood at 30 dB") {
  SimLink link = direct_link();
  auto pair = golay_pair(128);
  for (uint64_t seed = 0; seed < 100; ++seed) {
    LosLikelihoodReport report = los_assessment(link, AwvConfig{0, 0.0, 0.0}, pair, 30.0, seed);
    CHECK(report.likelihood >= 0.99);
  }
}

TEST_CASE("wall-bounce-only channel classifies as NLOS") {
  Geometry g;
  g.room = {10.0, 5.0, 3.0};
  g.sta_positions["a"] = {1.0, 1.0, 1.0};
  g.sta_positions["b"] = {3.0, 0.8, 1.0};
  g.blockers.push_back({2.0, 0.5, 2.0, 1.2});
  auto taps = compute_paths(g, "a", "b");
  SimLink link{taps, ArrayConfig{}, ArrayConfig{1, 1, 0.5, 60.48, 2.16}, AwvConfig{0, 0.0, 0.0}};
  auto pair = golay_pair(128);
  SweepPlan plan;
  plan.trn = TrnConfig{36, 1, 2, 2};
  for (int i = 0; i < 36; ++i) plan.candidates.push_back(AwvConfig{i, -180.0 + 10.0 * i, 0.0});
  BestAwvResult best = fpbt(link, plan, pair, kInf, 4);
  LosLikelihoodReport report = los_assessment(link, best.awv, pair, kInf, 4);
  CHECK(report.p_main_crosspol > 0.0);
  CHECK(report.likelihood < 0.5);
  CHECK_FALSE(classify_los(report));
}

TEST_CASE("sweep plan validation") {
  SweepPlan plan = bearing_plan({0.0, 10.0});
  plan.trn = TrnConfig{1, 1, 2, 2};  // capacity 2 M-subfields, need 4
  CHECK_THROWS_AS(validate_sweep_plan(plan), Error);
}
