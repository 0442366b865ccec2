// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "azpos/errors.hpp"
#include "azpos/rng.hpp"
#include "azpos/session.hpp"
#include "doctest.h"

using namespace azpos;

namespace {

Geometry los_room(double separation_m) {
  Geometry g;
  g.room = {20.0, 5.0, 3.0};
  g.sta_positions["ista"] = {1.0, 1.0, 1.0};
  g.sta_positions["rsta"] = {1.0 + separation_m, 1.0, 1.0};
  return g;
}

MeasurementExchange exchange_at(double t1, double t2, double t3, double t4) {
  MeasurementExchange ex;
  ex.t1_ps = t1;
  ex.t2_ps = t2;
  ex.t3_ps = t3;
  ex.t4_ps = t4;
  return ex;
}

}  // namespace

TEST_CASE("negotiation accepts a timely reply") {
  SessionState s = negotiate(IftmrParams{}, RstaPolicy{}, 5.0);
  CHECK(s.phase == Phase::measuring);
}

TEST_CASE("negotiation deadline is 10 ms") {
  SessionState s = negotiate(IftmrParams{}, RstaPolicy{}, 12.0);
  CHECK(s.phase == Phase::failed);
  CHECK(s.fail_reason == FailReason::timeout);
}

TEST_CASE("capability mismatch without renegotiation is rejected") {
  IftmrParams params;
  params.bandwidth_ghz = 8.64;
  RstaPolicy policy;
  policy.max_bandwidth_ghz = 2.16;
  SessionState s = negotiate(params, policy, 5.0);
  CHECK(s.phase == Phase::failed);
  CHECK(s.fail_reason == FailReason::rejected);
}

TEST_CASE("counter-proposal merges the parameter sets") {
  IftmrParams params;
  params.bandwidth_ghz = 8.64;
  params.burst_count = 8;
  RstaPolicy policy;
  policy.max_bandwidth_ghz = 4.32;
  policy.max_burst_count = 2;
  policy.allow_counter_proposal = true;
  SessionState s = negotiate(params, policy, 5.0);
  CHECK(s.phase == Phase::measuring);
  CHECK(s.params.bandwidth_ghz == 4.32);
  CHECK(s.params.burst_count == 2);
}

TEST_CASE("invalid parameters are rejected at negotiation") {
  IftmrParams params;
  params.burst_count = 0;
  SessionState s = negotiate(params, RstaPolicy{}, 5.0);
  CHECK(s.phase == Phase::failed);
  CHECK(s.fail_reason == FailReason::rejected);

  params.burst_count = 1;
  params.bandwidth_ghz = 3.0;
  s = negotiate(params, RstaPolicy{}, 5.0);
  CHECK(s.phase == Phase::failed);
  CHECK(s.fail_reason == FailReason::rejected);
}

TEST_CASE("exchange timestamps follow tau and the turnaround") {
  // 10 ns of flight: separation c * 10 ns.
  Geometry g = los_room(2.99792458);
  ClockModel clock;
  ExchangeTiming timing;
  timing.proc_delay_ps = 100000.0;
  MeasurementExchange ex = run_exchange(g, clock, "ista", "rsta", 1, timing);
  CHECK(ex.t1_ps == doctest::Approx(0.0));
  CHECK(ex.t2_ps == doctest::Approx(10000.0).epsilon(1e-12));
  CHECK(ex.t3_ps == doctest::Approx(110000.0).epsilon(1e-12));
  CHECK(ex.t4_ps == doctest::Approx(120000.0).epsilon(1e-12));
  CHECK(ex.tod_error_ps == 0);
  CHECK(ex.toa_error_ps == 0);
}

TEST_CASE("an initiator clock offset cancels out of the RTT") {
  Geometry g = los_room(2.99792458);
  ExchangeTiming timing;
  timing.proc_delay_ps = 100000.0;
  ClockModel plain;
  ClockModel offset;
  offset.ista_offset_ps = 500.0;
  MeasurementExchange a = run_exchange(g, plain, "ista", "rsta", 1, timing);
  MeasurementExchange b = run_exchange(g, offset, "ista", "rsta", 1, timing);
  CHECK(b.t1_ps == doctest::Approx(a.t1_ps + 500.0));
  CHECK(b.t4_ps == doctest::Approx(a.t4_ps + 500.0));
  CHECK(compute_rtt(a) == doctest::Approx(compute_rtt(b)).epsilon(1e-15));
}

TEST_CASE("jitter statistics match the clock model") {
  Geometry g = los_room(3.0);
  ClockModel clock;
  clock.timestamp_jitter_sigma_ps = 100.0;
  ExchangeTiming timing;
  timing.proc_delay_ps = 1e8;
  const double tau = compute_paths(g, "ista", "rsta").front().delay_ps;

  // Monte Carlo oracle for the model: each stamp jitters with sigma = 100 ps,
  // so t2's deviation from truth has sd 100 and (t2 - t1 - tau) sd 100*sqrt2.
  double sum2_single = 0.0, sum2_diff = 0.0;
  const int trials = 4000;
  for (int i = 0; i < trials; ++i) {
    MeasurementExchange ex = run_exchange(g, clock, "ista", "rsta", 1000 + i, timing);
    double single = ex.t2_ps - tau;
    double diff = ex.t2_ps - ex.t1_ps - tau;
    sum2_single += single * single;
    sum2_diff += diff * diff;
    CHECK(ex.toa_error_ps >= 1);  // reported bound is never zero under jitter
  }
  CHECK(std::sqrt(sum2_single / trials) == doctest::Approx(100.0).epsilon(0.08));
  CHECK(std::sqrt(sum2_diff / trials) == doctest::Approx(100.0 * std::sqrt(2.0)).epsilon(0.08));
}

TEST_CASE("rtt formula and the processing-delay cancellation") {
  CHECK(compute_rtt(exchange_at(0, 10000, 110000, 120000)) == doctest::Approx(20000.0));
  // Stretching the turnaround from 100 to 900 ns leaves the RTT alone.
  CHECK(compute_rtt(exchange_at(0, 10000, 910000, 920000)) == doctest::Approx(20000.0));
  CHECK_THROWS_AS(compute_rtt(exchange_at(0, 10000, 9000, 120000)), Error);
}

TEST_CASE("rtt to distance") {
  CHECK(rtt_to_distance(20000.0) == doctest::Approx(2.99792458).epsilon(1e-12));
  CHECK(rtt_to_distance(0.0) == 0.0);
  CHECK_THROWS_AS(rtt_to_distance(-1.0), Error);
  // A 0.1 ns one-way stamp error shows up as about 3 cm of distance.
  double clean = rtt_to_distance(compute_rtt(exchange_at(0, 10000, 110000, 120000)));
  double skewed = rtt_to_distance(compute_rtt(exchange_at(0, 10100, 110000, 120000)));
  CHECK(std::abs(skewed - clean) * 100.0 == doctest::Approx(2.99792458).epsilon(1e-9));
}

TEST_CASE("best exchange selection") {
  std::vector<MeasurementExchange> burst(3);
  burst[0].tod_error_ps = 200;
  burst[0].toa_error_ps = 100;
  burst[1].tod_error_ps = 100;
  burst[1].toa_error_ps = 50;
  burst[2].tod_error_ps = 120;
  burst[2].toa_error_ps = 100;
  CHECK(&select_best_exchange(burst) == &burst[1]);

  std::vector<MeasurementExchange> tied(3);
  CHECK(&select_best_exchange(tied) == &tied[0]);

  std::vector<MeasurementExchange> single(1);
  CHECK(&select_best_exchange(single) == &single[0]);

  std::vector<MeasurementExchange> none;
  CHECK_THROWS_AS(select_best_exchange(none), Error);
}

TEST_CASE("rtt invariances hold exactly on integer timestamps") {
  SplitMix64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    double tau = static_cast<double>(1 + (rng.next_u64() % 100000));
    double proc = static_cast<double>(1 + (rng.next_u64() % 1000000));
    double offset = static_cast<double>(rng.next_u64() % 100000);
    MeasurementExchange base = exchange_at(0, tau, tau + proc, 2 * tau + proc);

    double proc2 = static_cast<double>(1 + (rng.next_u64() % 1000000));
    MeasurementExchange stretched = exchange_at(0, tau, tau + proc2, 2 * tau + proc2);
    CHECK(compute_rtt(base) == compute_rtt(stretched));

    MeasurementExchange shifted =
        exchange_at(0, tau + offset, tau + proc + offset, 2 * tau + proc);
    CHECK(compute_rtt(base) == compute_rtt(shifted));
  }
}

TEST_CASE("full session has the one-burst, three-exchange shape") {
  SessionScenario scenario;
  scenario.geometry = los_room(2.0);
  scenario.rsta = "rsta";
  SessionState s = run_session(scenario, IftmrParams{}, 42);
  REQUIRE(s.phase == Phase::done);
  CHECK(s.exchanges.size() == 3);
  CHECK(s.i2r_aods.size() == 2);
  CHECK(s.r2i_aods.size() == 1);
  CHECK(s.i2r_aods[0].azimuth_deg == doctest::Approx(0.0));
  CHECK(s.r2i_aods[0].azimuth_deg == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_FALSE(s.transcript.empty());

  // Noiseless ranging lands on the geometric distance.
  const MeasurementExchange& best = select_best_exchange(s.exchanges);
  CHECK(rtt_to_distance(compute_rtt(best)) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("burst count of zero fails at negotiation inside the session") {
  SessionScenario scenario;
  scenario.geometry = los_room(2.0);
  scenario.rsta = "rsta";
  IftmrParams params;
  params.burst_count = 0;
  SessionState s = run_session(scenario, params, 1);
  CHECK(s.phase == Phase::failed);
  CHECK(s.fail_reason == FailReason::rejected);
}

TEST_CASE("session distance is exact for line-of-sight placements") {
  SplitMix64 rng(31);
  for (int i = 0; i < 20; ++i) {
    double d = rng.next_uniform(1.0, 15.0);
    SessionScenario scenario;
    scenario.geometry = los_room(d);
    scenario.rsta = "rsta";
    scenario.clock = ClockModel{1500.0, -700.0, 0.0};
    SessionState s = run_session(scenario, IftmrParams{}, rng.next_u64());
    REQUIRE(s.phase == Phase::done);
    double dist = rtt_to_distance(compute_rtt(select_best_exchange(s.exchanges)));
    CHECK(std::abs(dist - d) < 1e-6);
  }
}

TEST_CASE("state machine rejects out-of-phase operations") {
  SessionState s = negotiate(IftmrParams{}, RstaPolicy{}, 5.0);
  REQUIRE(s.phase == Phase::measuring);
  // R2I AoD reports belong after the burst.
  CHECK_THROWS_AS(record_r2i_aod(s, AngleEstimate{}), Error);
  begin_aod_feedback(s);
  CHECK_THROWS_AS(record_exchange(s, MeasurementExchange{}), Error);
  CHECK_THROWS_AS(record_i2r_aod(s, AngleEstimate{}), Error);
  record_r2i_aod(s, AngleEstimate{});
  complete_session(s);
  CHECK(s.phase == Phase::done);
  CHECK_THROWS_AS(begin_aod_feedback(s), Error);
}

TEST_CASE("transcript dump decodes every frame") {
  SessionScenario scenario;
  scenario.geometry = los_room(2.0);
  scenario.rsta = "rsta";
  scenario.los_likelihood_milli = 970;
  SessionState s = run_session(scenario, IftmrParams{}, 7);
  REQUIRE(s.phase == Phase::done);
  std::string dump = dump_transcript(s);
  CHECK(dump.find("RSTA->ISTA") != std::string::npos);
  CHECK(dump.find("ISTA->RSTA") != std::string::npos);
  CHECK(dump.find("ppdu:") != std::string::npos);
  CHECK(dump.find("elements=") != std::string::npos);
  // 3 reports + 3 acks + handoff + final = 8 frames on the air.
  CHECK(s.transcript.size() == 8);
}

TEST_CASE("unknown station is reported") {
  SessionScenario scenario;
  scenario.geometry = los_room(2.0);
  scenario.geometry.sta_positions.erase("rsta");
  scenario.rsta = "rsta";
  CHECK_THROWS_AS(run_session(scenario, IftmrParams{}, 1), Error);
  ClockModel clock;
  CHECK_THROWS_AS(run_exchange(scenario.geometry, clock, "ista", "rsta", 1), Error);
}
