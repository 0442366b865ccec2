// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "azpos/channel.hpp"
#include "azpos/frames.hpp"
#include "azpos/solver.hpp"

namespace azpos {

struct IftmrParams {
  int burst_count = 1;
  int session_duration_ms = 100;
  double bandwidth_ghz = 2.16;  // one of 2.16, 4.32, 6.48, 8.64
  bool secure = false;
  bool request_i2r_aod = true;
  bool request_r2i_aod = true;
  bool first_path = true;
};

// What the responder is willing to grant.
struct RstaPolicy {
  double max_bandwidth_ghz = 8.64;
  int max_burst_count = 16;
  bool supports_secure = true;
  bool supports_i2r_aod = true;
  bool supports_r2i_aod = true;
  bool supports_first_path = true;
  bool allow_counter_proposal = false;
};

enum class Phase { idle, negotiating, measuring, aod_feedback, done, failed };

enum class FailReason { none, timeout, rejected, no_path, security_violation };

// One t1..t4 exchange. Times are picoseconds kept at full double precision;
// the 64-bit wire fields are rounded only when a frame is encoded.
struct MeasurementExchange {
  double t1_ps = 0.0;  // ISTA departure stamp
  double t2_ps = 0.0;  // RSTA arrival stamp
  double t3_ps = 0.0;  // RSTA departure stamp
  double t4_ps = 0.0;  // ISTA arrival stamp
  uint32_t tod_error_ps = 0;
  uint32_t toa_error_ps = 0;
  int tx_awv_id = -1;
  int rx_awv_id = -1;
};

struct ClockModel {
  double ista_offset_ps = 0.0;
  double rsta_offset_ps = 0.0;
  double timestamp_jitter_sigma_ps = 0.0;
};

struct TranscriptEntry {
  std::string direction;  // "ISTA->RSTA" or "RSTA->ISTA"
  Bytes ppdu;
  std::string summary;
};

struct SessionState {
  Phase phase = Phase::idle;
  FailReason fail_reason = FailReason::none;
  IftmrParams params;
  std::vector<MeasurementExchange> exchanges;
  std::vector<AngleEstimate> i2r_aods;
  std::vector<AngleEstimate> r2i_aods;
  std::vector<TranscriptEntry> transcript;
};

// Phase transition helpers; out-of-order calls report invariant violations.
void record_exchange(SessionState& state, const MeasurementExchange& exchange);
void record_i2r_aod(SessionState& state, const AngleEstimate& angle);
void begin_aod_feedback(SessionState& state);
void record_r2i_aod(SessionState& state, const AngleEstimate& angle);
void complete_session(SessionState& state);
void fail_session(SessionState& state, FailReason reason);

// IFTMR/ACK+IFTM negotiation. The ACK+IFTM reply must land within 10 ms;
// capability mismatches are rejected unless the policy counter-proposes, in
// which case the merged parameter set is adopted.
SessionState negotiate(const IftmrParams& ista_params, const RstaPolicy& rsta_policy,
                       double reply_latency_ms);

struct ExchangeTiming {
  double start_ps = 0.0;
  double proc_delay_ps = 1e8;  // responder turnaround, cancels out of the RTT
};

// True times follow the first-path time of flight; recorded stamps add the
// per-station clock offset and a jitter draw per stamp.
MeasurementExchange run_exchange(const Geometry& geometry, const ClockModel& clock,
                                 const std::string& ista, const std::string& rsta, uint64_t seed,
                                 const ExchangeTiming& timing = {});

// (t4 - t1) - (t3 - t2), in picoseconds.
double compute_rtt(const MeasurementExchange& exchange);

// c * rtt / 2, in meters.
double rtt_to_distance(double rtt_ps);

// Exchange minimizing tod_error + toa_error; ties go to the earliest.
const MeasurementExchange& select_best_exchange(std::span<const MeasurementExchange> exchanges);

// Optional frame armor supplied by the secure layer. protect turns a frame
// into wire bytes, unprotect reverses it; both replace the plain codec.
struct FrameProtection {
  std::function<Bytes(const FtmFrame&)> protect;
  std::function<FtmFrame(std::span<const uint8_t>)> unprotect;
};

struct SessionScenario {
  Geometry geometry;
  std::string ista = "ista";
  std::string rsta;
  ClockModel clock;
  RstaPolicy policy;
  ReflectionModel reflection;
  double reply_latency_ms = 5.0;
  int exchanges_per_burst = 3;
  double proc_delay_ps = 1e8;
  int best_awv_id = 0;
  int los_likelihood_milli = -1;  // included in the final frame when >= 0
};

// Full session: negotiation, timestamped burst exchanges, I2R AoD estimates
// during the burst, best-AWV handoff and the R2I AoD report once the burst
// ends. Every frame crosses the wire codec (and the protection hooks when
// given); the transcript records each PPDU.
SessionState run_session(const SessionScenario& scenario, const IftmrParams& params,
                         uint64_t seed, const FrameProtection* protection = nullptr);

std::string dump_transcript(const SessionState& state);

}  // namespace azpos
