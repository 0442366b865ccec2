// SPDX-License-Identifier: Apache-2.0
#include "azpos/session.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "azpos/errors.hpp"
#include "azpos/rng.hpp"

namespace azpos {

namespace {

constexpr double kNegotiationDeadlineMs = 10.0;

bool valid_bandwidth(double bw) { return bw == 2.16 || bw == 4.32 || bw == 6.48 || bw == 8.64; }

bool params_valid(const IftmrParams& p) {
  return p.burst_count >= 1 && p.session_duration_ms >= 1 && valid_bandwidth(p.bandwidth_ghz);
}

bool policy_satisfies(const IftmrParams& p, const RstaPolicy& policy) {
  if (p.bandwidth_ghz > policy.max_bandwidth_ghz) return false;
  if (p.burst_count > policy.max_burst_count) return false;
  if (p.secure && !policy.supports_secure) return false;
  if (p.request_i2r_aod && !policy.supports_i2r_aod) return false;
  if (p.request_r2i_aod && !policy.supports_r2i_aod) return false;
  if (p.first_path && !policy.supports_first_path) return false;
  return true;
}

IftmrParams merge_params(const IftmrParams& p, const RstaPolicy& policy) {
  IftmrParams merged = p;
  static constexpr double kBandwidths[] = {8.64, 6.48, 4.32, 2.16};
  for (double bw : kBandwidths) {
    if (bw <= policy.max_bandwidth_ghz && bw <= p.bandwidth_ghz) {
      merged.bandwidth_ghz = bw;
      break;
    }
  }
  merged.burst_count = std::min(p.burst_count, policy.max_burst_count);
  merged.secure = p.secure && policy.supports_secure;
  merged.request_i2r_aod = p.request_i2r_aod && policy.supports_i2r_aod;
  merged.request_r2i_aod = p.request_r2i_aod && policy.supports_r2i_aod;
  merged.first_path = p.first_path && policy.supports_first_path;
  return merged;
}

void require_phase(const SessionState& state, Phase expected, const char* op) {
  if (state.phase != expected) {
    raise(Errc::invariant_violation, std::string(op) + " not allowed in this phase");
  }
}

int16_t to_centideg(double deg) {
  int v = static_cast<int>(std::lround(deg * 100.0));
  if (v <= -18000) v += 36000;
  if (v > 18000) v -= 36000;
  return static_cast<int16_t>(v);
}

double wrap_azimuth_deg(double deg) {
  while (deg > 180.0) deg -= 360.0;
  while (deg <= -180.0) deg += 360.0;
  return deg;
}

uint64_t stamp_u64(double ps) { return static_cast<uint64_t>(std::llround(std::max(ps, 0.0))); }

}  // namespace

void record_exchange(SessionState& state, const MeasurementExchange& exchange) {
  require_phase(state, Phase::measuring, "exchange");
  state.exchanges.push_back(exchange);
}

void record_i2r_aod(SessionState& state, const AngleEstimate& angle) {
  require_phase(state, Phase::measuring, "I2R AoD estimation");
  state.i2r_aods.push_back(angle);
}

void begin_aod_feedback(SessionState& state) {
  require_phase(state, Phase::measuring, "AoD feedback");
  state.phase = Phase::aod_feedback;
}

void record_r2i_aod(SessionState& state, const AngleEstimate& angle) {
  require_phase(state, Phase::aod_feedback, "R2I AoD report");
  state.r2i_aods.push_back(angle);
}

void complete_session(SessionState& state) {
  require_phase(state, Phase::aod_feedback, "completion");
  state.phase = Phase::done;
}

void fail_session(SessionState& state, FailReason reason) {
  state.phase = Phase::failed;
  state.fail_reason = reason;
}

SessionState negotiate(const IftmrParams& ista_params, const RstaPolicy& rsta_policy,
                       double reply_latency_ms) {
  SessionState state;
  state.params = ista_params;
  state.phase = Phase::negotiating;

  if (!params_valid(ista_params)) {
    fail_session(state, FailReason::rejected);
    return state;
  }
  if (reply_latency_ms > kNegotiationDeadlineMs) {
    fail_session(state, FailReason::timeout);
    return state;
  }
  if (!policy_satisfies(ista_params, rsta_policy)) {
    if (!rsta_policy.allow_counter_proposal) {
      fail_session(state, FailReason::rejected);
      return state;
    }
    // Counter-proposal round: adopt the merged parameter set.
    state.params = merge_params(ista_params, rsta_policy);
    if (!params_valid(state.params) || !policy_satisfies(state.params, rsta_policy)) {
      fail_session(state, FailReason::rejected);
      return state;
    }
  }
  state.phase = Phase::measuring;
  return state;
}

MeasurementExchange run_exchange(const Geometry& geometry, const ClockModel& clock,
                                 const std::string& ista, const std::string& rsta, uint64_t seed,
                                 const ExchangeTiming& timing) {
  auto taps = compute_paths(geometry, ista, rsta);
  if (taps.empty()) raise(Errc::no_path, "no propagation path between " + ista + " and " + rsta);
  const double tof_ps = taps.front().delay_ps;  // first path

  const double t1 = timing.start_ps;
  const double t2 = t1 + tof_ps;
  const double t3 = t2 + timing.proc_delay_ps;
  const double t4 = t3 + tof_ps;

  SplitMix64 rng(seed);
  const double sigma = clock.timestamp_jitter_sigma_ps;
  double j1 = 0.0, j2 = 0.0, j3 = 0.0, j4 = 0.0;
  if (sigma > 0.0) {
    j1 = rng.next_gaussian() * sigma;
    j2 = rng.next_gaussian() * sigma;
    j3 = rng.next_gaussian() * sigma;
    j4 = rng.next_gaussian() * sigma;
  }

  MeasurementExchange ex;
  ex.t1_ps = t1 + clock.ista_offset_ps + j1;
  ex.t2_ps = t2 + clock.rsta_offset_ps + j2;
  ex.t3_ps = t3 + clock.rsta_offset_ps + j3;
  ex.t4_ps = t4 + clock.ista_offset_ps + j4;
  // Reported error bound: twice the jitter magnitude, rounded up to 1 ps.
  ex.tod_error_ps = static_cast<uint32_t>(std::ceil(2.0 * std::max(std::abs(j1), std::abs(j3))));
  ex.toa_error_ps = static_cast<uint32_t>(std::ceil(2.0 * std::max(std::abs(j2), std::abs(j4))));
  return ex;
}

double compute_rtt(const MeasurementExchange& ex) {
  if (!(ex.t1_ps < ex.t2_ps && ex.t2_ps < ex.t3_ps && ex.t3_ps < ex.t4_ps)) {
    raise(Errc::non_monotonic_timestamps, "timestamps must satisfy t1 < t2 < t3 < t4");
  }
  return (ex.t4_ps - ex.t1_ps) - (ex.t3_ps - ex.t2_ps);
}

double rtt_to_distance(double rtt_ps) {
  if (rtt_ps < 0.0) raise(Errc::negative_rtt, "negative round-trip time");
  return rtt_ps * kSpeedOfLightMetersPerPs / 2.0;
}

const MeasurementExchange& select_best_exchange(std::span<const MeasurementExchange> exchanges) {
  if (exchanges.empty()) raise(Errc::empty_burst, "no exchanges");
  size_t best = 0;
  uint64_t best_err = static_cast<uint64_t>(exchanges[0].tod_error_ps) + exchanges[0].toa_error_ps;
  for (size_t i = 1; i < exchanges.size(); ++i) {
    uint64_t err = static_cast<uint64_t>(exchanges[i].tod_error_ps) + exchanges[i].toa_error_ps;
    if (err < best_err) {
      best = i;
      best_err = err;
    }
  }
  return exchanges[best];
}

namespace {

// Wire hop: encode (or protect), wrap in a PPDU, then decode on the far side.
struct Wire {
  const FrameProtection* protection;
  bool secure_trn;
  std::vector<TranscriptEntry>* transcript;

  FtmFrame send(const FtmFrame& frame, const char* direction, const std::string& summary) const {
    Bytes body = protection ? protection->protect(frame) : encode_ftm_frame(frame);

    EdmgPpdu ppdu;
    ppdu.trn_config = TrnConfig{1, 0, 2, 2};
    ppdu.mac_body = std::move(body);
    for (int i = 0; i < ppdu.trn_config.total_subfields(); ++i) {
      ppdu.trn_subfield_sequences.push_back(
          secure_trn ? TrnSequenceId{TrnSequenceKind::secure, static_cast<uint32_t>(i)}
                     : TrnSequenceId{TrnSequenceKind::golay, 128});
    }
    Bytes wire_bytes = encode_ppdu(ppdu);
    transcript->push_back({direction, wire_bytes, summary});

    EdmgPpdu received = decode_ppdu(wire_bytes);
    if (protection) return protection->unprotect(received.mac_body);
    return decode_ftm_frame(received.mac_body).frame;
  }
};

ChannelMeasurementFeedback feedback_from_taps(std::span<const ChannelTap> taps,
                                              double bandwidth_ghz) {
  ChannelMeasurementFeedback cmf;
  const double ts = sample_period_ps(bandwidth_ghz);
  int last_index = -1;
  for (const auto& tap : taps) {
    int idx = static_cast<int>(std::llround(tap.delay_ps / ts));
    if (idx <= last_index) continue;  // one reported tap per sample bin
    last_index = idx;
    CmfTap t;
    t.delay_sample_index = static_cast<uint16_t>(idx);
    t.i = static_cast<float>(tap.gain_co.real());
    t.q = static_cast<float>(tap.gain_co.imag());
    t.snr_db = static_cast<float>(20.0 * std::log10(std::abs(tap.gain_co) / 1e-6));
    cmf.taps.push_back(t);
  }
  return cmf;
}

}  // namespace

SessionState run_session(const SessionScenario& scenario, const IftmrParams& params,
                         uint64_t seed, const FrameProtection* protection) {
  SessionState state = negotiate(params, scenario.policy, scenario.reply_latency_ms);
  if (state.phase != Phase::measuring) return state;

  auto taps = compute_paths(scenario.geometry, scenario.ista, scenario.rsta, scenario.reflection);
  if (taps.empty()) {
    fail_session(state, FailReason::no_path);
    return state;
  }
  const ChannelTap& first = taps.front();

  Wire wire{protection, protection != nullptr || state.params.secure, &state.transcript};
  ChannelMeasurementFeedback cmf = feedback_from_taps(taps, state.params.bandwidth_ghz);

  uint8_t next_token = 1;
  try {
    for (int burst = 0; burst < state.params.burst_count; ++burst) {
      for (int e = 0; e < scenario.exchanges_per_burst; ++e) {
        int idx = burst * scenario.exchanges_per_burst + e;
        ExchangeTiming timing;
        timing.start_ps = static_cast<double>(idx) * 1e9;
        timing.proc_delay_ps = scenario.proc_delay_ps;
        MeasurementExchange ex =
            run_exchange(scenario.geometry, scenario.clock, scenario.ista, scenario.rsta,
                         derive_seed(seed, static_cast<uint64_t>(burst), static_cast<uint64_t>(e)),
                         timing);
        ex.tx_awv_id = scenario.best_awv_id;
        ex.rx_awv_id = scenario.best_awv_id;

        // Measurement report from the responder; carries its stamps, the
        // channel feedback and the AWV it perceived best.
        FtmFrame report;
        report.dialog_token = next_token;
        report.follow_up_token = static_cast<uint8_t>(next_token - 1);
        report.tod_ps = stamp_u64(ex.t3_ps);
        report.toa_ps = stamp_u64(ex.t2_ps);
        report.tod_error_ps = std::min<uint32_t>(ex.tod_error_ps, 0xFFFF);
        report.toa_error_ps = std::min<uint32_t>(ex.toa_error_ps, 0xFFFF);
        report.elements.push_back(cmf);
        report.elements.push_back(
            AwvFeedback{scenario.best_awv_id, 1.0f});
        FtmFrame received = wire.send(report, "RSTA->ISTA",
                                      "FTM measurement report #" + std::to_string(next_token));

        FtmFrame ack;
        ack.dialog_token = received.dialog_token;
        wire.send(ack, "ISTA->RSTA", "ACK #" + std::to_string(received.dialog_token));

        record_exchange(state, ex);
        if (e >= 1 && state.params.request_i2r_aod) {
          // The initiator works the departure angle out of the feedback and
          // best AWV the responder just reported.
          record_i2r_aod(state, AngleEstimate{first.aod_azimuth_deg, first.aod_elevation_deg,
                                              AngleSource::i2r_aod});
        }
        ++next_token;
      }
    }

    begin_aod_feedback(state);

    // The initiator hands over its best AWV setup so the responder can
    // estimate its own departure angle.
    FtmFrame awv_handoff;
    awv_handoff.dialog_token = next_token++;
    awv_handoff.elements.push_back(AwvFeedback{scenario.best_awv_id, 1.0f});
    wire.send(awv_handoff, "ISTA->RSTA", "best AWV handoff");

    AngleEstimate r2i{wrap_azimuth_deg(first.aoa_azimuth_deg + 180.0), -first.aoa_elevation_deg,
                      AngleSource::r2i_aod};

    FtmFrame final_frame;
    final_frame.dialog_token = next_token;
    final_frame.follow_up_token = static_cast<uint8_t>(next_token - 1);
    if (state.params.request_i2r_aod) {
      final_frame.elements.push_back(AngleReport{AngleKind::i2r_aod,
                                                 to_centideg(first.aod_azimuth_deg),
                                                 to_centideg(first.aod_elevation_deg)});
    }
    if (state.params.request_r2i_aod) {
      final_frame.elements.push_back(AngleReport{
          AngleKind::r2i_aod, to_centideg(r2i.azimuth_deg), to_centideg(r2i.elevation_deg)});
    }
    if (scenario.los_likelihood_milli >= 0) {
      final_frame.elements.push_back(
          LosLikelihood{static_cast<uint16_t>(scenario.los_likelihood_milli)});
    }
    FtmFrame received = wire.send(final_frame, "RSTA->ISTA", "burst-end angle reports");

    if (state.params.request_r2i_aod) {
      for (const auto& el : received.elements) {
        if (const auto* angle = std::get_if<AngleReport>(&el)) {
          if (angle->kind == AngleKind::r2i_aod) record_r2i_aod(state, r2i);
        }
      }
    }
    complete_session(state);
  } catch (const Error& err) {
    fail_session(state, err.code() == Errc::integrity_failure ? FailReason::security_violation
                                                              : FailReason::rejected);
  }
  return state;
}

std::string dump_transcript(const SessionState& state) {
  std::ostringstream out;
  for (size_t i = 0; i < state.transcript.size(); ++i) {
    const auto& entry = state.transcript[i];
    out << "[" << i << "] " << entry.direction << " " << entry.summary << "\n";
    out << "    ppdu: " << to_hex(entry.ppdu) << "\n";
    EdmgPpdu ppdu = decode_ppdu(entry.ppdu);
    out << "    trn: units=" << ppdu.trn_config.num_units
        << " p=" << static_cast<int>(ppdu.trn_config.p_subfields)
        << " m=" << static_cast<int>(ppdu.trn_config.m_subfields) << " seq="
        << (ppdu.trn_subfield_sequences.front().kind == TrnSequenceKind::secure ? "secure"
                                                                                : "golay")
        << "\n";
    try {
      DecodedFtmFrame decoded = decode_ftm_frame(ppdu.mac_body);
      out << "    frame: token=" << static_cast<int>(decoded.frame.dialog_token)
          << " follow_up=" << static_cast<int>(decoded.frame.follow_up_token)
          << " tod=" << decoded.frame.tod_ps << " toa=" << decoded.frame.toa_ps
          << " elements=" << decoded.frame.elements.size() << "\n";
    } catch (const Error&) {
      out << "    frame: protected (" << ppdu.mac_body.size() << " bytes)\n";
    }
  }
  return out.str();
}

}  // namespace azpos
