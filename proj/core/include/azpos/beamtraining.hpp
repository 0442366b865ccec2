// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "azpos/channel.hpp"
#include "azpos/frames.hpp"
#include "azpos/golay.hpp"

namespace azpos {

// AWV sweep schedule over the TRN field's M subfields: group g of
// awv_group_size consecutive subfields is transmitted with candidates[g].
struct SweepPlan {
  std::vector<AwvConfig> candidates;
  TrnConfig trn;
};

void validate_sweep_plan(const SweepPlan& plan);

// One simulated link. The transmitter sweeps its AWV; the receive setup stays
// fixed (pass a 1x1 rx array for quasi-omni reception).
struct SimLink {
  std::vector<ChannelTap> taps;
  ArrayConfig tx_array;
  ArrayConfig rx_array;
  AwvConfig rx_awv;
};

// Coherent average of the group's PDPs over the union of delay indices;
// indices missing from a PDP contribute zero. Combined per-tap SNR adds the
// integration gain over the PDPs that contain the tap.
Pdp combine_pdps(std::span<const Pdp> group);

// Index into pdp.taps of the main tap: the earliest tap whose power reaches
// half of the maximum, so the score follows the first path rather than the
// strongest one.
int main_tap_index(const Pdp& pdp);

// Main-tap power over one plus the summed power of taps within a 3-sample
// window around it. Rewards early, isolated, strong taps.
double pdp_quality(const Pdp& pdp);

struct BestAwvResult {
  AwvConfig awv;
  double quality = 0.0;
  Pdp combined_pdp;
};

// Measurement of a single sweep candidate: transmit the group's subfields,
// measure and combine the PDPs, score. Exposed so an exhaustive sweep can
// reproduce fpbt() measurement-for-measurement.
BestAwvResult evaluate_candidate(const SimLink& link, const SweepPlan& plan, int candidate_index,
                                 const GolaySequencePair& pair, double snr_db, uint64_t seed);

// First Path Beam Training: argmax-quality candidate, ties to the lowest
// awv_id. Deterministic given the seed.
BestAwvResult fpbt(const SimLink& link, const SweepPlan& plan, const GolaySequencePair& pair,
                   double snr_db, uint64_t seed);

struct LosLikelihoodReport {
  double p_main_copol = 0.0;     // main-tap amplitude, subfield P+1
  double p_main_crosspol = 0.0;  // main-tap amplitude, subfield P+2
  double likelihood = 0.0;       // in [0, 1]
};

// XPD/(1+XPD) with XPD the co/cross main-tap power ratio.
double likelihood_from_amplitudes(double p_main_copol, double p_main_crosspol);

// Polarization probe on the trained beam: subfield P+1 co-polarized, subfield
// P+2 cross-polarized. likelihood = XPD / (1 + XPD) with XPD the main-tap
// power ratio.
LosLikelihoodReport los_assessment(const SimLink& link, const AwvConfig& best_awv,
                                   const GolaySequencePair& pair, double snr_db, uint64_t seed);

inline bool classify_los(const LosLikelihoodReport& report) { return report.likelihood >= 0.5; }

}  // namespace azpos
