// SPDX-License-Identifier: Apache-2.0
#include "azpos/beamtraining.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "azpos/errors.hpp"
#include "azpos/rng.hpp"

namespace azpos {

namespace {

constexpr int kQualityWindow = 3;
constexpr double kXpdEpsilon = 1e-12;

std::vector<std::complex<double>> to_complex(const std::vector<int>& seq) {
  std::vector<std::complex<double>> out(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) out[i] = {static_cast<double>(seq[i]), 0.0};
  return out;
}

// One TRN subfield: ga and gb are sent back to back through the same channel
// with independent noise.
Pdp measure_subfield(const SimLink& link, const AwvConfig& tx_awv, Polarization tx_pol,
                     Polarization rx_pol, const GolaySequencePair& pair, double snr_db,
                     uint64_t seed) {
  RadioEnd tx{link.tx_array, tx_awv, tx_pol};
  RadioEnd rx{link.rx_array, link.rx_awv, rx_pol};
  auto ga = to_complex(pair.ga);
  auto gb = to_complex(pair.gb);
  auto rx_ga = propagate(ga, link.taps, tx, rx, snr_db, derive_seed(seed, 0xA));
  auto rx_gb = propagate(gb, link.taps, tx, rx, snr_db, derive_seed(seed, 0xB));
  double sigma = noise_sigma(link.taps, snr_db);
  return measure_pdp(rx_ga, rx_gb, pair, sigma);
}

}  // namespace

void validate_sweep_plan(const SweepPlan& plan) {
  validate_trn_config(plan.trn);
  if (plan.candidates.empty()) raise(Errc::invariant_violation, "sweep needs candidates");
  const long long capacity =
      static_cast<long long>(plan.trn.num_units) * plan.trn.m_subfields;
  const long long needed =
      static_cast<long long>(plan.candidates.size()) * plan.trn.awv_group_size;
  if (needed > capacity) {
    raise(Errc::invariant_violation, "sweep needs " + std::to_string(needed) +
                                         " M subfields, TRN field has " +
                                         std::to_string(capacity));
  }
}

Pdp combine_pdps(std::span<const Pdp> group) {
  if (group.empty()) raise(Errc::empty_group, "no PDPs to combine");

  struct Acc {
    double i = 0.0, q = 0.0;
    double snr_linear = 0.0;
  };
  std::map<int, Acc> by_delay;
  for (const auto& pdp : group) {
    for (const auto& tap : pdp.taps) {
      Acc& acc = by_delay[tap.delay_sample_index];
      acc.i += tap.i;
      acc.q += tap.q;
      acc.snr_linear += std::pow(10.0, tap.snr_db / 10.0);
    }
  }

  const double n = static_cast<double>(group.size());
  Pdp combined;
  combined.taps.reserve(by_delay.size());
  for (const auto& [delay, acc] : by_delay) {
    PdpTap tap;
    tap.delay_sample_index = delay;
    tap.i = acc.i / n;
    tap.q = acc.q / n;
    tap.snr_db = 10.0 * std::log10(std::max(acc.snr_linear, 1e-300));
    combined.taps.push_back(tap);
  }
  return combined;
}

int main_tap_index(const Pdp& pdp) {
  if (pdp.taps.empty()) raise(Errc::empty_pdp, "no taps");
  double max_power = 0.0;
  for (const auto& tap : pdp.taps) {
    max_power = std::max(max_power, tap.i * tap.i + tap.q * tap.q);
  }
  for (size_t k = 0; k < pdp.taps.size(); ++k) {
    double p = pdp.taps[k].i * pdp.taps[k].i + pdp.taps[k].q * pdp.taps[k].q;
    if (p >= 0.5 * max_power) return static_cast<int>(k);
  }
  return 0;
}

double pdp_quality(const Pdp& pdp) {
  const int main_idx = main_tap_index(pdp);
  const int main_delay = pdp.taps[main_idx].delay_sample_index;
  const double main_power =
      pdp.taps[main_idx].i * pdp.taps[main_idx].i + pdp.taps[main_idx].q * pdp.taps[main_idx].q;

  double neighbor_power = 0.0;
  for (const auto& tap : pdp.taps) {
    int gap = std::abs(tap.delay_sample_index - main_delay);
    if (gap > 0 && gap <= kQualityWindow) {
      neighbor_power += tap.i * tap.i + tap.q * tap.q;
    }
  }
  return main_power / (1.0 + neighbor_power);
}

BestAwvResult evaluate_candidate(const SimLink& link, const SweepPlan& plan, int candidate_index,
                                 const GolaySequencePair& pair, double snr_db, uint64_t seed) {
  const int group_size = plan.trn.awv_group_size;
  std::vector<Pdp> group;
  group.reserve(group_size);
  for (int s = 0; s < group_size; ++s) {
    uint64_t subfield_seed = derive_seed(seed, static_cast<uint64_t>(candidate_index),
                                         static_cast<uint64_t>(s));
    group.push_back(measure_subfield(link, plan.candidates[candidate_index],
                                     Polarization::vertical, Polarization::vertical, pair, snr_db,
                                     subfield_seed));
  }
  BestAwvResult result;
  result.awv = plan.candidates[candidate_index];
  result.combined_pdp = combine_pdps(group);
  result.quality = result.combined_pdp.taps.empty() ? 0.0 : pdp_quality(result.combined_pdp);
  return result;
}

BestAwvResult fpbt(const SimLink& link, const SweepPlan& plan, const GolaySequencePair& pair,
                   double snr_db, uint64_t seed) {
  validate_sweep_plan(plan);
  if (link.taps.empty()) raise(Errc::empty_channel, "no propagation paths");

  BestAwvResult best;
  bool have_best = false;
  for (size_t c = 0; c < plan.candidates.size(); ++c) {
    BestAwvResult r = evaluate_candidate(link, plan, static_cast<int>(c), pair, snr_db, seed);
    if (!have_best || r.quality > best.quality ||
        (r.quality == best.quality && r.awv.awv_id < best.awv.awv_id)) {
      best = std::move(r);
      have_best = true;
    }
  }
  return best;
}

double likelihood_from_amplitudes(double p_main_copol, double p_main_crosspol) {
  double xpd =
      (p_main_copol * p_main_copol) / (p_main_crosspol * p_main_crosspol + kXpdEpsilon);
  return xpd / (1.0 + xpd);
}

LosLikelihoodReport los_assessment(const SimLink& link, const AwvConfig& best_awv,
                                   const GolaySequencePair& pair, double snr_db, uint64_t seed) {
  // Subfield P+1: matched polarization. Subfield P+2: crossed polarization.
  Pdp co = measure_subfield(link, best_awv, Polarization::vertical, Polarization::vertical, pair,
                            snr_db, derive_seed(seed, 0x51));
  Pdp cross = measure_subfield(link, best_awv, Polarization::vertical, Polarization::horizontal,
                               pair, snr_db, derive_seed(seed, 0x52));

  auto main_amplitude = [](const Pdp& pdp) {
    double best = 0.0;
    for (const auto& tap : pdp.taps) {
      best = std::max(best, std::sqrt(tap.i * tap.i + tap.q * tap.q));
    }
    return best;
  };

  LosLikelihoodReport report;
  report.p_main_copol = main_amplitude(co);
  report.p_main_crosspol = main_amplitude(cross);
  report.likelihood = likelihood_from_amplitudes(report.p_main_copol, report.p_main_crosspol);
  return report;
}

}  // namespace azpos
