// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace azpos {

// Complementary pair of +/-1 sequences. The defining property is that the
// aperiodic autocorrelations of ga and gb sum to 2N at lag 0 and to 0 at every
// other lag, which makes the correlate-and-sum channel estimate exact.
struct GolaySequencePair {
  std::vector<int> ga;
  std::vector<int> gb;

  int length() const { return static_cast<int>(ga.size()); }
};

// Recursive doubling construction: Ga_{2n} = Ga_n || Gb_n, Gb_{2n} = Ga_n || -Gb_n.
GolaySequencePair golay_pair(size_t n);

// Sum of the two aperiodic autocorrelations over lags -(N-1)..(N-1).
// Exact integer arithmetic; length 2N-1 with the zero lag at index N-1.
std::vector<long long> complementary_sum(const GolaySequencePair& pair);

struct CirTap {
  int delay_sample_index = 0;
  std::complex<double> gain;
};

struct Cir {
  std::vector<CirTap> taps;
  int length_samples = 0;
};

struct CirThreshold {
  double relative = 0.05;   // keep taps >= relative * strongest
  double noise_mult = 4.0;  // and >= noise_mult * median(|correlator output|)
};

// Raw correlate-and-sum profile, normalized by 2N. Index d is the channel
// delay in samples; the profile has rx.size() - N + 1 entries.
std::vector<std::complex<double>> correlate_and_sum(std::span<const std::complex<double>> rx_ga,
                                                    std::span<const std::complex<double>> rx_gb,
                                                    const GolaySequencePair& pair);

// Channel estimate from the received ga/gb sequences (each the transmitted
// sequence convolved with the channel, plus noise). Taps below the detection
// threshold are dropped.
Cir estimate_cir(std::span<const std::complex<double>> rx_ga,
                 std::span<const std::complex<double>> rx_gb, const GolaySequencePair& pair,
                 const CirThreshold& threshold = {});

}  // namespace azpos
