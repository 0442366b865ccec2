// SPDX-License-Identifier: Apache-2.0
#include "azpos/golay.hpp"

#include <algorithm>
#include <cmath>

#include "azpos/errors.hpp"

namespace azpos {

GolaySequencePair golay_pair(size_t n) {
  if (n < 2 || (n & (n - 1)) != 0) {
    raise(Errc::not_power_of_two, "length " + std::to_string(n));
  }
  std::vector<int> ga{1};
  std::vector<int> gb{1};
  while (ga.size() < n) {
    std::vector<int> next_a(ga);
    next_a.insert(next_a.end(), gb.begin(), gb.end());
    std::vector<int> next_b(ga);
    for (int v : gb) next_b.push_back(-v);
    ga = std::move(next_a);
    gb = std::move(next_b);
  }
  return {std::move(ga), std::move(gb)};
}

namespace {

// Aperiodic autocorrelation at non-negative lags; lag range 0..N-1.
std::vector<long long> autocorr(const std::vector<int>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<long long> r(n, 0);
  for (int lag = 0; lag < n; ++lag) {
    long long acc = 0;
    for (int k = 0; k + lag < n; ++k) acc += static_cast<long long>(x[k]) * x[k + lag];
    r[lag] = acc;
  }
  return r;
}

}  // namespace

std::vector<long long> complementary_sum(const GolaySequencePair& pair) {
  const int n = pair.length();
  auto ra = autocorr(pair.ga);
  auto rb = autocorr(pair.gb);
  std::vector<long long> out(2 * n - 1, 0);
  for (int lag = 0; lag < n; ++lag) {
    long long v = ra[lag] + rb[lag];
    out[n - 1 + lag] = v;
    out[n - 1 - lag] = v;  // autocorrelation of a real sequence is even
  }
  return out;
}

std::vector<std::complex<double>> correlate_and_sum(std::span<const std::complex<double>> rx_ga,
                                                    std::span<const std::complex<double>> rx_gb,
                                                    const GolaySequencePair& pair) {
  if (rx_ga.size() != rx_gb.size()) {
    raise(Errc::length_mismatch, "rx_ga has " + std::to_string(rx_ga.size()) + " samples, rx_gb " +
                                     std::to_string(rx_gb.size()));
  }
  const size_t n = static_cast<size_t>(pair.length());
  if (rx_ga.size() < n) {
    raise(Errc::length_mismatch, "rx shorter than the sequence length");
  }
  const size_t lags = rx_ga.size() - n + 1;
  std::vector<std::complex<double>> profile(lags);
  const double norm = 1.0 / (2.0 * static_cast<double>(n));
  for (size_t d = 0; d < lags; ++d) {
    std::complex<double> acc{0.0, 0.0};
    for (size_t k = 0; k < n; ++k) {
      acc += static_cast<double>(pair.ga[k]) * rx_ga[d + k];
      acc += static_cast<double>(pair.gb[k]) * rx_gb[d + k];
    }
    profile[d] = acc * norm;
  }
  return profile;
}

Cir estimate_cir(std::span<const std::complex<double>> rx_ga,
                 std::span<const std::complex<double>> rx_gb, const GolaySequencePair& pair,
                 const CirThreshold& threshold) {
  auto profile = correlate_and_sum(rx_ga, rx_gb, pair);

  std::vector<double> mags(profile.size());
  for (size_t i = 0; i < profile.size(); ++i) mags[i] = std::abs(profile[i]);

  double peak = *std::max_element(mags.begin(), mags.end());
  std::vector<double> sorted(mags);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  double noise_floor = sorted[sorted.size() / 2];

  Cir cir;
  cir.length_samples = static_cast<int>(profile.size());
  if (peak <= 0.0) return cir;
  for (size_t d = 0; d < profile.size(); ++d) {
    if (mags[d] >= threshold.relative * peak && mags[d] >= threshold.noise_mult * noise_floor) {
      cir.taps.push_back({static_cast<int>(d), profile[d]});
    }
  }
  return cir;
}

}  // namespace azpos
