// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>
#include <vector>

#include "azpos/errors.hpp"
#include "azpos/golay.hpp"
#include "azpos/rng.hpp"
#include "doctest.h"

using namespace azpos;

namespace {

// Independent oracle: aperiodic autocorrelation over all lags, brute force.
std::vector<long long> autocorr_oracle(const std::vector<int>& x) {
  int n = static_cast<int>(x.size());
  std::vector<long long> r(2 * n - 1, 0);
  for (int lag = -(n - 1); lag <= n - 1; ++lag) {
    long long acc = 0;
    for (int k = 0; k < n; ++k) {
      int j = k + lag;
      if (j >= 0 && j < n) acc += static_cast<long long>(x[k]) * x[j];
    }
    r[lag + n - 1] = acc;
  }
  return r;
}

// Independent oracle: direct convolution of a sequence with a sparse channel.
std::vector<std::complex<double>> convolve_oracle(
    const std::vector<int>& seq, const std::vector<std::pair<int, std::complex<double>>>& taps) {
  int max_delay = 0;
  for (const auto& [d, g] : taps) max_delay = std::max(max_delay, d);
  std::vector<std::complex<double>> out(seq.size() + max_delay, {0.0, 0.0});
  for (const auto& [d, g] : taps) {
    for (size_t k = 0; k < seq.size(); ++k) out[k + d] += g * static_cast<double>(seq[k]);
  }
  return out;
}

}  // namespace

TEST_CASE("recursive doubling base case") {
  auto pair = golay_pair(2);
  CHECK(pair.ga == std::vector<int>{1, 1});
  CHECK(pair.gb == std::vector<int>{1, -1});
}

TEST_CASE("rejects non power of two lengths") {
  CHECK_THROWS_AS(golay_pair(0), Error);
  CHECK_THROWS_AS(golay_pair(3), Error);
  CHECK_THROWS_AS(golay_pair(96), Error);
  try {
    golay_pair(12);
  } catch (const Error& err) {
    CHECK(err.code() == Errc::not_power_of_two);
  }
}

TEST_CASE("complementary sum n=2 by hand") {
  auto pair = golay_pair(2);
  auto sum = complementary_sum(pair);
  CHECK(sum == std::vector<long long>{0, 4, 0});
  CHECK(autocorr_oracle(pair.ga) == std::vector<long long>{1, 2, 1});
  CHECK(autocorr_oracle(pair.gb) == std::vector<long long>{-1, 2, -1});
}

TEST_CASE("complementary sum n=8") {
  auto sum = complementary_sum(golay_pair(8));
  REQUIRE(sum.size() == 15);
  CHECK(sum[7] == 16);
  for (size_t i = 0; i < sum.size(); ++i) {
    if (i != 7) CHECK(sum[i] == 0);
  }
}

TEST_CASE("delta property against the brute-force oracle, n up to 256") {
  for (size_t n = 2; n <= 256; n *= 2) {
    auto pair = golay_pair(n);
    auto ra = autocorr_oracle(pair.ga);
    auto rb = autocorr_oracle(pair.gb);
    auto sum = complementary_sum(pair);
    REQUIRE(sum.size() == 2 * n - 1);
    for (size_t i = 0; i < sum.size(); ++i) {
      long long expected = ra[i] + rb[i];
      CHECK(sum[i] == expected);
      CHECK(sum[i] == (i == n - 1 ? 2 * static_cast<long long>(n) : 0));
    }
  }
}

TEST_CASE("non-complementary pair is not a delta") {
  GolaySequencePair fake{{1, 1}, {1, 1}};
  CHECK(complementary_sum(fake) == std::vector<long long>{2, 4, 2});
}

TEST_CASE("complementary sum is symmetric") {
  auto sum = complementary_sum(golay_pair(64));
  for (size_t i = 0; i < sum.size(); ++i) {
    CHECK(sum[i] == sum[sum.size() - 1 - i]);
  }
}

TEST_CASE("noiseless single tap recovered exactly") {
  auto pair = golay_pair(32);
  std::vector<std::pair<int, std::complex<double>>> channel{{0, {1.0, 0.0}}};
  auto rx_a = convolve_oracle(pair.ga, channel);
  auto rx_b = convolve_oracle(pair.gb, channel);
  Cir cir = estimate_cir(rx_a, rx_b, pair);
  REQUIRE(cir.taps.size() == 1);
  CHECK(cir.taps[0].delay_sample_index == 0);
  CHECK(std::abs(cir.taps[0].gain - std::complex<double>{1.0, 0.0}) <= 1e-12);
}

TEST_CASE("noiseless two-tap channel, n=64") {
  auto pair = golay_pair(64);
  std::vector<std::pair<int, std::complex<double>>> channel{{0, {1.0, 0.0}}, {3, {0.5, 0.5}}};
  auto rx_a = convolve_oracle(pair.ga, channel);
  auto rx_b = convolve_oracle(pair.gb, channel);
  Cir cir = estimate_cir(rx_a, rx_b, pair);
  REQUIRE(cir.taps.size() == 2);
  CHECK(cir.taps[0].delay_sample_index == 0);
  CHECK(cir.taps[1].delay_sample_index == 3);
  CHECK(std::abs(cir.taps[0].gain - channel[0].second) / std::abs(channel[0].second) < 1e-9);
  CHECK(std::abs(cir.taps[1].gain - channel[1].second) / std::abs(channel[1].second) < 1e-9);
}

TEST_CASE("length mismatch rejected") {
  auto pair = golay_pair(8);
  std::vector<std::complex<double>> a(10), b(11);
  CHECK_THROWS_AS(estimate_cir(a, b, pair), Error);
  std::vector<std::complex<double>> tiny(4), tiny2(4);
  CHECK_THROWS_AS(estimate_cir(tiny, tiny2, pair), Error);
}

TEST_CASE("random noiseless channels recovered exactly") {
  auto pair = golay_pair(128);
  SplitMix64 rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    int tap_count = 1 + static_cast<int>(rng.next_u64() % 5);
    std::vector<std::pair<int, std::complex<double>>> channel;
    int delay = static_cast<int>(rng.next_u64() % 4);
    for (int t = 0; t < tap_count; ++t) {
      double mag = rng.next_uniform(0.3, 1.0);
      double phase = rng.next_uniform(0.0, 6.28318);
      channel.push_back({delay, std::polar(mag, phase)});
      delay += 1 + static_cast<int>(rng.next_u64() % 6);
    }
    auto rx_a = convolve_oracle(pair.ga, channel);
    auto rx_b = convolve_oracle(pair.gb, channel);
    Cir cir = estimate_cir(rx_a, rx_b, pair);
    REQUIRE(cir.taps.size() == channel.size());
    for (size_t t = 0; t < channel.size(); ++t) {
      CHECK(cir.taps[t].delay_sample_index == channel[t].first);
      CHECK(std::abs(cir.taps[t].gain - channel[t].second) / std::abs(channel[t].second) < 1e-9);
    }
  }
}

TEST_CASE("estimation is linear in the channel") {
  auto pair = golay_pair(64);
  std::vector<std::pair<int, std::complex<double>>> ch1{{0, {0.8, 0.1}}, {4, {0.0, 0.4}}};
  std::vector<std::pair<int, std::complex<double>>> ch2{{2, {0.3, -0.2}}};
  auto add = [](const std::vector<std::complex<double>>& a,
                const std::vector<std::complex<double>>& b) {
    std::vector<std::complex<double>> out(std::max(a.size(), b.size()), {0.0, 0.0});
    for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
  };
  auto rx_a = add(convolve_oracle(pair.ga, ch1), convolve_oracle(pair.ga, ch2));
  auto rx_b = add(convolve_oracle(pair.gb, ch1), convolve_oracle(pair.gb, ch2));
  auto profile = correlate_and_sum(rx_a, rx_b, pair);
  CHECK(std::abs(profile[0] - std::complex<double>{0.8, 0.1}) < 1e-9);
  CHECK(std::abs(profile[2] - std::complex<double>{0.3, -0.2}) < 1e-9);
  CHECK(std::abs(profile[4] - std::complex<double>{0.0, 0.4}) < 1e-9);
}

TEST_CASE("all-zero input yields no taps") {
  auto pair = golay_pair(16);
  std::vector<std::complex<double>> zeros(24, {0.0, 0.0});
  CHECK(estimate_cir(zeros, zeros, pair).taps.empty());
}
