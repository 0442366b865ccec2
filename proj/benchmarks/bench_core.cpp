// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "azpos/beamtraining.hpp"
#include "azpos/channel.hpp"
#include "azpos/frames.hpp"
#include "azpos/golay.hpp"
#include "azpos/scenario.hpp"
#include "azpos/secure.hpp"

namespace {

using namespace azpos;

std::vector<std::complex<double>> to_complex(const std::vector<int>& seq) {
  std::vector<std::complex<double>> out(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) out[i] = {static_cast<double>(seq[i]), 0.0};
  return out;
}

void BM_GolayPair(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(golay_pair(static_cast<size_t>(state.range(0))));
  }
}
BENCHMARK(BM_GolayPair)->Arg(128)->Arg(1024);

void BM_EstimateCir(benchmark::State& state) {
  auto pair = golay_pair(static_cast<size_t>(state.range(0)));
  Geometry g;
  g.room = {10.0, 5.0, 3.0};
  g.sta_positions["a"] = {1.0, 1.0, 1.0};
  g.sta_positions["b"] = {8.0, 2.0, 1.0};
  auto taps = compute_paths(g, "a", "b");
  RadioEnd end{ArrayConfig{1, 1, 0.5, 60.48, 2.16}, AwvConfig{0, 0, 0}, Polarization::vertical};
  auto rx_a = propagate(to_complex(pair.ga), taps, end, end, 20.0, 1);
  auto rx_b = propagate(to_complex(pair.gb), taps, end, end, 20.0, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_cir(rx_a, rx_b, pair));
  }
}
BENCHMARK(BM_EstimateCir)->Arg(128)->Arg(256);

void BM_Propagate(benchmark::State& state) {
  auto pair = golay_pair(128);
  auto seq = to_complex(pair.ga);
  Geometry g;
  g.room = {10.0, 5.0, 3.0};
  g.sta_positions["a"] = {1.0, 1.0, 1.0};
  g.sta_positions["b"] = {8.0, 2.0, 1.0};
  auto taps = compute_paths(g, "a", "b");
  RadioEnd tx{ArrayConfig{6, 6, 0.5, 60.48, 2.16}, AwvConfig{0, 10.0, 0.0},
              Polarization::vertical};
  RadioEnd rx{ArrayConfig{1, 1, 0.5, 60.48, 2.16}, AwvConfig{0, 0, 0}, Polarization::vertical};
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(seq, taps, tx, rx, 20.0, seed++));
  }
}
BENCHMARK(BM_Propagate);

void BM_FpbtSweep(benchmark::State& state) {
  ScenarioConfig config = default_fig4_scenario();
  auto taps = compute_paths(config.geometry, "ista", "los_4m", config.reflection);
  SimLink link{taps, config.array, ArrayConfig{1, 1, 0.5, 60.48, 2.16}, AwvConfig{0, 0, 0}};
  SweepPlan plan;
  plan.trn = TrnConfig{36, 1, 2, 2};
  for (int i = 0; i < 36; ++i) plan.candidates.push_back(AwvConfig{i, -180.0 + 10.0 * i, 0.0});
  auto pair = golay_pair(128);
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fpbt(link, plan, pair, 30.0, seed++));
  }
}
BENCHMARK(BM_FpbtSweep);

void BM_FrameCodec(benchmark::State& state) {
  FtmFrame f;
  f.dialog_token = 3;
  f.tod_ps = 110000;
  f.toa_ps = 10000;
  ChannelMeasurementFeedback cmf;
  for (uint16_t t = 0; t < 8; ++t) cmf.taps.push_back({static_cast<uint16_t>(t * 3), 0.5f, 0.1f, 40.0f});
  f.elements.push_back(cmf);
  f.elements.push_back(AngleReport{AngleKind::i2r_aod, 4500, 0});
  for (auto _ : state) {
    Bytes bytes = encode_ftm_frame(f);
    benchmark::DoNotOptimize(decode_ftm_frame(bytes));
  }
}
BENCHMARK(BM_FrameCodec);

void BM_PasnHandshake(benchmark::State& state) {
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        azpos::secure::pasn_handshake(seed, seed + 1, azpos::secure::PasnParams{}));
    seed += 2;
  }
}
BENCHMARK(BM_PasnHandshake);

}  // namespace

BENCHMARK_MAIN();
