// Copyright 2026 The VTLayout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <algorithm>

#include "vtlayout/common/rng.hpp"
#include "vtlayout/corpus/geometry.hpp"
#include "vtlayout/corpus/synth.hpp"
#include "vtlayout/dvfe/backbone.hpp"
#include "vtlayout/dvfe/deep.hpp"
#include "vtlayout/dvfe/preprocess.hpp"
#include "vtlayout/evaluation/metrics.hpp"
#include "vtlayout/fusion/model.hpp"
#include "vtlayout/svfe/shallow.hpp"
#include "vtlayout/tfe/tfidf.hpp"
#include "vtlayout/tfe/upscale.hpp"

namespace vtlayout {
namespace {

BlockCrop NoiseCrop(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  BlockCrop crop;
  crop.pixels = Image(w, h, 3);
  for (auto& v : crop.pixels.data) v = static_cast<std::uint8_t>(rng.UniformInt(0, 255));
  return crop;
}

void BM_ShallowHistogram(benchmark::State& state) {
  const auto crop = NoiseCrop(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ExtractShallow(crop));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_ShallowHistogram)->Arg(64)->Arg(256)->Arg(1024);

void BM_PadResize(benchmark::State& state) {
  const auto crop = NoiseCrop(300, 100, 2);
  for (auto _ : state) benchmark::DoNotOptimize(PadResize(crop));
}
BENCHMARK(BM_PadResize);

void BM_TinyBackbone(benchmark::State& state) {
  auto bb = BuildTinyBackbone();
  InitializeBackbone(*bb, 1, false);
  const auto crop = NoiseCrop(200, 80, 3);
  for (auto _ : state) benchmark::DoNotOptimize(PooledEmbedding(crop, *bb));
}
BENCHMARK(BM_TinyBackbone)->Unit(benchmark::kMillisecond);

void BM_TinyBackboneTrainStep(benchmark::State& state) {
  auto bb = BuildTinyBackbone();
  InitializeBackbone(*bb, 1, false);
  const Tensor3 x = PadResize(NoiseCrop(200, 80, 3)).pixels;
  for (auto _ : state) {
    const auto trace = bb->ForwardTrace(x);
    Tensor3 grad(trace.back().h, trace.back().w, trace.back().c);
    std::fill(grad.data.begin(), grad.data.end(), 1e-3);
    bb->Backward(trace, grad);
  }
}
BENCHMARK(BM_TinyBackboneTrainStep)->Unit(benchmark::kMillisecond);

void BM_ReferenceBackbone(benchmark::State& state) {
  auto bb = BuildReferenceBackbone();
  InitializeBackbone(*bb, 1, false);
  const auto crop = NoiseCrop(200, 80, 3);
  for (auto _ : state) benchmark::DoNotOptimize(PooledEmbedding(crop, *bb));
}
BENCHMARK(BM_ReferenceBackbone)->Unit(benchmark::kMillisecond);

void BM_TfidfTransform(benchmark::State& state) {
  SynthSpec spec;
  spec.pages = 40;
  const Corpus c = GenerateSyntheticCorpus(spec, 4);
  std::vector<std::string> docs;
  for (const auto& [id, t] : c.block_texts()) docs.push_back(t);
  const auto vocab = FitTfidf(docs);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(TransformTfidf(docs[i++ % docs.size()], vocab));
}
BENCHMARK(BM_TfidfTransform);

void BM_BicubicUpscale(benchmark::State& state) {
  const auto crop = NoiseCrop(120, 30, 5);
  for (auto _ : state) benchmark::DoNotOptimize(UpscaleImage(crop.pixels, 8));
}
BENCHMARK(BM_BicubicUpscale)->Unit(benchmark::kMillisecond);

void BM_FusionPredict(benchmark::State& state) {
  const int channels = 256, vocab = 4096;
  const auto model = FusionModel::Build(FullMask(), channels, vocab, 6);
  Rng rng(6);
  FeatureBundle b;
  b.deep.emplace(channels);
  for (double& v : *b.deep) v = rng.Uniform();
  b.shallow.emplace(kHistogramBins, 1.0 / kHistogramBins);
  TextFeature t;
  t.dim = vocab;
  for (int k = 0; k < 12; ++k) t.entries.push_back({k * 300, 0.28});
  b.text = t;
  for (auto _ : state) benchmark::DoNotOptimize(model.Predict(b));
}
BENCHMARK(BM_FusionPredict);

void BM_MatchPredictions(benchmark::State& state) {
  Rng rng(7);
  std::vector<BlockAnnotation> gts, preds;
  for (int i = 0; i < state.range(0); ++i) {
    BlockAnnotation a;
    a.id = i;
    a.bbox = {rng.Uniform(0, 400), rng.Uniform(0, 600), rng.Uniform(10, 80), rng.Uniform(10, 40)};
    gts.push_back(a);
    a.bbox.x += rng.Uniform(-3, 3);
    a.score = rng.Uniform();
    preds.push_back(a);
  }
  for (auto _ : state) benchmark::DoNotOptimize(MatchPredictions(preds, gts, 0.5));
}
BENCHMARK(BM_MatchPredictions)->Arg(10)->Arg(100);

void BM_Prf(benchmark::State& state) {
  Rng rng(8);
  ConfusionMatrix m;
  for (auto& row : m.counts)
    for (auto& v : row) v = rng.UniformInt(0, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(Prf(m));
}
BENCHMARK(BM_Prf);

}  // namespace
}  // namespace vtlayout
BENCHMARK_MAIN();
