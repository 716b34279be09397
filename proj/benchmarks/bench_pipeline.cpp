#include <benchmark/benchmark.h>

#include "gaitsense/extraction.hpp"
#include "gaitsense/frame_features.hpp"
#include "gaitsense/preprocess.hpp"
#include "gaitsense/synth.hpp"

namespace gs = gaitsense;

namespace {

const gs::TestRecording& sample_recording() {
    static const gs::TestRecording rec = [] {
        gs::GaitProfile p;
        p.asymmetry = 0.4;
        p.seed = 11;
        return gs::generate_recording(p, gs::Routine::Straight, 12.0).recording;
    }();
    return rec;
}

void BM_PreprocessFrame(benchmark::State& state) {
    const auto& sample = sample_recording().left.front();
    for (auto _ : state) benchmark::DoNotOptimize(gs::preprocess(sample));
}
BENCHMARK(BM_PreprocessFrame);

void BM_FrameFeatures(benchmark::State& state) {
    const auto frames = gs::preprocess(sample_recording().left);
    for (auto _ : state) benchmark::DoNotOptimize(gs::frame_features(frames));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}
BENCHMARK(BM_FrameFeatures)->Unit(benchmark::kMillisecond);

void BM_ExtractRecording(benchmark::State& state) {
    const auto& rec = sample_recording();
    for (auto _ : state) benchmark::DoNotOptimize(gs::extract_features(rec));
}
BENCHMARK(BM_ExtractRecording)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
