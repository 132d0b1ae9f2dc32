#include <benchmark/benchmark.h>

#include "vcmd/forgegen.hpp"
#include "vcmd/zernike.hpp"

namespace {

void BM_extract_field_2d(benchmark::State& state) {
    const int frames = static_cast<int>(state.range(0));
    const vcmd::Video video = vcmd::synth_texture(
        frames, 240, 320, vcmd::TextureKind::GaussianBlurNoise, 1, 1.5);
    vcmd::FeatureConfig cfg;
    for (auto _ : state) {
        auto field = vcmd::extract_field(video, cfg, 2);
        benchmark::DoNotOptimize(field.vectors.data());
    }
    state.SetItemsProcessed(state.iterations() * video.size());
}
BENCHMARK(BM_extract_field_2d)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_extract_field_3d(benchmark::State& state) {
    const vcmd::Video video = vcmd::synth_texture(
        static_cast<int>(state.range(0)), 240, 320,
        vcmd::TextureKind::GaussianBlurNoise, 1, 1.5);
    vcmd::FeatureConfig cfg;
    cfg.mode = vcmd::FeatureMode::ThreeD_FI;
    for (auto _ : state) {
        auto field = vcmd::extract_field(video, cfg, 2);
        benchmark::DoNotOptimize(field.vectors.data());
    }
    state.SetItemsProcessed(state.iterations() * video.size());
}
BENCHMARK(BM_extract_field_3d)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_single_site_moments(benchmark::State& state) {
    const vcmd::Video video = vcmd::synth_texture(
        1, 64, 64, vcmd::TextureKind::GaussianBlurNoise, 2, 1.5);
    for (auto _ : state) {
        auto m = vcmd::compute_moments(video, 0, 32, 32,
                                       vcmd::default_moments_2d(), 8);
        benchmark::DoNotOptimize(m.data());
    }
}
BENCHMARK(BM_single_site_moments);

} // namespace
