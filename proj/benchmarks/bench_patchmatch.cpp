#include <benchmark/benchmark.h>

#include "vcmd/forgegen.hpp"
#include "vcmd/patchmatch.hpp"

namespace {

struct Setup {
    vcmd::FeatureField field;
    Setup() {
        const vcmd::Video video = vcmd::synth_texture(
            8, 120, 160, vcmd::TextureKind::GaussianBlurNoise, 3, 1.5);
        vcmd::FeatureConfig cfg;
        field = vcmd::extract_field(video, cfg, 2);
    }
};

void BM_patchmatch_run(benchmark::State& state) {
    static const Setup setup;
    vcmd::MatchConfig cfg;
    cfg.iterations = static_cast<int>(state.range(0));
    cfg.threads = cfg.slabs = static_cast<int>(state.range(1));
    cfg.seed = 7;
    for (auto _ : state) {
        auto nnf = vcmd::run_patchmatch(setup.field, setup.field, cfg);
        benchmark::DoNotOptimize(nnf.offsets.data());
    }
    state.SetItemsProcessed(state.iterations() * setup.field.sites());
}
BENCHMARK(BM_patchmatch_run)
    ->Args({8, 1})
    ->Args({8, 2})
    ->Args({2, 1})
    ->Unit(benchmark::kMillisecond);

void BM_single_pass(benchmark::State& state) {
    static const Setup setup;
    vcmd::MatchConfig cfg;
    cfg.seed = 9;
    auto field = vcmd::init_offsets(setup.field, setup.field, cfg);
    int it = 0;
    for (auto _ : state) {
        vcmd::propagate_pass(setup.field, setup.field, field, cfg,
                             it % 2 ? vcmd::ScanDirection::Backward
                                    : vcmd::ScanDirection::Forward,
                             it);
        ++it;
        benchmark::DoNotOptimize(field.dist.data());
    }
    state.SetItemsProcessed(state.iterations() * field.sites());
}
BENCHMARK(BM_single_pass)->Unit(benchmark::kMillisecond);

} // namespace
