#include <benchmark/benchmark.h>

#include "vcmd/postproc.hpp"
#include "vcmd/rng.hpp"

namespace {

vcmd::OffsetField random_field(int frames, int rows, int cols) {
    vcmd::OffsetField f;
    f.frames = frames;
    f.rows = rows;
    f.cols = cols;
    f.offsets.resize(f.sites());
    f.dist.assign(f.sites(), 1.0);
    f.matchable.assign(f.sites(), 1);
    vcmd::Rng rng(11);
    for (auto& d : f.offsets)
        d = vcmd::Offset{static_cast<std::int32_t>(rng.range(-40, 40)),
                         static_cast<std::int32_t>(rng.range(-40, 40)),
                         static_cast<std::int32_t>(rng.range(-3, 3))};
    return f;
}

void BM_dlf_error(benchmark::State& state) {
    const auto field = random_field(8, 240, 320);
    vcmd::DlfConfig cfg;
    for (auto _ : state) {
        auto errors = vcmd::dlf_error(field, cfg, 2);
        benchmark::DoNotOptimize(errors.data());
    }
    state.SetItemsProcessed(state.iterations() * field.sites());
}
BENCHMARK(BM_dlf_error)->Unit(benchmark::kMillisecond);

void BM_postprocess(benchmark::State& state) {
    const auto field = random_field(8, 240, 320);
    vcmd::DlfConfig cfg;
    for (auto _ : state) {
        auto map = vcmd::postprocess(field, cfg, 2);
        benchmark::DoNotOptimize(map.bits.data());
    }
    state.SetItemsProcessed(state.iterations() * field.sites());
}
BENCHMARK(BM_postprocess)->Unit(benchmark::kMillisecond);

} // namespace
