// Temporary calibration driver (not part of the build once removed).
#include <chrono>
#include <cstdio>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "vcmd/forgegen.hpp"
#include "vcmd/metrics.hpp"
#include "vcmd/patchmatch.hpp"
#include "vcmd/pipeline.hpp"

using namespace vcmd;

int main(int argc, char** argv) {
    const std::string what = argc > 1 ? argv[1] : "nnf";
    if (what == "nnf") {
        for (int iters : {8, 16, 32, 64}) {
            double tot_pm = 0, tot_opt = 0;
            for (int s = 0; s < 4; ++s) {
                const Video v = synth_texture(4, 48, 48,
                                              TextureKind::GaussianBlurNoise,
                                              100 + s, 2.0);
                FeatureConfig fc;
                const FeatureField f = extract_field(v, fc, 2);
                MatchConfig mc;
                mc.seed = s;
                mc.iterations = iters;
                const OffsetField field = run_patchmatch(f, f, mc);
                const auto opt = oracle::exhaustive_nnf(f, f, mc.min_offset);
                for (std::size_t i = 0; i < field.sites(); ++i)
                    if (field.dist[i] != kUnmatched) {
                        tot_pm += field.dist[i];
                        tot_opt += opt[i];
                    }
            }
            std::printf("iters %d ratio %.4f\n", iters, tot_pm / tot_opt);
        }
    } else if (what == "clone") {
        // criterion-2 scale
        const auto t0 = std::chrono::steady_clock::now();
        const Video pristine = synth_texture(
            60, 240, 320, TextureKind::GaussianBlurNoise, 7, 2.0);
        ForgerySpec spec;
        spec.source.center_r = 80;
        spec.source.center_c = 100;
        spec.source.radius = 30;
        spec.source.t_begin = 15;
        spec.source.t_end = 39;
        spec.dr = 60;
        spec.dc = 40;
        const ForgeryResult forged = apply_copy_move(pristine, spec);
        RunConfig cfg;
        cfg.mode = Mode::Basic2D;
        cfg.threads = 2;
        cfg.seed = 1;
        cfg.finalize();
        const DetectionResult res = detect(forged.forged, cfg);
        const Score s = score(res.map, forged.gt);
        const auto t1 = std::chrono::steady_clock::now();
        std::printf("basic2d detected=%d pixels=%lld F=%.4f tp=%lld fp=%lld fn=%lld wall=%.1fs\n",
                    res.detected, (long long)res.pixel_count, s.f_measure,
                    (long long)s.tp, (long long)s.fp, (long long)s.fn,
                    std::chrono::duration<double>(t1 - t0).count());
        std::printf("timings: feat=%.2f match=%.2f post=%.2f total=%.2f\n",
                    res.featuring_s, res.matching_s, res.postproc_s, res.total_s);

        RunConfig fcfg = cfg;
        fcfg.mode = Mode::Fast2D;
        fcfg.finalize();
        const DetectionResult fres = detect(forged.forged, fcfg);
        const Score fs = score(fres.map, forged.gt);
        std::printf("fast2d detected=%d pixels=%lld F=%.4f level1=%lld voi=%d\n",
                    fres.detected, (long long)fres.pixel_count, fs.f_measure,
                    (long long)fres.level1_pixel_count, fres.voi_frames);
        std::printf("timings: feat=%.2f match=%.2f post=%.2f total=%.2f\n",
                    fres.featuring_s, fres.matching_s, fres.postproc_s,
                    fres.total_s);
    }
    return 0;
}
