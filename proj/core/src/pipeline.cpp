#include "vcmd/pipeline.hpp"

#include <chrono>

namespace vcmd {

namespace {

class StageClock {
public:
    explicit StageClock(DetectionResult& result) : result_(result) {}

    template <typename Fn>
    auto time(const std::string& name, char bucket, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(name, bucket, t0);
        } else {
            auto value = fn();
            record(name, bucket, t0);
            return value;
        }
    }

private:
    void record(const std::string& name, char bucket,
                std::chrono::steady_clock::time_point t0) {
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        result_.timings.push_back({name, s});
        switch (bucket) {
            case 'f': result_.featuring_s += s; break;
            case 'm': result_.matching_s += s; break;
            case 'p': result_.postproc_s += s; break;
            default: break;
        }
    }

    DetectionResult& result_;
};

} // namespace

std::string mode_name(Mode mode) {
    switch (mode) {
        case Mode::Basic2D: return "basic2d";
        case Mode::Basic3D: return "basic3d";
        case Mode::Fast2D: return "fast2d";
        case Mode::Fast3D: return "fast3d";
    }
    return "basic2d";
}

Mode mode_from_name(const std::string& name) {
    if (name == "basic2d") return Mode::Basic2D;
    if (name == "basic3d") return Mode::Basic3D;
    if (name == "fast2d") return Mode::Fast2D;
    if (name == "fast3d") return Mode::Fast3D;
    throw ConfigError("unknown mode \"" + name +
                      "\" (expected basic2d, basic3d, fast2d or fast3d)");
}

bool mode_is_fast(Mode mode) { return mode == Mode::Fast2D || mode == Mode::Fast3D; }
bool mode_is_3d(Mode mode) { return mode == Mode::Basic3D || mode == Mode::Fast3D; }

void RunConfig::finalize() {
    features.mode = mode_is_3d(mode) ? FeatureMode::ThreeD_FI : FeatureMode::TwoD;
    match.seed = seed;
    match.threads = threads;
    if (match.slabs <= 0) match.slabs = threads;
}

DetectionResult detect(const Video& video, const RunConfig& cfg_in, bool keep_nnf) {
    RunConfig cfg = cfg_in;
    cfg.finalize();

    DetectionResult result;
    StageClock clock(result);
    const auto t_start = std::chrono::steady_clock::now();

    const FeatureField f0 = clock.time("features_level0", 'f', [&] {
        return extract_field(video, cfg.features, cfg.threads);
    });

    OffsetField nnf;
    if (!mode_is_fast(cfg.mode)) {
        nnf = clock.time("match_level0", 'm', [&] {
            return run_patchmatch(f0, f0, cfg.match);
        });
        result.map = clock.time("postproc_level0", 'p', [&] {
            return postprocess(nnf, cfg.postproc, cfg.threads);
        });
    } else {
        const int S = cfg.pyramid.stride;
        const FeatureField f1 =
            clock.time("downsample_level1", 'f', [&] { return downsample(f0, S); });
        const FeatureField f2 =
            clock.time("downsample_level2", 'f', [&] { return downsample(f1, S); });

        const OffsetField nn2 = clock.time("match_level2", 'm', [&] {
            return run_patchmatch(f2, f0, cfg.match);
        });
        const OffsetField nn1_init = upsample_field(nn2, S, f1.rows, f1.cols);
        const OffsetField nn1 = clock.time("match_level1", 'm', [&] {
            return run_patchmatch(f1, f0, cfg.match, &nn1_init);
        });

        const DlfConfig dlf1 = cfg.postproc.scaled_for_grid(f1.grid_step);
        const MaskVolume m1 = clock.time("postproc_level1", 'p', [&] {
            return postprocess(nn1, dlf1, cfg.threads);
        });
        result.level1_pixel_count = m1.count_ones();
        result.level1_map = m1;

        if (result.level1_pixel_count == 0) {
            result.level0_skipped = true;
            result.map = MaskVolume(video.frames, video.rows, video.cols);
        } else {
            const VolumeOfInterest voi = VolumeOfInterest::from_mask(
                m1, cfg.pyramid.voi_margin, video.frames);
            result.voi_frames = voi.frame_count(video.frames);
            const auto frame_flags = voi.frame_flags(video.frames);

            OffsetField nn0_init = upsample_field(nn1, S, f0.rows, f0.cols);
            MatchConfig refine = cfg.match;
            refine.iterations = cfg.pyramid.refine_iterations;
            refine.random_search = false;
            nnf = clock.time("match_level0_voi", 'm', [&] {
                return run_patchmatch(f0, f0, refine, &nn0_init, &frame_flags);
            });
            result.map = clock.time("postproc_level0", 'p', [&] {
                return postprocess(nnf, cfg.postproc, cfg.threads);
            });
        }
    }

    const Decision decision = decide(result.map, cfg.postproc);
    result.detected = decision.detected;
    result.pixel_count = decision.pixel_count;
    result.total_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    if (keep_nnf) result.nnf = std::move(nnf);
    return result;
}

} // namespace vcmd
