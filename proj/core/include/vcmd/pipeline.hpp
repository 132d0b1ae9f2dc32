#pragma once

#include <string>
#include <vector>

#include "vcmd/multires.hpp"
#include "vcmd/patchmatch.hpp"
#include "vcmd/postproc.hpp"
#include "vcmd/types.hpp"
#include "vcmd/zernike.hpp"

namespace vcmd {

/// Detector variants: single-level matching with 2D or flip-invariant 3D
/// features, and their multiresolution (fast) counterparts.
enum class Mode { Basic2D, Basic3D, Fast2D, Fast3D };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);
bool mode_is_fast(Mode mode);
bool mode_is_3d(Mode mode);

struct RunConfig {
    Mode mode = Mode::Basic2D;
    int threads = 1;
    std::uint64_t seed = 0;
    FeatureConfig features;
    MatchConfig match;
    DlfConfig postproc;
    PyramidConfig pyramid;

    /// Applies mode/threads/seed to the nested module configs.
    void finalize();
};

struct StageTiming {
    std::string name;
    double seconds = 0;
};

struct DetectionResult {
    MaskVolume map; // full-resolution detection map
    bool detected = false;
    std::int64_t pixel_count = 0;
    std::vector<StageTiming> timings;
    double featuring_s = 0, matching_s = 0, postproc_s = 0, total_s = 0;
    std::int64_t level1_pixel_count = 0; // fast modes only
    int voi_frames = 0;                  // fast modes only
    bool level0_skipped = false;         // fast modes: empty level-1 map
    MaskVolume level1_map;               // fast modes: detection map at level 1
    OffsetField nnf;                     // final field, kept when keep_nnf
};

/// Runs the configured detector on a video. keep_nnf retains the final
/// offset field in the result (for dumps and diagnostics).
DetectionResult detect(const Video& video, const RunConfig& cfg,
                       bool keep_nnf = false);

} // namespace vcmd
