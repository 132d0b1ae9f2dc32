#pragma once

#include <cstdint>
#include <vector>

#include "vcmd/patchmatch.hpp"
#include "vcmd/types.hpp"

namespace vcmd {

struct DlfConfig {
    int window_half = 5;          // 11x11 spatial fit window per frame
    double error_threshold = 1.5; // squared-pixel residual bound
    int min_region_size = 1000;   // sites, at full resolution
    std::int64_t t_detection = 20000;
    double keep_fraction = 0.5;   // consistency-filter majority rule

    /// Thresholds for a subsampled grid: area-driven values divide by S^2.
    DlfConfig scaled_for_grid(int grid_step) const {
        DlfConfig c = *this;
        const std::int64_t s2 = std::int64_t(grid_step) * grid_step;
        c.min_region_size = static_cast<int>(std::max<std::int64_t>(1, min_region_size / s2));
        c.t_detection = std::max<std::int64_t>(1, t_detection / s2);
        return c;
    }
};

/// Per-site residual of a least-squares affine fit of the offset field over
/// the centered spatial window (truncated at borders): mean squared
/// residual over the window, summed over the three offset components.
/// Sites that cannot be fit (too few matched neighbors) get +infinity.
std::vector<double> dlf_error(const OffsetField& field, const DlfConfig& cfg,
                              int threads = 1);

/// Sites with error <= error_threshold and a match, minus 6-connected 3D
/// components smaller than min_region_size.
MaskVolume preliminary_map(const std::vector<double>& errors,
                           const OffsetField& field, const DlfConfig& cfg);

struct Region {
    std::int32_t id = 0;
    std::int64_t size = 0;
    int t0 = 0, t1 = 0, r0 = 0, r1 = 0, c0 = 0, c1 = 0; // inclusive bbox
    double mean_dr = 0, mean_dc = 0, mean_dt = 0;
};

/// Maximal 6-connected 3D components of the mask. label is -1 outside.
struct RegionLabeling {
    std::vector<std::int32_t> label;
    std::vector<Region> regions;
};

RegionLabeling label_regions(const MaskVolume& mask,
                             const OffsetField* field = nullptr);

/// Keeps each region only if at least keep_fraction of its sites match into
/// the map, iterated to fixpoint (removing a region can orphan another).
/// Offsets address full-resolution coordinates; on subsampled grids the
/// membership test maps targets to the nearest grid site.
MaskVolume consistency_filter(const MaskVolume& map, const OffsetField& field,
                              const DlfConfig& cfg);

struct Decision {
    bool detected = false;
    std::int64_t pixel_count = 0;
};

/// Forged iff the map carries strictly more than t_detection ones.
Decision decide(const MaskVolume& map, const DlfConfig& cfg);

/// dlf_error -> preliminary_map -> consistency_filter.
MaskVolume postprocess(const OffsetField& field, const DlfConfig& cfg,
                       int threads = 1);

} // namespace vcmd
