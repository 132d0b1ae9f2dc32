#pragma once

#include <utility>
#include <vector>

#include "vcmd/patchmatch.hpp"
#include "vcmd/postproc.hpp"
#include "vcmd/zernike.hpp"

namespace vcmd {

struct PyramidConfig {
    int stride = 4;            // S; levels are 0, 1, 2
    int refine_iterations = 2; // propagation-only rounds at level 0
    int voi_margin = 5;        // frames added around each detected span
};

/// Keeps every S-th site along rows and columns, all frames. Feature
/// vectors are copied, never recomputed: they still describe patches at the
/// native resolution.
FeatureField downsample(const FeatureField& field, int S);

/// Each fine site inherits the offset of its nearest coarse site (ties
/// toward the lower site). Offsets are already in full-resolution target
/// coordinates and copy unchanged; cached distances are left stale for the
/// next matcher run to recompute.
OffsetField upsample_field(const OffsetField& coarse, int S, int fine_rows,
                           int fine_cols);

/// Nearest-site mask upsampling (block replication on the aligned grid).
MaskVolume upsample_mask(const MaskVolume& coarse, int S, int fine_rows,
                         int fine_cols);

/// Frame spans flagged for full-resolution refinement.
struct VolumeOfInterest {
    std::vector<std::pair<int, int>> spans; // inclusive frame ranges

    static VolumeOfInterest from_mask(const MaskVolume& mask, int margin,
                                      int total_frames);
    bool contains(int frame) const;
    std::vector<std::uint8_t> frame_flags(int frames) const;
    int frame_count(int frames) const;
};

} // namespace vcmd
