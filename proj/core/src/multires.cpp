#include "vcmd/multires.hpp"

#include <algorithm>

namespace vcmd {

namespace {

// Nearest coarse index for a fine index, ties toward the lower site.
inline int nearest_coarse(int fine, int S, int coarse_extent) {
    const int q = fine / S, rem = fine - q * S;
    const int k = 2 * rem <= S ? q : q + 1;
    return std::min(k, coarse_extent - 1);
}

} // namespace

FeatureField downsample(const FeatureField& field, int S) {
    if (S < 1) throw ConfigError("subsampling stride must be >= 1");
    FeatureField out;
    out.level = field.level + 1;
    out.grid_step = field.grid_step * S;
    out.frames = field.frames;
    out.rows = (field.rows + S - 1) / S;
    out.cols = (field.cols + S - 1) / S;
    out.feature_len = field.feature_len;
    out.vectors.resize(out.sites() * out.feature_len);
    out.valid.resize(out.sites());
    for (int t = 0; t < out.frames; ++t)
        for (int r = 0; r < out.rows; ++r)
            for (int c = 0; c < out.cols; ++c) {
                const std::size_t src = field.site_index(t, r * S, c * S);
                const std::size_t dst = out.site_index(t, r, c);
                out.valid[dst] = field.valid[src];
                std::copy_n(field.vectors.data() + src * field.feature_len,
                            field.feature_len,
                            out.vectors.data() + dst * out.feature_len);
            }
    return out;
}

OffsetField upsample_field(const OffsetField& coarse, int S, int fine_rows,
                           int fine_cols) {
    OffsetField fine;
    fine.level = coarse.level - 1;
    fine.frames = coarse.frames;
    fine.rows = fine_rows;
    fine.cols = fine_cols;
    fine.grid_step = coarse.grid_step / S;
    fine.offsets.resize(fine.sites());
    fine.dist.resize(fine.sites());
    fine.matchable.resize(fine.sites());
    for (int t = 0; t < fine.frames; ++t)
        for (int r = 0; r < fine_rows; ++r) {
            const int cr = nearest_coarse(r, S, coarse.rows);
            for (int c = 0; c < fine_cols; ++c) {
                const int cc = nearest_coarse(c, S, coarse.cols);
                const std::size_t src = coarse.site_index(t, cr, cc);
                const std::size_t dst = fine.site_index(t, r, c);
                fine.offsets[dst] = coarse.offsets[src];
                fine.matchable[dst] = coarse.matchable[src];
                fine.dist[dst] = kUnmatched; // stale; recomputed on next use
            }
        }
    return fine;
}

MaskVolume upsample_mask(const MaskVolume& coarse, int S, int fine_rows,
                         int fine_cols) {
    MaskVolume fine(coarse.frames, fine_rows, fine_cols);
    for (int t = 0; t < fine.frames; ++t)
        for (int r = 0; r < fine_rows; ++r) {
            const int cr = nearest_coarse(r, S, coarse.rows);
            for (int c = 0; c < fine_cols; ++c) {
                const int cc = nearest_coarse(c, S, coarse.cols);
                fine.at(t, r, c) = coarse.at(t, cr, cc);
            }
        }
    return fine;
}

VolumeOfInterest VolumeOfInterest::from_mask(const MaskVolume& mask, int margin,
                                             int total_frames) {
    std::vector<std::uint8_t> hit(mask.frames, 0);
    for (int t = 0; t < mask.frames; ++t) {
        const auto* base = mask.bits.data() + mask.index(t, 0, 0);
        const std::size_t n = static_cast<std::size_t>(mask.rows) * mask.cols;
        for (std::size_t i = 0; i < n; ++i)
            if (base[i]) {
                hit[t] = 1;
                break;
            }
    }
    VolumeOfInterest voi;
    int t = 0;
    while (t < mask.frames) {
        if (!hit[t]) {
            ++t;
            continue;
        }
        int end = t;
        while (end + 1 < mask.frames && hit[end + 1]) ++end;
        const int lo = std::max(0, t - margin);
        const int hi = std::min(total_frames - 1, end + margin);
        if (!voi.spans.empty() && lo <= voi.spans.back().second + 1)
            voi.spans.back().second = std::max(voi.spans.back().second, hi);
        else
            voi.spans.emplace_back(lo, hi);
        t = end + 1;
    }
    return voi;
}

bool VolumeOfInterest::contains(int frame) const {
    for (const auto& [lo, hi] : spans)
        if (frame >= lo && frame <= hi) return true;
    return false;
}

std::vector<std::uint8_t> VolumeOfInterest::frame_flags(int frames) const {
    std::vector<std::uint8_t> flags(frames, 0);
    for (const auto& [lo, hi] : spans)
        for (int t = std::max(0, lo); t <= std::min(frames - 1, hi); ++t)
            flags[t] = 1;
    return flags;
}

int VolumeOfInterest::frame_count(int frames) const {
    const auto flags = frame_flags(frames);
    int n = 0;
    for (auto f : flags) n += f;
    return n;
}

} // namespace vcmd
