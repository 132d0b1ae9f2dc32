#include "vcmd/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "vcmd/parallel.hpp"

namespace vcmd {

namespace {

// Nearest grid index for a full-resolution coordinate, ties toward the
// lower site (matches the upsampling rule).
inline int nearest_grid_index(int full, int step) {
    const int q = full >= 0 ? full / step : -((-full + step - 1) / step);
    const int rem = full - q * step;
    return 2 * rem <= step ? q : q + 1;
}

// Separable windowed sums of the per-frame planes used by the affine fit.
// Plane order: m, m*dr, m*dc, m*dt, m*dr*r, m*dc*r, m*dt*r, m*dr*c, m*dc*c,
// m*dt*c, m*dr^2, m*dc^2, m*dt^2, m*r, m*c, m*rr, m*rc, m*cc
// where m is the per-site matched indicator and (r,c) are grid coordinates.
constexpr int kPlanes = 18;

void frame_dlf(const OffsetField& field, const DlfConfig& cfg, int t,
               std::vector<double>& scratch, std::vector<double>& errors) {
    const int rows = field.rows, cols = field.cols, w = cfg.window_half;
    const std::size_t px = static_cast<std::size_t>(rows) * cols;
    scratch.assign(kPlanes * px * 2, 0.0);
    double* plane = scratch.data();             // raw values
    double* vert = scratch.data() + kPlanes * px; // row-window sums

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const std::size_t site = field.site_index(t, r, c);
            const std::size_t p = static_cast<std::size_t>(r) * cols + c;
            if (!field.matchable[site] || field.dist[site] == kUnmatched) continue;
            const Offset& d = field.offsets[site];
            const double v[3] = {double(d.dr), double(d.dc), double(d.dt)};
            plane[0 * px + p] = 1.0;
            for (int k = 0; k < 3; ++k) {
                plane[(1 + k) * px + p] = v[k];
                plane[(4 + k) * px + p] = v[k] * r;
                plane[(7 + k) * px + p] = v[k] * c;
                plane[(10 + k) * px + p] = v[k] * v[k];
            }
            plane[13 * px + p] = double(r);
            plane[14 * px + p] = double(c);
            plane[15 * px + p] = double(r) * r;
            plane[16 * px + p] = double(r) * c;
            plane[17 * px + p] = double(c) * c;
        }

    for (int k = 0; k < kPlanes; ++k) {
        const double* src = plane + static_cast<std::size_t>(k) * px;
        double* dst = vert + static_cast<std::size_t>(k) * px;
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) {
                const int r0 = std::max(0, r - w), r1 = std::min(rows - 1, r + w);
                double s = 0;
                for (int rr = r0; rr <= r1; ++rr)
                    s += src[static_cast<std::size_t>(rr) * cols + c];
                dst[static_cast<std::size_t>(r) * cols + c] = s;
            }
    }

    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int c0 = std::max(0, c - w), c1 = std::min(cols - 1, c + w);
            double s[kPlanes];
            for (int k = 0; k < kPlanes; ++k) {
                const double* vk = vert + static_cast<std::size_t>(k) * px +
                                   static_cast<std::size_t>(r) * cols;
                double acc = 0;
                for (int cc = c0; cc <= c1; ++cc) acc += vk[cc];
                s[k] = acc;
            }

            const std::size_t site = field.site_index(t, r, c);
            const double n = s[0];
            if (n < 6.0) {
                errors[site] = kUnmatched;
                continue;
            }
            // Shift moments to window-local coordinates around (r,c).
            const double a = double(r), b = double(c);
            const double sr = s[13] - a * n;
            const double sc = s[14] - b * n;
            const double srr = s[15] - 2 * a * s[13] + a * a * n;
            const double src_ = s[16] - b * s[13] - a * s[14] + a * b * n;
            const double scc = s[17] - 2 * b * s[14] + b * b * n;

            // Normal matrix for the basis {1, r, c} (symmetric 3x3).
            const double g00 = n, g01 = sr, g02 = sc;
            const double g11 = srr, g12 = src_, g22 = scc;
            const double det = g00 * (g11 * g22 - g12 * g12) -
                               g01 * (g01 * g22 - g12 * g02) +
                               g02 * (g01 * g12 - g11 * g02);
            const double scale = std::max({std::abs(g00), std::abs(g11),
                                           std::abs(g22), 1.0});
            if (std::abs(det) <= 1e-9 * scale * scale * scale) {
                errors[site] = kUnmatched;
                continue;
            }
            const double i00 = (g11 * g22 - g12 * g12) / det;
            const double i01 = (g02 * g12 - g01 * g22) / det;
            const double i02 = (g01 * g12 - g02 * g11) / det;
            const double i11 = (g00 * g22 - g02 * g02) / det;
            const double i12 = (g02 * g01 - g00 * g12) / det;
            const double i22 = (g00 * g11 - g01 * g01) / det;

            double rss = 0;
            for (int k = 0; k < 3; ++k) {
                const double h0 = s[1 + k];
                const double h1 = s[4 + k] - a * s[1 + k];
                const double h2 = s[7 + k] - b * s[1 + k];
                const double q = s[10 + k];
                const double b0 = i00 * h0 + i01 * h1 + i02 * h2;
                const double b1 = i01 * h0 + i11 * h1 + i12 * h2;
                const double b2 = i02 * h0 + i12 * h1 + i22 * h2;
                const double r_k = q - (b0 * h0 + b1 * h1 + b2 * h2);
                rss += std::max(0.0, r_k);
            }
            errors[site] = rss / n;
        }
}

} // namespace

std::vector<double> dlf_error(const OffsetField& field, const DlfConfig& cfg,
                              int threads) {
    std::vector<double> errors(field.sites(), kUnmatched);
    parallel_for(field.frames, threads, [&](std::int64_t tb, std::int64_t te) {
        std::vector<double> scratch;
        for (std::int64_t t = tb; t < te; ++t)
            frame_dlf(field, cfg, static_cast<int>(t), scratch, errors);
    });
    return errors;
}

MaskVolume preliminary_map(const std::vector<double>& errors,
                           const OffsetField& field, const DlfConfig& cfg) {
    MaskVolume map(field.frames, field.rows, field.cols);
    for (std::size_t i = 0; i < field.sites(); ++i)
        map.bits[i] = (field.matchable[i] && field.dist[i] != kUnmatched &&
                       errors[i] <= cfg.error_threshold)
                          ? 1
                          : 0;
    const RegionLabeling labeling = label_regions(map);
    for (std::size_t i = 0; i < map.bits.size(); ++i)
        if (map.bits[i] &&
            labeling.regions[labeling.label[i]].size < cfg.min_region_size)
            map.bits[i] = 0;
    return map;
}

RegionLabeling label_regions(const MaskVolume& mask, const OffsetField* field) {
    RegionLabeling out;
    out.label.assign(mask.size(), -1);
    std::deque<std::size_t> queue;
    const int dirs[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                            {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
    for (int t = 0; t < mask.frames; ++t)
        for (int r = 0; r < mask.rows; ++r)
            for (int c = 0; c < mask.cols; ++c) {
                const std::size_t start = mask.index(t, r, c);
                if (!mask.bits[start] || out.label[start] >= 0) continue;
                Region region;
                region.id = static_cast<std::int32_t>(out.regions.size());
                region.t0 = region.t1 = t;
                region.r0 = region.r1 = r;
                region.c0 = region.c1 = c;
                out.label[start] = region.id;
                queue.push_back(start);
                while (!queue.empty()) {
                    const std::size_t cur = queue.front();
                    queue.pop_front();
                    const int ct = static_cast<int>(cur / (std::size_t(mask.rows) * mask.cols));
                    const int cr = static_cast<int>((cur / mask.cols) % mask.rows);
                    const int cc = static_cast<int>(cur % mask.cols);
                    ++region.size;
                    region.t0 = std::min(region.t0, ct);
                    region.t1 = std::max(region.t1, ct);
                    region.r0 = std::min(region.r0, cr);
                    region.r1 = std::max(region.r1, cr);
                    region.c0 = std::min(region.c0, cc);
                    region.c1 = std::max(region.c1, cc);
                    if (field) {
                        const Offset& d = field->offsets[cur];
                        region.mean_dr += d.dr;
                        region.mean_dc += d.dc;
                        region.mean_dt += d.dt;
                    }
                    for (const auto& d : dirs) {
                        const int nt = ct + d[0], nr = cr + d[1], nc = cc + d[2];
                        if (!mask.in_bounds(nt, nr, nc)) continue;
                        const std::size_t ni = mask.index(nt, nr, nc);
                        if (!mask.bits[ni] || out.label[ni] >= 0) continue;
                        out.label[ni] = region.id;
                        queue.push_back(ni);
                    }
                }
                if (field && region.size > 0) {
                    region.mean_dr /= double(region.size);
                    region.mean_dc /= double(region.size);
                    region.mean_dt /= double(region.size);
                }
                out.regions.push_back(region);
            }
    return out;
}

MaskVolume consistency_filter(const MaskVolume& map, const OffsetField& field,
                              const DlfConfig& cfg) {
    if (map.frames != field.frames || map.rows != field.rows ||
        map.cols != field.cols)
        throw ConfigError("consistency filter: map/field dimensions differ");
    MaskVolume out = map;
    const RegionLabeling labeling = label_regions(map);
    std::vector<std::uint8_t> alive(labeling.regions.size(), 1);
    const int step = field.grid_step;

    // Per region, the target region ids its sites point into.
    std::vector<std::vector<std::int32_t>> site_of_region(labeling.regions.size());
    for (int t = 0; t < map.frames; ++t)
        for (int r = 0; r < map.rows; ++r)
            for (int c = 0; c < map.cols; ++c) {
                const std::size_t i = map.index(t, r, c);
                if (labeling.label[i] < 0) continue;
                const Offset& d = field.offsets[i];
                std::int32_t target_region = -1;
                if (field.matchable[i] && field.dist[i] != kUnmatched) {
                    const int tt = t + d.dt;
                    const int tr = nearest_grid_index(r * step + d.dr, step);
                    const int tc = nearest_grid_index(c * step + d.dc, step);
                    if (map.in_bounds(tt, tr, tc))
                        target_region = labeling.label[map.index(tt, tr, tc)];
                }
                site_of_region[labeling.label[i]].push_back(target_region);
            }

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t rid = 0; rid < labeling.regions.size(); ++rid) {
            if (!alive[rid]) continue;
            std::int64_t hits = 0;
            for (std::int32_t tgt : site_of_region[rid])
                if (tgt >= 0 && alive[tgt]) ++hits;
            const double frac =
                double(hits) / double(labeling.regions[rid].size);
            if (frac < cfg.keep_fraction) {
                alive[rid] = 0;
                changed = true;
            }
        }
    }

    for (std::size_t i = 0; i < out.bits.size(); ++i)
        if (labeling.label[i] >= 0 && !alive[labeling.label[i]])
            out.bits[i] = 0;
    return out;
}

Decision decide(const MaskVolume& map, const DlfConfig& cfg) {
    Decision d;
    d.pixel_count = map.count_ones();
    d.detected = d.pixel_count > cfg.t_detection;
    return d;
}

MaskVolume postprocess(const OffsetField& field, const DlfConfig& cfg,
                       int threads) {
    const auto errors = dlf_error(field, cfg, threads);
    const MaskVolume prelim = preliminary_map(errors, field, cfg);
    return consistency_filter(prelim, field, cfg);
}

} // namespace vcmd
