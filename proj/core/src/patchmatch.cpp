#include "vcmd/patchmatch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vcmd/parallel.hpp"
#include "vcmd/rng.hpp"

namespace vcmd {

namespace {

constexpr std::uint32_t kNnfMagic = 0x56434e46; // "VCNF"

// Contiguous source-site box owned by one worker during a pass.
struct Slab {
    int t0, t1, r0, r1, c0, c1; // half-open
};

// Partition along one axis: 0 = columns, 1 = rows, 2 = frames. The axis
// rotates every forward-backward iteration pair so offsets eventually
// propagate across all boundaries.
std::vector<Slab> make_slabs(const OffsetField& field, int count, int axis) {
    count = std::max(1, count);
    const int extent = axis == 0 ? field.cols : axis == 1 ? field.rows : field.frames;
    count = std::min(count, extent);
    std::vector<Slab> slabs;
    slabs.reserve(count);
    for (int k = 0; k < count; ++k) {
        const int b = static_cast<int>(std::int64_t(extent) * k / count);
        const int e = static_cast<int>(std::int64_t(extent) * (k + 1) / count);
        if (b >= e) continue;
        Slab s{0, field.frames, 0, field.rows, 0, field.cols};
        if (axis == 0) {
            s.c0 = b;
            s.c1 = e;
        } else if (axis == 1) {
            s.r0 = b;
            s.r1 = e;
        } else {
            s.t0 = b;
            s.t1 = e;
        }
        slabs.push_back(s);
    }
    return slabs;
}

struct SiteRef {
    int t, r, c;      // source grid coordinates
    int ft, fr, fc;   // full-resolution coordinates
};

inline bool admissible(const FeatureField& tgt, const SiteRef& s, const Offset& d,
                       double min_offset_sq) {
    const double n2 = double(d.dr) * d.dr + double(d.dc) * d.dc + double(d.dt) * d.dt;
    if (n2 < min_offset_sq) return false;
    const int tt = s.ft + d.dt, tr = s.fr + d.dr, tc = s.fc + d.dc;
    if (!tgt.in_bounds(tt, tr, tc)) return false;
    return tgt.is_valid(tt, tr, tc);
}

inline double target_distance(const FeatureField& src, const FeatureField& tgt,
                              const SiteRef& s, std::size_t src_site,
                              const Offset& d) {
    const float* a = src.vectors.data() + src_site * src.feature_len;
    const float* b = tgt.at(s.ft + d.dt, s.fr + d.dr, s.fc + d.dc);
    return feature_distance(a, b, src.feature_len);
}

// Visits slab sites in raster or reverse-raster order.
template <typename Fn>
void scan_slab(const Slab& s, ScanDirection dir, Fn&& fn) {
    if (dir == ScanDirection::Forward) {
        for (int t = s.t0; t < s.t1; ++t)
            for (int r = s.r0; r < s.r1; ++r)
                for (int c = s.c0; c < s.c1; ++c) fn(t, r, c);
    } else {
        for (int t = s.t1 - 1; t >= s.t0; --t)
            for (int r = s.r1 - 1; r >= s.r0; --r)
                for (int c = s.c1 - 1; c >= s.c0; --c) fn(t, r, c);
    }
}

// One scan over the slab. Every site first takes the argmin over its
// predictor set; when rng is given, the L random-search candidates follow
// immediately, so discoveries propagate within the same pass.
void sweep_slab(const FeatureField& src, const FeatureField& tgt,
                OffsetField& field, const MatchConfig& cfg,
                ScanDirection dir, const Slab& slab, Rng* rng) {
    const double min_sq = cfg.min_offset * cfg.min_offset;
    const int step = field.grid_step;
    const int sgn = dir == ScanDirection::Forward ? 1 : -1;

    // Neighbor steps (dt,dr,dc) for the row, column, diagonal, antidiagonal
    // and frame directions, on the side already visited by this scan.
    const std::array<std::array<int, 3>, 5> dirs = {{
        {0, 0, -sgn},    // row
        {0, -sgn, 0},    // column
        {0, -sgn, -sgn}, // diagonal
        {0, -sgn, sgn},  // antidiagonal
        {-sgn, 0, 0},    // frame
    }};

    const auto in_slab = [&slab](int t, int r, int c) {
        return t >= slab.t0 && t < slab.t1 && r >= slab.r0 && r < slab.r1 &&
               c >= slab.c0 && c < slab.c1;
    };

    scan_slab(slab, dir, [&](int t, int r, int c) {
        const std::size_t site = field.site_index(t, r, c);
        if (!field.matchable[site]) return;
        const SiteRef ref{t, r, c, t, r * step, c * step};

        Offset cand[11];
        int ncand = 0;
        cand[ncand++] = field.offsets[site]; // incumbent placeholder, skipped below
        for (const auto& d : dirs) {
            const int nt = t + d[0], nr = r + d[1], nc = c + d[2];
            if (!in_slab(nt, nr, nc)) continue;
            const std::size_t n1 = field.site_index(nt, nr, nc);
            if (field.dist[n1] == kUnmatched) continue;
            cand[ncand++] = field.offsets[n1];
        }
        for (const auto& d : dirs) {
            const int nt = t + d[0], nr = r + d[1], nc = c + d[2];
            const int mt = t + 2 * d[0], mr = r + 2 * d[1], mc = c + 2 * d[2];
            if (!in_slab(nt, nr, nc) || !in_slab(mt, mr, mc)) continue;
            const std::size_t n1 = field.site_index(nt, nr, nc);
            const std::size_t n2 = field.site_index(mt, mr, mc);
            if (field.dist[n1] == kUnmatched || field.dist[n2] == kUnmatched)
                continue;
            const Offset &a = field.offsets[n1], &b = field.offsets[n2];
            cand[ncand++] =
                Offset{2 * a.dr - b.dr, 2 * a.dc - b.dc, 2 * a.dt - b.dt};
        }

        double best = field.dist[site];
        Offset best_off = field.offsets[site];
        for (int k = 1; k < ncand; ++k) {
            const Offset& d = cand[k];
            bool dup = d == best_off;
            for (int j = 1; !dup && j < k; ++j) dup = d == cand[j];
            if (dup) continue;
            if (!admissible(tgt, ref, d, min_sq)) continue;
            const double dd = target_distance(src, tgt, ref, site, d);
            if (dd < best) {
                best = dd;
                best_off = d;
            }
        }
        field.dist[site] = best;
        field.offsets[site] = best_off;
    });
}

void random_search_slab(const FeatureField& src, const FeatureField& tgt,
                        OffsetField& field, const MatchConfig& cfg,
                        const Slab& slab, Rng rng) {
    const double min_sq = cfg.min_offset * cfg.min_offset;
    const int step = field.grid_step;
    scan_slab(slab, ScanDirection::Forward, [&](int t, int r, int c) {
        const std::size_t site = field.site_index(t, r, c);
        if (!field.matchable[site]) return;
        const SiteRef ref{t, r, c, t, r * step, c * step};
        for (int i = 1; i <= cfg.random_candidates; ++i) {
            const std::int64_t radius = std::int64_t{1} << (i - 1);
            std::int64_t jr, jc, jt;
            do {
                jr = rng.range(-radius, radius);
                jc = rng.range(-radius, radius);
                jt = rng.range(-radius, radius);
            } while (jr == 0 && jc == 0 && jt == 0);
            const Offset& cur = field.offsets[site];
            const Offset cand{static_cast<std::int32_t>(cur.dr + jr),
                              static_cast<std::int32_t>(cur.dc + jc),
                              static_cast<std::int32_t>(cur.dt + jt)};
            if (!admissible(tgt, ref, cand, min_sq)) continue;
            const double dd = target_distance(src, tgt, ref, site, cand);
            if (dd < field.dist[site]) {
                field.dist[site] = dd;
                field.offsets[site] = cand;
            }
        }
    });
}

void check_compatible(const FeatureField& src, const FeatureField& tgt) {
    if (tgt.grid_step != 1)
        throw ConfigError("match target must be a full-resolution field");
    if (src.feature_len != tgt.feature_len)
        throw ConfigError("source/target feature lengths differ");
    if (src.frames != tgt.frames)
        throw ConfigError("source/target frame counts differ");
}

// Recomputes cached distances of a warm-started field; inadmissible
// inherited offsets become kUnmatched so propagation can refill them.
void revalidate(const FeatureField& src, const FeatureField& tgt,
                OffsetField& field, const MatchConfig& cfg, int threads) {
    const double min_sq = cfg.min_offset * cfg.min_offset;
    const int step = field.grid_step;
    parallel_for(field.frames, threads, [&](std::int64_t tb, std::int64_t te) {
        for (int t = static_cast<int>(tb); t < te; ++t)
            for (int r = 0; r < field.rows; ++r)
                for (int c = 0; c < field.cols; ++c) {
                    const std::size_t site = field.site_index(t, r, c);
                    if (!field.matchable[site]) {
                        field.dist[site] = kUnmatched;
                        continue;
                    }
                    const SiteRef ref{t, r, c, t, r * step, c * step};
                    const Offset& d = field.offsets[site];
                    if (admissible(tgt, ref, d, min_sq))
                        field.dist[site] = target_distance(src, tgt, ref, site, d);
                    else
                        field.dist[site] = kUnmatched;
                }
    });
}

} // namespace

double feature_distance(const float* a, const float* b, int len) {
    double acc = 0.0;
    for (int i = 0; i < len; ++i) {
        const double d = double(a[i]) - double(b[i]);
        acc += d * d;
    }
    return acc;
}

OffsetField init_offsets(const FeatureField& src, const FeatureField& tgt,
                         const MatchConfig& cfg) {
    check_compatible(src, tgt);
    OffsetField field;
    field.level = src.level;
    field.frames = src.frames;
    field.rows = src.rows;
    field.cols = src.cols;
    field.grid_step = src.grid_step;
    field.offsets.assign(field.sites(), Offset{});
    field.dist.assign(field.sites(), kUnmatched);
    field.matchable.assign(field.sites(), 0);

    const double min_sq = cfg.min_offset * cfg.min_offset;
    const auto slabs = make_slabs(field, cfg.slabs, 0);
    parallel_jobs(static_cast<int>(slabs.size()), cfg.threads, [&](int k) {
        Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(k), 0x1817);
        scan_slab(slabs[k], ScanDirection::Forward, [&](int t, int r, int c) {
            const std::size_t site = field.site_index(t, r, c);
            if (!src.is_valid(t, r, c)) return;
            const SiteRef ref{t, r, c, t, r * field.grid_step, c * field.grid_step};
            // Rejection sampling stays uniform over the admissible set.
            for (int attempt = 0; attempt < 64; ++attempt) {
                const int tt = static_cast<int>(rng.bounded(tgt.frames));
                const int tr = static_cast<int>(rng.bounded(tgt.rows));
                const int tc = static_cast<int>(rng.bounded(tgt.cols));
                const Offset d{tr - ref.fr, tc - ref.fc, tt - ref.ft};
                if (!admissible(tgt, ref, d, min_sq)) continue;
                field.matchable[site] = 1;
                field.offsets[site] = d;
                field.dist[site] = target_distance(src, tgt, ref, site, d);
                break;
            }
            if (field.matchable[site]) return;
            // Rare: sampling failed; enumerate to settle admissibility.
            std::uint64_t admissible_count = 0;
            for (int tt = 0; tt < tgt.frames; ++tt)
                for (int tr = 0; tr < tgt.rows; ++tr)
                    for (int tc = 0; tc < tgt.cols; ++tc) {
                        const Offset d{tr - ref.fr, tc - ref.fc, tt - ref.ft};
                        if (admissible(tgt, ref, d, min_sq)) ++admissible_count;
                    }
            if (admissible_count == 0) return; // stays unmatchable
            std::uint64_t pick = rng.bounded(admissible_count);
            for (int tt = 0; tt < tgt.frames && !field.matchable[site]; ++tt)
                for (int tr = 0; tr < tgt.rows && !field.matchable[site]; ++tr)
                    for (int tc = 0; tc < tgt.cols; ++tc) {
                        const Offset d{tr - ref.fr, tc - ref.fc, tt - ref.ft};
                        if (!admissible(tgt, ref, d, min_sq)) continue;
                        if (pick-- == 0) {
                            field.matchable[site] = 1;
                            field.offsets[site] = d;
                            field.dist[site] =
                                target_distance(src, tgt, ref, site, d);
                            break;
                        }
                    }
        });
    });
    return field;
}

std::vector<Offset> predictor_set(const OffsetField& field, int t, int r, int c,
                                  ScanDirection dir) {
    const int sgn = dir == ScanDirection::Forward ? 1 : -1;
    const std::array<std::array<int, 3>, 5> dirs = {{
        {0, 0, -sgn}, {0, -sgn, 0}, {0, -sgn, -sgn}, {0, -sgn, sgn}, {-sgn, 0, 0}}};
    std::vector<Offset> out;
    const std::size_t site = field.site_index(t, r, c);
    if (field.dist[site] != kUnmatched) out.push_back(field.offsets[site]);
    for (const auto& d : dirs) {
        const int nt = t + d[0], nr = r + d[1], nc = c + d[2];
        if (!field.in_bounds(nt, nr, nc)) continue;
        const std::size_t n1 = field.site_index(nt, nr, nc);
        if (field.dist[n1] == kUnmatched) continue;
        out.push_back(field.offsets[n1]);
    }
    for (const auto& d : dirs) {
        const int nt = t + d[0], nr = r + d[1], nc = c + d[2];
        const int mt = t + 2 * d[0], mr = r + 2 * d[1], mc = c + 2 * d[2];
        if (!field.in_bounds(nt, nr, nc) || !field.in_bounds(mt, mr, mc)) continue;
        const std::size_t n1 = field.site_index(nt, nr, nc);
        const std::size_t n2 = field.site_index(mt, mr, mc);
        if (field.dist[n1] == kUnmatched || field.dist[n2] == kUnmatched) continue;
        const Offset &a = field.offsets[n1], &b = field.offsets[n2];
        out.push_back(Offset{2 * a.dr - b.dr, 2 * a.dc - b.dc, 2 * a.dt - b.dt});
    }
    return out;
}

void propagate_pass(const FeatureField& src, const FeatureField& tgt,
                    OffsetField& field, const MatchConfig& cfg,
                    ScanDirection dir, int iteration) {
    const auto slabs = make_slabs(field, cfg.slabs, (iteration / 2) % 3);
    parallel_jobs(static_cast<int>(slabs.size()), cfg.threads, [&](int k) {
        propagate_slab(src, tgt, field, cfg, dir, slabs[k]);
    });
}

void random_search_pass(const FeatureField& src, const FeatureField& tgt,
                        OffsetField& field, const MatchConfig& cfg,
                        int iteration) {
    const auto slabs = make_slabs(field, cfg.slabs, (iteration / 2) % 3);
    parallel_jobs(static_cast<int>(slabs.size()), cfg.threads, [&](int k) {
        random_search_slab(src, tgt, field, cfg, slabs[k],
                           Rng::derive(cfg.seed, static_cast<std::uint64_t>(k),
                                       static_cast<std::uint64_t>(iteration) + 1));
    });
}

OffsetField run_patchmatch(const FeatureField& src, const FeatureField& tgt,
                           const MatchConfig& cfg, const OffsetField* initial,
                           const std::vector<std::uint8_t>* frame_filter) {
    check_compatible(src, tgt);
    OffsetField field;
    if (initial) {
        field = *initial;
        if (field.frames != src.frames || field.rows != src.rows ||
            field.cols != src.cols)
            throw ConfigError("warm-start field dimensions do not match source");
        for (int t = 0; t < field.frames; ++t)
            for (int r = 0; r < field.rows; ++r)
                for (int c = 0; c < field.cols; ++c) {
                    const std::size_t site = field.site_index(t, r, c);
                    if (!src.is_valid(t, r, c)) field.matchable[site] = 0;
                }
        if (frame_filter)
            for (int t = 0; t < field.frames; ++t)
                if (!(*frame_filter)[t]) {
                    const std::size_t base = field.site_index(t, 0, 0);
                    std::fill_n(field.matchable.begin() + base,
                                static_cast<std::size_t>(field.rows) * field.cols,
                                std::uint8_t{0});
                }
        revalidate(src, tgt, field, cfg, cfg.threads);
    } else {
        if (frame_filter) {
            FeatureField masked = src;
            for (int t = 0; t < src.frames; ++t)
                if (!(*frame_filter)[t]) {
                    const std::size_t base = masked.site_index(t, 0, 0);
                    std::fill_n(masked.valid.begin() + base,
                                static_cast<std::size_t>(src.rows) * src.cols,
                                std::uint8_t{0});
                }
            field = init_offsets(masked, tgt, cfg);
        } else {
            field = init_offsets(src, tgt, cfg);
        }
    }

    for (int it = 0; it < cfg.iterations; ++it) {
        const ScanDirection dir =
            it % 2 == 0 ? ScanDirection::Forward : ScanDirection::Backward;
        propagate_pass(src, tgt, field, cfg, dir, it);
        if (cfg.random_search) random_search_pass(src, tgt, field, cfg, it);
    }
    return field;
}

void save_offset_field(const OffsetField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write offset field: " + path.string());
    const std::uint32_t header[5] = {kNnfMagic,
                                     static_cast<std::uint32_t>(field.level),
                                     static_cast<std::uint32_t>(field.frames),
                                     static_cast<std::uint32_t>(field.rows),
                                     static_cast<std::uint32_t>(field.cols)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (std::size_t i = 0; i < field.sites(); ++i) {
        const std::int32_t trip[3] = {field.offsets[i].dr, field.offsets[i].dc,
                                      field.offsets[i].dt};
        const float d = static_cast<float>(field.dist[i]);
        out.write(reinterpret_cast<const char*>(trip), sizeof(trip));
        out.write(reinterpret_cast<const char*>(&d), sizeof(d));
    }
    if (!out) throw IoError("short write: " + path.string());
}

OffsetField load_offset_field(const std::filesystem::path& path, int stride) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read offset field: " + path.string());
    std::uint32_t header[5];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || header[0] != kNnfMagic)
        throw IoError("not an offset field dump: " + path.string());
    OffsetField field;
    field.level = static_cast<int>(header[1]);
    field.frames = static_cast<int>(header[2]);
    field.rows = static_cast<int>(header[3]);
    field.cols = static_cast<int>(header[4]);
    field.grid_step = 1;
    for (int l = 0; l < field.level; ++l) field.grid_step *= stride;
    field.offsets.resize(field.sites());
    field.dist.resize(field.sites());
    field.matchable.resize(field.sites());
    for (std::size_t i = 0; i < field.sites(); ++i) {
        std::int32_t trip[3];
        float d;
        in.read(reinterpret_cast<char*>(trip), sizeof(trip));
        in.read(reinterpret_cast<char*>(&d), sizeof(d));
        field.offsets[i] = Offset{trip[0], trip[1], trip[2]};
        field.dist[i] = d;
        field.matchable[i] = std::isfinite(d) ? 1 : 0;
    }
    if (!in) throw IoError("truncated offset field dump: " + path.string());
    return field;
}

} // namespace vcmd
