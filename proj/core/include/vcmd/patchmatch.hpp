#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "vcmd/zernike.hpp"

namespace vcmd {

/// Displacement to the matched site, always expressed in full-resolution
/// target coordinates regardless of the source grid level.
struct Offset {
    std::int32_t dr = 0;
    std::int32_t dc = 0;
    std::int32_t dt = 0;
    bool operator==(const Offset&) const = default;

    double norm() const {
        return std::sqrt(double(dr) * dr + double(dc) * dc + double(dt) * dt);
    }
};

constexpr double kUnmatched = std::numeric_limits<double>::infinity();

/// Offset field over a source site grid. dist caches the squared feature
/// distance of the stored offset; kUnmatched marks sites with no admissible
/// match (or warm-started sites whose inherited offset was inadmissible).
struct OffsetField {
    int level = 0;
    int frames = 0;
    int rows = 0;
    int cols = 0;
    int grid_step = 1;
    std::vector<Offset> offsets;
    std::vector<double> dist;
    std::vector<std::uint8_t> matchable;

    std::size_t sites() const {
        return static_cast<std::size_t>(frames) * rows * cols;
    }
    std::size_t site_index(int t, int r, int c) const {
        return (static_cast<std::size_t>(t) * rows + r) * cols + c;
    }
    bool in_bounds(int t, int r, int c) const {
        return t >= 0 && t < frames && r >= 0 && r < rows && c >= 0 && c < cols;
    }
    double total_distance() const {
        double s = 0;
        for (double d : dist)
            if (d != kUnmatched) s += d;
        return s;
    }
};

struct MatchConfig {
    int iterations = 8;         // propagation + random-search rounds
    int random_candidates = 10; // L; candidate i samples a cube of radius 2^(i-1)
    double min_offset = 16.0;   // spatio-temporal Euclidean lower bound
    std::uint64_t seed = 0;
    int slabs = 1;    // source partitions per pass; 1 is the canonical mode
    int threads = 1;  // worker threads executing the slabs
    bool random_search = true;
};

/// Squared Euclidean distance between feature vectors.
double feature_distance(const float* a, const float* b, int len);

enum class ScanDirection { Forward, Backward };

/// Uniform random initialization over admissible targets (valid target
/// feature, in bounds, norm >= min_offset). Sites with no admissible target
/// are flagged unmatchable.
OffsetField init_offsets(const FeatureField& src, const FeatureField& tgt,
                         const MatchConfig& cfg);

/// Candidate offsets for one site: the current offset, zero-order
/// predictors from the already-visited neighbors along the row, column,
/// diagonal, antidiagonal and frame directions, then first-order predictors
/// 2*d(x) - d(xx) along the same directions. Bounds/validity filtering
/// against the target happens at evaluation time.
std::vector<Offset> predictor_set(const OffsetField& field, int t, int r, int c,
                                  ScanDirection dir);

/// One propagation sweep in scan order (frame-major, then row, then column;
/// reversed wholesale for Backward). Per-site argmin over the predictor
/// set; cached distances never increase.
void propagate_pass(const FeatureField& src, const FeatureField& tgt,
                    OffsetField& field, const MatchConfig& cfg,
                    ScanDirection dir, int iteration = 0);

/// One random-search sweep: per site, candidates d + R_i with R_i uniform
/// over a cube of radius 2^(i-1) (origin excluded), i = 1..L; inadmissible
/// candidates are skipped and the incumbent is kept unless strictly beaten.
void random_search_pass(const FeatureField& src, const FeatureField& tgt,
                        OffsetField& field, const MatchConfig& cfg,
                        int iteration);

/// Full matcher: alternating propagation and random search for
/// cfg.iterations rounds with alternating scan direction. `initial`, when
/// given, replaces the random initialization (stale cached distances are
/// recomputed first). `frame_filter`, when given, restricts source sites to
/// flagged frames; everything else is left unmatchable.
OffsetField run_patchmatch(const FeatureField& src, const FeatureField& tgt,
                           const MatchConfig& cfg,
                           const OffsetField* initial = nullptr,
                           const std::vector<std::uint8_t>* frame_filter = nullptr);

/// Binary dump: 20-byte header (magic, level, frames, rows, cols;
/// little-endian uint32) then per site int32 dr,dc,dt + float32 distance.
void save_offset_field(const OffsetField& field, const std::filesystem::path& path);
OffsetField load_offset_field(const std::filesystem::path& path, int stride = 4);

} // namespace vcmd
