#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "vcmd/types.hpp"

namespace vcmd {

/// Zernike moment order. Valid when 0 <= m <= n and n-m is even; negative
/// repetitions are redundant once magnitudes are taken.
struct MomentIndex {
    int n = 0;
    int m = 0;
    bool operator==(const MomentIndex&) const = default;
};

bool valid_moment_index(const MomentIndex& idx);

/// Standard Zernike radial polynomial R_{n,m}(rho), rho in [0,1], as the
/// closed-form alternating factorial sum. Orthonormality scaling is applied
/// when moments are assembled, not here.
double radial_polynomial(int n, int m, double rho);

enum class FeatureMode { TwoD, ThreeD_FI };

/// The 12 orders with n <= 5 used for single-frame features, by radial
/// order: (0,0),(1,1),(2,0),(2,2),(3,1),(3,3),(4,0),(4,2),(4,4),(5,1),(5,3),(5,5).
const std::vector<MomentIndex>& default_moments_2d();

/// The 6 orders with n <= 3 used per frame in flip-invariant features.
const std::vector<MomentIndex>& default_moments_3d();

struct FeatureConfig {
    int patch_radius = 8;
    FeatureMode mode = FeatureMode::TwoD;
    std::vector<MomentIndex> moments_2d = default_moments_2d();
    std::vector<MomentIndex> moments_3d = default_moments_3d();
    /// Frames on each side of the center frame; 3D features span 2T+1 frames.
    int temporal_half_extent = 1;

    int feature_length() const {
        if (mode == FeatureMode::TwoD) return static_cast<int>(moments_2d.size());
        return static_cast<int>(moments_3d.size()) * (2 * temporal_half_extent + 1);
    }
    const std::vector<MomentIndex>& active_moments() const {
        return mode == FeatureMode::TwoD ? moments_2d : moments_3d;
    }
};

/// Per-site feature vectors on one resolution level. grid_step is the site
/// spacing in full-resolution pixels (1, S, S^2, ...); site (t,r,c) of the
/// grid describes full-resolution position (t, r*grid_step, c*grid_step).
/// Sites whose patch support leaves the video are marked invalid.
struct FeatureField {
    int level = 0;
    int grid_step = 1;
    int frames = 0;
    int rows = 0;
    int cols = 0;
    int feature_len = 0;
    std::vector<float> vectors; // site-major
    std::vector<std::uint8_t> valid;

    std::size_t sites() const {
        return static_cast<std::size_t>(frames) * rows * cols;
    }
    std::size_t site_index(int t, int r, int c) const {
        return (static_cast<std::size_t>(t) * rows + r) * cols + c;
    }
    const float* at(int t, int r, int c) const {
        return vectors.data() + site_index(t, r, c) * feature_len;
    }
    bool is_valid(int t, int r, int c) const {
        return valid[site_index(t, r, c)] != 0;
    }
    bool in_bounds(int t, int r, int c) const {
        return t >= 0 && t < frames && r >= 0 && r < rows && c >= 0 && c < cols;
    }
};

/// Complex Zernike moments of the circular patch centered on (r,c) in frame
/// t. Discretization: pixel-center sampling over offsets with
/// sqrt(dr^2+dc^2) <= patch_radius, coordinates normalized by patch_radius.
/// Each kernel except (0,0) is orthogonalized against the discrete constant
/// so that constant patches produce exactly zero higher-order moments, and
/// the whole set is scaled so a unit-intensity disc yields moment (0,0) = 1.
/// The patch must fit inside the frame.
std::vector<std::complex<double>>
compute_moments(const Video& video, int t, int r, int c,
                const std::vector<MomentIndex>& moments, int patch_radius);

/// Rotation-invariant single-frame feature: elementwise moment magnitudes.
std::vector<float> feature_2d(const std::vector<std::complex<double>>& moments);

/// Flip-invariant 3D feature from per-frame complex moments of frames
/// t-T..t+T (stack[tau+T][k]). Entries, per moment k, tau ascending:
///   tau < 0 : |f(t+tau) - f(t-tau)| / sqrt(2)
///   tau = 0 : |f(t)|
///   tau > 0 : |f(t+tau) + f(t-tau)| / sqrt(2)
/// The transform runs on complex moments, so the result is also invariant
/// to spatial rotations of the whole 3D patch.
std::vector<float> feature_3d_flip_invariant(
    const std::vector<std::vector<std::complex<double>>>& stack);

/// Dense level-0 feature field of the whole video. Spatial borders (and,
/// in 3D mode, the first/last T frames) are marked invalid.
FeatureField extract_field(const Video& video, const FeatureConfig& cfg,
                           int threads = 1);

/// Binary dump: 24-byte header (magic, level, frames, rows, cols, feature
/// length; little-endian uint32 each) then site-major float32 vectors.
void save_feature_field(const FeatureField& field, const std::filesystem::path& path);
FeatureField load_feature_field(const std::filesystem::path& path, int stride = 4);

} // namespace vcmd
