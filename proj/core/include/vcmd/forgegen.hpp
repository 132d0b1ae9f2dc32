#pragma once

#include <cstdint>
#include <string>

#include "vcmd/types.hpp"

namespace vcmd {

enum class RegionShape { Cylinder, Box };

/// Spatio-temporal support of the copied material: a disc or axis-aligned
/// rectangle swept over an inclusive frame span.
struct ForgeryRegion {
    RegionShape shape = RegionShape::Cylinder;
    double center_r = 0;
    double center_c = 0;
    double radius = 0;    // cylinder
    double half_rows = 0; // box
    double half_cols = 0;
    int t_begin = 0;
    int t_end = 0;

    /// Signed inner distance to the spatial boundary (> 0 inside).
    double inner_distance(double r, double c) const;
    bool contains(double r, double c) const { return inner_distance(r, c) > 0.0; }
};

enum class ForgeryKind { Additive, Occlusive };

struct ForgerySpec {
    ForgeryRegion source;
    int dr = 0, dc = 0, dt = 0;   // destination displacement
    double rotation_deg = 0;      // about the region center
    bool temporal_flip = false;   // destination plays the source backwards
    ForgeryKind kind = ForgeryKind::Additive;
    double feather = 2.0;         // boundary blend width, pixels
    bool gt_destination_only = false;

    std::string to_json() const;
    static ForgerySpec from_json_text(const std::string& text);
};

struct ForgeryResult {
    Video forged;
    MaskVolume gt;
    double rho_max = 0; // max over frames of sqrt(tampered area / pi)
    int d_max = 0;      // max over sites of tampered frame count
};

/// Copies the (optionally rotated, optionally time-reversed) source region
/// onto the displaced destination with a feathered boundary. Ground truth
/// marks both the source and destination regions unless
/// gt_destination_only is set.
ForgeryResult apply_copy_move(const Video& video, const ForgerySpec& spec);

enum class TextureKind { GaussianBlurNoise, Tiles, Gradient };

/// Deterministic test substrates. sigma is the blur scale of
/// GaussianBlurNoise (per-frame independent noise) and is ignored by the
/// other kinds.
Video synth_texture(int frames, int rows, int cols, TextureKind kind,
                    std::uint64_t seed, double sigma = 1.0);

/// Additive white Gaussian noise, clamped to [0,1]. sigma == 0 is identity.
Video degrade_gaussian_noise(const Video& video, double sigma,
                             std::uint64_t seed);

/// Per-frame JPEG round trip at the given quality (1..100).
Video degrade_jpeg(const Video& video, int quality);

} // namespace vcmd
