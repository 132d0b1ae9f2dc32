#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcmd {

/// Thrown for unreadable/unwritable files and malformed on-disk data.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown for invalid configuration values or malformed config files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grayscale video volume. Samples are luminance in [0,1], stored
/// frame-major then row-major.
struct Video {
    int frames = 0;
    int rows = 0;
    int cols = 0;
    std::vector<float> samples;

    Video() = default;
    Video(int t, int h, int w, float fill = 0.0f)
        : frames(t), rows(h), cols(w),
          samples(static_cast<std::size_t>(t) * h * w, fill) {}

    std::size_t size() const { return samples.size(); }

    std::size_t index(int t, int r, int c) const {
        return (static_cast<std::size_t>(t) * rows + r) * cols + c;
    }
    float at(int t, int r, int c) const { return samples[index(t, r, c)]; }
    float& at(int t, int r, int c) { return samples[index(t, r, c)]; }

    bool in_bounds(int t, int r, int c) const {
        return t >= 0 && t < frames && r >= 0 && r < rows && c >= 0 && c < cols;
    }
    bool same_dims(const Video& o) const {
        return frames == o.frames && rows == o.rows && cols == o.cols;
    }
};

/// Binary volume over a site grid. At full resolution its dimensions match
/// the video; post-processing also uses it on subsampled grids.
struct MaskVolume {
    int frames = 0;
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bits;

    MaskVolume() = default;
    MaskVolume(int t, int h, int w, std::uint8_t fill = 0)
        : frames(t), rows(h), cols(w),
          bits(static_cast<std::size_t>(t) * h * w, fill) {}

    std::size_t size() const { return bits.size(); }

    std::size_t index(int t, int r, int c) const {
        return (static_cast<std::size_t>(t) * rows + r) * cols + c;
    }
    std::uint8_t at(int t, int r, int c) const { return bits[index(t, r, c)]; }
    std::uint8_t& at(int t, int r, int c) { return bits[index(t, r, c)]; }

    bool in_bounds(int t, int r, int c) const {
        return t >= 0 && t < frames && r >= 0 && r < rows && c >= 0 && c < cols;
    }
    bool same_dims(const MaskVolume& o) const {
        return frames == o.frames && rows == o.rows && cols == o.cols;
    }

    std::int64_t count_ones() const {
        std::int64_t n = 0;
        for (auto b : bits) n += (b != 0);
        return n;
    }
};

} // namespace vcmd
