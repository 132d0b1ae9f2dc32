#pragma once

#include <filesystem>

#include "vcmd/types.hpp"

namespace vcmd {

enum class VideoSource {
    FrameDir, // directory of PNG/PGM frames, lexicographic filename order
    Y4M,      // uncompressed YUV4MPEG2 stream; only the luma plane is kept
    Auto      // directory -> FrameDir, file -> Y4M
};

/// Loads a video as a grayscale volume in [0,1]. RGB inputs are converted
/// to luminance with Rec.601 weights (0.299, 0.587, 0.114).
Video load_video(const std::filesystem::path& path,
                 VideoSource kind = VideoSource::Auto);

/// Writes one 8-bit grayscale PNG per frame (named 000000.png, ...).
void save_video_frames(const Video& video, const std::filesystem::path& dir);

/// Mask storage: one 8-bit grayscale PNG per frame, 0 = pristine,
/// 255 = detected (named mask_000000.png, ...). Round-trips exactly.
void save_mask(const MaskVolume& mask, const std::filesystem::path& dir);
MaskVolume load_mask(const std::filesystem::path& dir);

/// Detection overlays: video frames with detected sites blended red.
void save_overlays(const Video& video, const MaskVolume& mask,
                   const std::filesystem::path& dir);

} // namespace vcmd
