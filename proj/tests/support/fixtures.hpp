#pragma once

#include <filesystem>

#include "vcmd/forgegen.hpp"
#include "vcmd/pipeline.hpp"
#include "vcmd/types.hpp"

namespace fixtures {

/// Unique fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Blur-noise video with an exact rectangular block copy (no feather, no
/// rotation): block of size block_rows x block_cols x block_frames at
/// (t0,r0,c0) copied by (dr,dc,dt). Returns the forged video; truth is the
/// displacement itself.
vcmd::Video planted_block_copy(int frames, int rows, int cols, int t0, int r0,
                               int c0, int block_frames, int block_rows,
                               int block_cols, int dt, int dr, int dc,
                               std::uint64_t seed);

/// Small-video detector configuration: defaults with detection thresholds
/// scaled to the given volume (the defaults target full-size videos).
vcmd::RunConfig desk_config(vcmd::Mode mode, std::int64_t t_detection,
                            int min_region_size, std::uint64_t seed = 1,
                            int threads = 2);

} // namespace fixtures
