#include "support/fixtures.hpp"

#include <atomic>
#include <chrono>

namespace fixtures {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("vcmd_" + tag + "_" + std::to_string(stamp) + "_" +
             std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

vcmd::Video planted_block_copy(int frames, int rows, int cols, int t0, int r0,
                               int c0, int block_frames, int block_rows,
                               int block_cols, int dt, int dr, int dc,
                               std::uint64_t seed) {
    vcmd::Video video = vcmd::synth_texture(
        frames, rows, cols, vcmd::TextureKind::GaussianBlurNoise, seed, 1.5);
    for (int t = 0; t < block_frames; ++t)
        for (int r = 0; r < block_rows; ++r)
            for (int c = 0; c < block_cols; ++c)
                video.at(t0 + t + dt, r0 + r + dr, c0 + c + dc) =
                    video.at(t0 + t, r0 + r, c0 + c);
    return video;
}

vcmd::RunConfig desk_config(vcmd::Mode mode, std::int64_t t_detection,
                            int min_region_size, std::uint64_t seed,
                            int threads) {
    vcmd::RunConfig cfg;
    cfg.mode = mode;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.postproc.t_detection = t_detection;
    cfg.postproc.min_region_size = min_region_size;
    cfg.finalize();
    return cfg;
}

} // namespace fixtures
