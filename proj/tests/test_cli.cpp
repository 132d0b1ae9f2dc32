#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support/fixtures.hpp"
#include "vcmd/forgegen.hpp"
#include "vcmd/video_io.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string binary_path() {
    const char* env = std::getenv("VCMD_BIN");
    REQUIRE_MESSAGE(env != nullptr, "VCMD_BIN must point at the CLI binary");
    return env;
}

int run_cli(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

json report_without_timings(const fs::path& path) {
    json j = json::parse(slurp(path));
    j.erase("timings");
    return j;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("detect on a forged clip end to end") {
    fixtures::TempDir dir("cli");
    // build a small forged video on disk
    const vcmd::Video pristine = vcmd::synth_texture(
        8, 96, 96, vcmd::TextureKind::GaussianBlurNoise, 99, 1.5);
    vcmd::ForgerySpec spec;
    spec.source.center_r = 32;
    spec.source.center_c = 30;
    spec.source.radius = 15;
    spec.source.t_begin = 0;
    spec.source.t_end = 7;
    spec.dr = 30;
    spec.dc = 40;
    const vcmd::ForgeryResult forged = vcmd::apply_copy_move(pristine, spec);
    vcmd::save_video_frames(forged.forged, dir.path() / "frames");
    vcmd::save_mask(forged.gt, dir.path() / "gt");

    // config scaled to the desk-size fixture
    const fs::path cfg_path = dir.path() / "config.json";
    std::ofstream(cfg_path) << R"({
      "mode": "basic2d", "seed": 3, "threads": 2,
      "postproc": {"min_region_size": 80, "t_detection": 700}
    })";

    const fs::path out1 = dir.path() / "out1";
    const int rc = run_cli("detect " + (dir.path() / "frames").string() +
                           " --out " + out1.string() + " --config " +
                           cfg_path.string());
    CHECK(rc == 0);
    const json report = json::parse(slurp(out1 / "report.json"));
    CHECK(report.at("detected").get<bool>());
    CHECK(fs::exists(out1 / "mask" / "mask_000000.png"));
    CHECK(fs::exists(out1 / "overlay" / "overlay_000000.png"));

    SUBCASE("reports are byte-identical across runs, timings aside") {
        const fs::path out2 = dir.path() / "out2";
        REQUIRE(run_cli("detect " + (dir.path() / "frames").string() +
                        " --out " + out2.string() + " --config " +
                        cfg_path.string()) == 0);
        CHECK(report_without_timings(out1 / "report.json") ==
              report_without_timings(out2 / "report.json"));
    }

    SUBCASE("evaluate scores the same run against ground truth") {
        const fs::path rep = dir.path() / "eval.json";
        REQUIRE(run_cli("evaluate " + (dir.path() / "frames").string() +
                        " --gt " + (dir.path() / "gt").string() + " --config " +
                        cfg_path.string() + " --out " + rep.string()) == 0);
        const json eval = json::parse(slurp(rep));
        CHECK(eval.at("detected").get<bool>());
        CHECK(eval.at("f_measure").get<double>() > 0.4);
        CHECK(eval.at("tp").get<std::int64_t>() > 0);
    }

    SUBCASE("nnf dump is written") {
        const fs::path nnf = dir.path() / "field.nnf";
        REQUIRE(run_cli("nnf " + (dir.path() / "frames").string() + " --out " +
                        nnf.string() + " --config " + cfg_path.string()) == 0);
        CHECK(fs::exists(nnf));
        CHECK(fs::file_size(nnf) > 20);
    }
}

TEST_CASE("forge subcommand writes frames, ground truth and stats") {
    fixtures::TempDir dir("forge");
    const vcmd::Video v = vcmd::synth_texture(
        6, 80, 80, vcmd::TextureKind::GaussianBlurNoise, 55, 1.5);
    vcmd::save_video_frames(v, dir.path() / "src");
    vcmd::ForgerySpec spec;
    spec.source.center_r = 30;
    spec.source.center_c = 30;
    spec.source.radius = 12;
    spec.source.t_begin = 1;
    spec.source.t_end = 4;
    spec.dr = 25;
    spec.dc = 30;
    std::ofstream(dir.path() / "spec.json") << spec.to_json();

    const int rc = run_cli("forge " + (dir.path() / "spec.json").string() +
                           " --video " + (dir.path() / "src").string() +
                           " --out " + (dir.path() / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path() / "out" / "frames" / "000000.png"));
    CHECK(fs::exists(dir.path() / "out" / "gt" / "mask_000000.png"));
    const json stats = json::parse(slurp(dir.path() / "out" / "stats.json"));
    CHECK(stats.at("d_max").get<int>() == 4);
    CHECK(stats.at("rho_max").get<double>() > 10.0);

    // the written ground truth loads back with both regions
    const vcmd::MaskVolume gt = vcmd::load_mask(dir.path() / "out" / "gt");
    CHECK(gt.count_ones() > 0);
}

TEST_CASE("error exit codes") {
    fixtures::TempDir dir("clierr");
    SUBCASE("malformed config exits 2") {
        const fs::path cfg = dir.path() / "bad.json";
        std::ofstream(cfg) << R"({"mode": "warp9"})";
        vcmd::Video v(2, 24, 24, 0.5f);
        vcmd::save_video_frames(v, dir.path() / "frames");
        CHECK(run_cli("detect " + (dir.path() / "frames").string() + " --out " +
                      (dir.path() / "out").string() + " --config " +
                      cfg.string()) == 2);
    }
    SUBCASE("unknown config key exits 2") {
        const fs::path cfg = dir.path() / "bad2.json";
        std::ofstream(cfg) << R"({"iterations": 8})";
        vcmd::Video v(2, 24, 24, 0.5f);
        vcmd::save_video_frames(v, dir.path() / "frames2");
        CHECK(run_cli("detect " + (dir.path() / "frames2").string() +
                      " --out " + (dir.path() / "out2").string() + " --config " +
                      cfg.string()) == 2);
    }
    SUBCASE("missing video exits 3") {
        CHECK(run_cli("detect /nonexistent/clip --out " +
                      (dir.path() / "out3").string()) == 3);
    }
    SUBCASE("missing subcommand exits 2") { CHECK(run_cli("") == 2); }
}

TEST_CASE("synth subcommand produces loadable frames") {
    fixtures::TempDir dir("synth");
    CHECK(run_cli("synth --kind gradient --frames 3 --rows 16 --cols 20 --out " +
                  (dir.path() / "g").string()) == 0);
    const vcmd::Video v = vcmd::load_video(dir.path() / "g");
    CHECK(v.frames == 3);
    CHECK(v.rows == 16);
    CHECK(v.cols == 20);
}

TEST_SUITE_END();
