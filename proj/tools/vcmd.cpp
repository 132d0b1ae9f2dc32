// Command-line front end: detect / evaluate / forge / nnf / synth.
//
// Exit codes: 0 success (including "not detected"), 2 configuration error,
// 3 I/O error, 4 internal error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "vcmd/config.hpp"
#include "vcmd/forgegen.hpp"
#include "vcmd/metrics.hpp"
#include "vcmd/pipeline.hpp"
#include "vcmd/video_io.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::string mode;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    bool dump_nnf = false;
    bool dump_features = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--mode", opts.mode,
                    "detector variant: basic2d|basic3d|fast2d|fast3d");
    cmd->add_option("--threads", opts.threads, "worker threads");
    cmd->add_option("--seed", opts.seed, "random seed");
}

vcmd::RunConfig resolve_config(const CommonOpts& opts) {
    vcmd::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = vcmd::load_run_config(opts.config_path);
    if (!opts.mode.empty()) cfg.mode = vcmd::mode_from_name(opts.mode);
    if (opts.threads > 0) cfg.threads = opts.threads;
    if (opts.seed) cfg.seed = *opts.seed;
    cfg.finalize();
    return cfg;
}

json timings_json(const vcmd::DetectionResult& result) {
    json stages = json::object();
    for (const auto& stage : result.timings) stages[stage.name] = stage.seconds;
    return json{{"featuring_s", result.featuring_s},
                {"matching_s", result.matching_s},
                {"postproc_s", result.postproc_s},
                {"total_s", result.total_s},
                {"stages", stages}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw vcmd::IoError("cannot write: " + path.string());
    out << text << '\n';
}

int cmd_detect(const std::string& video_path, const std::string& out_dir,
               const CommonOpts& opts) {
    const vcmd::RunConfig cfg = resolve_config(opts);
    const vcmd::Video video = vcmd::load_video(video_path);
    const bool keep_nnf = opts.dump_nnf;
    const vcmd::DetectionResult result = vcmd::detect(video, cfg, keep_nnf);

    fs::create_directories(out_dir);
    vcmd::save_mask(result.map, fs::path(out_dir) / "mask");
    vcmd::save_overlays(video, result.map, fs::path(out_dir) / "overlay");
    if (opts.dump_nnf && !result.nnf.offsets.empty())
        vcmd::save_offset_field(result.nnf, fs::path(out_dir) / "nnf.bin");
    if (opts.dump_features) {
        vcmd::RunConfig fcfg = cfg;
        const vcmd::FeatureField field =
            vcmd::extract_field(video, fcfg.features, fcfg.threads);
        vcmd::save_feature_field(field, fs::path(out_dir) / "features.bin");
    }

    json report;
    report["detected"] = result.detected;
    report["pixel_count"] = result.pixel_count;
    report["stats"] = {{"level1_pixel_count", result.level1_pixel_count},
                       {"voi_frames", result.voi_frames},
                       {"level0_skipped", result.level0_skipped}};
    report["timings"] = timings_json(result);
    report["config"] = json::parse(vcmd::run_config_to_json(cfg));
    write_text(fs::path(out_dir) / "report.json", report.dump(2));
    std::cout << (result.detected ? "detected" : "not detected") << " ("
              << result.pixel_count << " sites)\n";
    return 0;
}

int cmd_evaluate(const std::string& video_path, const std::string& gt_path,
                 const std::string& out_path, const CommonOpts& opts) {
    const vcmd::RunConfig cfg = resolve_config(opts);
    const vcmd::Video video = vcmd::load_video(video_path);
    const vcmd::MaskVolume gt = vcmd::load_mask(gt_path);
    const vcmd::DetectionResult result = vcmd::detect(video, cfg);
    vcmd::Score s = vcmd::score(result.map, gt);
    s.detected = result.detected;
    s.cpu_s_per_mpixel =
        result.total_s / (double(video.size()) / 1e6);

    json report;
    report["detected"] = s.detected;
    report["pixel_count"] = result.pixel_count;
    report["tp"] = s.tp;
    report["fp"] = s.fp;
    report["tn"] = s.tn;
    report["fn"] = s.fn;
    report["f_measure"] = s.f_measure;
    report["cpu_s_per_mpixel"] = s.cpu_s_per_mpixel;
    report["timings"] = timings_json(result);
    report["config"] = json::parse(vcmd::run_config_to_json(cfg));
    const std::string text = report.dump(2);
    if (out_path.empty())
        std::cout << text << '\n';
    else
        write_text(out_path, text);
    return 0;
}

int cmd_forge(const std::string& spec_path, const std::string& video_path,
              const std::string& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw vcmd::IoError("cannot read spec: " + spec_path);
    std::ostringstream text;
    text << in.rdbuf();
    const vcmd::ForgerySpec spec = vcmd::ForgerySpec::from_json_text(text.str());
    const vcmd::Video video = vcmd::load_video(video_path);
    const vcmd::ForgeryResult result = vcmd::apply_copy_move(video, spec);

    fs::create_directories(out_dir);
    vcmd::save_video_frames(result.forged, fs::path(out_dir) / "frames");
    vcmd::save_mask(result.gt, fs::path(out_dir) / "gt");
    write_text(fs::path(out_dir) / "spec.json", spec.to_json());
    json stats;
    stats["rho_max"] = result.rho_max;
    stats["d_max"] = result.d_max;
    write_text(fs::path(out_dir) / "stats.json", stats.dump(2));
    std::cout << "forged video written to " << out_dir << "\n";
    return 0;
}

int cmd_nnf(const std::string& video_path, const std::string& out_path,
            const CommonOpts& opts) {
    vcmd::RunConfig cfg = resolve_config(opts);
    const vcmd::Video video = vcmd::load_video(video_path);
    const vcmd::FeatureField field =
        vcmd::extract_field(video, cfg.features, cfg.threads);
    const vcmd::OffsetField nnf = vcmd::run_patchmatch(field, field, cfg.match);
    vcmd::save_offset_field(nnf, out_path);
    std::cout << "offset field written to " << out_path << "\n";
    return 0;
}

int cmd_synth(const std::string& kind_name, int frames, int rows, int cols,
              std::uint64_t seed, double sigma, const std::string& out_dir) {
    vcmd::TextureKind kind;
    if (kind_name == "blur_noise")
        kind = vcmd::TextureKind::GaussianBlurNoise;
    else if (kind_name == "tiles")
        kind = vcmd::TextureKind::Tiles;
    else if (kind_name == "gradient")
        kind = vcmd::TextureKind::Gradient;
    else
        throw vcmd::ConfigError("unknown texture kind \"" + kind_name + "\"");
    const vcmd::Video video =
        vcmd::synth_texture(frames, rows, cols, kind, seed, sigma);
    vcmd::save_video_frames(video, out_dir);
    std::cout << "synthetic video written to " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Video copy-move forgery detector"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string video_path, out_path, gt_path, spec_path;

    auto* detect = app.add_subcommand("detect", "detect and localize copy-moves");
    detect->add_option("video", video_path, "frame directory or .y4m file")
        ->required();
    detect->add_option("--out", out_path, "output directory")->required();
    add_common(detect, opts);
    detect->add_flag("--dump-nnf", opts.dump_nnf, "write the final offset field");
    detect->add_flag("--dump-features", opts.dump_features,
                     "write the level-0 feature field");

    auto* evaluate = app.add_subcommand("evaluate", "score a detection against ground truth");
    evaluate->add_option("video", video_path, "frame directory or .y4m file")
        ->required();
    evaluate->add_option("--gt", gt_path, "ground-truth mask directory")->required();
    evaluate->add_option("--out", out_path, "report path (stdout when omitted)");
    add_common(evaluate, opts);

    auto* forge = app.add_subcommand("forge", "apply a copy-move to a video");
    forge->add_option("spec", spec_path, "forgery spec JSON")->required();
    forge->add_option("--video", video_path, "source video")->required();
    forge->add_option("--out", out_path, "output directory")->required();

    auto* nnf = app.add_subcommand("nnf", "compute and dump the offset field");
    nnf->add_option("video", video_path, "frame directory or .y4m file")->required();
    nnf->add_option("--out", out_path, "dump path")->required();
    add_common(nnf, opts);

    auto* synth = app.add_subcommand("synth", "generate a synthetic test video");
    std::string kind = "blur_noise";
    int frames = 30, rows = 240, cols = 320;
    std::uint64_t seed = 1;
    double sigma = 1.5;
    synth->add_option("--kind", kind, "blur_noise|tiles|gradient");
    synth->add_option("--frames", frames, "frame count");
    synth->add_option("--rows", rows, "frame height");
    synth->add_option("--cols", cols, "frame width");
    synth->add_option("--seed", seed, "random seed");
    synth->add_option("--sigma", sigma, "blur-noise correlation scale");
    synth->add_option("--out", out_path, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (detect->parsed()) return cmd_detect(video_path, out_path, opts);
        if (evaluate->parsed())
            return cmd_evaluate(video_path, gt_path, out_path, opts);
        if (forge->parsed()) return cmd_forge(spec_path, video_path, out_path);
        if (nnf->parsed()) return cmd_nnf(video_path, out_path, opts);
        if (synth->parsed())
            return cmd_synth(kind, frames, rows, cols, seed, sigma, out_path);
    } catch (const vcmd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vcmd::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
