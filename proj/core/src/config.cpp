#include "vcmd/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace vcmd {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw ConfigError("config key \"" + key + "\": " + why);
}

void check_known_keys(const json& j, const std::string& scope,
                      std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) {
                ok = true;
                break;
            }
        if (!ok) bad_key(scope.empty() ? key : scope + "." + key, "unknown key");
    }
}

template <typename T>
T get_field(const json& j, const std::string& scope, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_key(scope.empty() ? key : scope + "." + key, "wrong type");
    }
}

} // namespace

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig cfg;
    check_known_keys(j, "", {"mode", "threads", "seed", "features", "match",
                             "postproc", "pyramid"});
    cfg.mode = mode_from_name(get_field<std::string>(j, "", "mode", "basic2d"));
    cfg.threads = get_field<int>(j, "", "threads", 1);
    cfg.seed = get_field<std::uint64_t>(j, "", "seed", 0);
    if (cfg.threads < 1) bad_key("threads", "must be >= 1");

    if (j.contains("features")) {
        const auto& f = j.at("features");
        if (!f.is_object()) bad_key("features", "must be an object");
        check_known_keys(f, "features", {"patch_radius", "temporal_half_extent"});
        cfg.features.patch_radius =
            get_field<int>(f, "features", "patch_radius", 8);
        cfg.features.temporal_half_extent =
            get_field<int>(f, "features", "temporal_half_extent", 1);
        if (cfg.features.patch_radius < 1)
            bad_key("features.patch_radius", "must be >= 1");
        if (cfg.features.temporal_half_extent < 1)
            bad_key("features.temporal_half_extent", "must be >= 1");
    }
    if (j.contains("match")) {
        const auto& m = j.at("match");
        if (!m.is_object()) bad_key("match", "must be an object");
        check_known_keys(m, "match",
                         {"iterations", "random_candidates", "min_offset", "slabs"});
        cfg.match.iterations = get_field<int>(m, "match", "iterations", 8);
        cfg.match.random_candidates =
            get_field<int>(m, "match", "random_candidates", 10);
        cfg.match.min_offset = get_field<double>(m, "match", "min_offset", 16.0);
        cfg.match.slabs = get_field<int>(m, "match", "slabs", 0);
        if (cfg.match.iterations < 1) bad_key("match.iterations", "must be >= 1");
        if (cfg.match.random_candidates < 1)
            bad_key("match.random_candidates", "must be >= 1");
        if (!(cfg.match.min_offset > 0)) bad_key("match.min_offset", "must be > 0");
    }
    if (j.contains("postproc")) {
        const auto& p = j.at("postproc");
        if (!p.is_object()) bad_key("postproc", "must be an object");
        check_known_keys(p, "postproc",
                         {"window_half", "error_threshold", "min_region_size",
                          "t_detection", "keep_fraction"});
        cfg.postproc.window_half = get_field<int>(p, "postproc", "window_half", 5);
        cfg.postproc.error_threshold =
            get_field<double>(p, "postproc", "error_threshold", 1.5);
        cfg.postproc.min_region_size =
            get_field<int>(p, "postproc", "min_region_size", 1000);
        cfg.postproc.t_detection =
            get_field<std::int64_t>(p, "postproc", "t_detection", 20000);
        cfg.postproc.keep_fraction =
            get_field<double>(p, "postproc", "keep_fraction", 0.5);
        if (cfg.postproc.window_half < 1)
            bad_key("postproc.window_half", "must be >= 1");
        if (!(cfg.postproc.error_threshold > 0))
            bad_key("postproc.error_threshold", "must be > 0");
        if (cfg.postproc.min_region_size < 1)
            bad_key("postproc.min_region_size", "must be >= 1");
        if (cfg.postproc.t_detection < 1)
            bad_key("postproc.t_detection", "must be >= 1");
        if (cfg.postproc.keep_fraction < 0 || cfg.postproc.keep_fraction > 1)
            bad_key("postproc.keep_fraction", "must be in [0,1]");
    }
    if (j.contains("pyramid")) {
        const auto& p = j.at("pyramid");
        if (!p.is_object()) bad_key("pyramid", "must be an object");
        check_known_keys(p, "pyramid", {"stride", "refine_iterations", "voi_margin"});
        cfg.pyramid.stride = get_field<int>(p, "pyramid", "stride", 4);
        cfg.pyramid.refine_iterations =
            get_field<int>(p, "pyramid", "refine_iterations", 2);
        cfg.pyramid.voi_margin = get_field<int>(p, "pyramid", "voi_margin", 5);
        if (cfg.pyramid.stride < 2) bad_key("pyramid.stride", "must be >= 2");
        if (cfg.pyramid.refine_iterations < 1)
            bad_key("pyramid.refine_iterations", "must be >= 1");
        if (cfg.pyramid.voi_margin < 0)
            bad_key("pyramid.voi_margin", "must be >= 0");
    }
    cfg.finalize();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return run_config_from_json(text.str());
}

std::string run_config_to_json(const RunConfig& cfg) {
    json j;
    j["mode"] = mode_name(cfg.mode);
    j["threads"] = cfg.threads;
    j["seed"] = cfg.seed;
    j["features"] = {{"patch_radius", cfg.features.patch_radius},
                     {"temporal_half_extent", cfg.features.temporal_half_extent}};
    j["match"] = {{"iterations", cfg.match.iterations},
                  {"random_candidates", cfg.match.random_candidates},
                  {"min_offset", cfg.match.min_offset},
                  {"slabs", cfg.match.slabs}};
    j["postproc"] = {{"window_half", cfg.postproc.window_half},
                     {"error_threshold", cfg.postproc.error_threshold},
                     {"min_region_size", cfg.postproc.min_region_size},
                     {"t_detection", cfg.postproc.t_detection},
                     {"keep_fraction", cfg.postproc.keep_fraction}};
    j["pyramid"] = {{"stride", cfg.pyramid.stride},
                    {"refine_iterations", cfg.pyramid.refine_iterations},
                    {"voi_margin", cfg.pyramid.voi_margin}};
    return j.dump(2);
}

} // namespace vcmd
