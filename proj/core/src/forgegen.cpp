#include "vcmd/forgegen.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

#include "vcmd/rng.hpp"

namespace vcmd {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

double bilinear(const Video& video, int t, double r, double c) {
    const int r0 = static_cast<int>(std::floor(r));
    const int c0 = static_cast<int>(std::floor(c));
    const double fr = r - r0, fc = c - c0;
    const auto sample = [&](int rr, int cc) {
        rr = std::clamp(rr, 0, video.rows - 1);
        cc = std::clamp(cc, 0, video.cols - 1);
        return double(video.at(t, rr, cc));
    };
    return (1 - fr) * ((1 - fc) * sample(r0, c0) + fc * sample(r0, c0 + 1)) +
           fr * ((1 - fc) * sample(r0 + 1, c0) + fc * sample(r0 + 1, c0 + 1));
}

void separable_gaussian_blur(std::vector<float>& plane, int rows, int cols,
                             double sigma) {
    const int half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * half + 1);
    double norm = 0;
    for (int i = -half; i <= half; ++i) {
        kernel[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        norm += kernel[i + half];
    }
    for (auto& k : kernel) k /= norm;

    std::vector<float> tmp(plane.size());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double acc = 0;
            for (int i = -half; i <= half; ++i) {
                const int cc = std::clamp(c + i, 0, cols - 1);
                acc += kernel[i + half] * plane[std::size_t(r) * cols + cc];
            }
            tmp[std::size_t(r) * cols + c] = static_cast<float>(acc);
        }
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            double acc = 0;
            for (int i = -half; i <= half; ++i) {
                const int rr = std::clamp(r + i, 0, rows - 1);
                acc += kernel[i + half] * tmp[std::size_t(rr) * cols + c];
            }
            plane[std::size_t(r) * cols + c] = static_cast<float>(acc);
        }
}

std::string kind_name(ForgeryKind k) {
    return k == ForgeryKind::Additive ? "additive" : "occlusive";
}
std::string shape_name(RegionShape s) {
    return s == RegionShape::Cylinder ? "cylinder" : "box";
}

} // namespace

double ForgeryRegion::inner_distance(double r, double c) const {
    const double lr = r - center_r, lc = c - center_c;
    if (shape == RegionShape::Cylinder)
        return radius - std::sqrt(lr * lr + lc * lc);
    return std::min(half_rows - std::abs(lr), half_cols - std::abs(lc));
}

std::string ForgerySpec::to_json() const {
    json j;
    j["source"] = {{"shape", shape_name(source.shape)},
                   {"center_r", source.center_r},
                   {"center_c", source.center_c},
                   {"radius", source.radius},
                   {"half_rows", source.half_rows},
                   {"half_cols", source.half_cols},
                   {"t_begin", source.t_begin},
                   {"t_end", source.t_end}};
    j["displacement"] = {{"dr", dr}, {"dc", dc}, {"dt", dt}};
    j["rotation_deg"] = rotation_deg;
    j["temporal_flip"] = temporal_flip;
    j["kind"] = kind_name(kind);
    j["feather"] = feather;
    j["gt_destination_only"] = gt_destination_only;
    return j.dump(2);
}

ForgerySpec ForgerySpec::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("forgery spec is not valid JSON: ") + e.what());
    }
    ForgerySpec spec;
    try {
        const auto& s = j.at("source");
        const std::string shape = s.at("shape").get<std::string>();
        if (shape == "cylinder")
            spec.source.shape = RegionShape::Cylinder;
        else if (shape == "box")
            spec.source.shape = RegionShape::Box;
        else
            throw ConfigError("forgery spec: unknown source.shape \"" + shape + "\"");
        spec.source.center_r = s.at("center_r").get<double>();
        spec.source.center_c = s.at("center_c").get<double>();
        spec.source.radius = s.value("radius", 0.0);
        spec.source.half_rows = s.value("half_rows", 0.0);
        spec.source.half_cols = s.value("half_cols", 0.0);
        spec.source.t_begin = s.at("t_begin").get<int>();
        spec.source.t_end = s.at("t_end").get<int>();
        const auto& d = j.at("displacement");
        spec.dr = d.at("dr").get<int>();
        spec.dc = d.at("dc").get<int>();
        spec.dt = d.at("dt").get<int>();
        spec.rotation_deg = j.value("rotation_deg", 0.0);
        spec.temporal_flip = j.value("temporal_flip", false);
        const std::string kind = j.value("kind", "additive");
        if (kind == "additive")
            spec.kind = ForgeryKind::Additive;
        else if (kind == "occlusive")
            spec.kind = ForgeryKind::Occlusive;
        else
            throw ConfigError("forgery spec: unknown kind \"" + kind + "\"");
        spec.feather = j.value("feather", 2.0);
        spec.gt_destination_only = j.value("gt_destination_only", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("forgery spec: ") + e.what());
    }
    return spec;
}

ForgeryResult apply_copy_move(const Video& video, const ForgerySpec& spec) {
    const ForgeryRegion& src = spec.source;
    if (src.t_begin < 0 || src.t_end >= video.frames || src.t_begin > src.t_end)
        throw ConfigError("forgery spec: source frame span outside the video");
    const int span = src.t_end - src.t_begin + 1;

    // Destination spatial bounding box (the rotated footprint of a disc is
    // the disc itself; for boxes use the rotated diagonal as a bound).
    const double reach = src.shape == RegionShape::Cylinder
                             ? src.radius
                             : std::hypot(src.half_rows, src.half_cols);
    const double dest_cr = src.center_r + spec.dr;
    const double dest_cc = src.center_c + spec.dc;
    if (dest_cr - reach < 0 || dest_cr + reach > video.rows - 1 ||
        dest_cc - reach < 0 || dest_cc + reach > video.cols - 1 ||
        src.center_r - reach < 0 || src.center_r + reach > video.rows - 1 ||
        src.center_c - reach < 0 || src.center_c + reach > video.cols - 1)
        throw ConfigError("forgery spec: region leaves the video support");
    if (src.t_begin + spec.dt < 0 || src.t_end + spec.dt >= video.frames)
        throw ConfigError("forgery spec: destination frame span outside the video");

    const double theta = spec.rotation_deg * kPi / 180.0;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);

    ForgeryResult out;
    out.forged = video;
    out.gt = MaskVolume(video.frames, video.rows, video.cols);

    const int rb0 = static_cast<int>(std::floor(dest_cr - reach));
    const int rb1 = static_cast<int>(std::ceil(dest_cr + reach));
    const int cb0 = static_cast<int>(std::floor(dest_cc - reach));
    const int cb1 = static_cast<int>(std::ceil(dest_cc + reach));

    for (int k = 0; k < span; ++k) {
        const int td = src.t_begin + spec.dt + k;
        const int ts = spec.temporal_flip ? src.t_end - k : src.t_begin + k;
        for (int r = rb0; r <= rb1; ++r)
            for (int c = cb0; c <= cb1; ++c) {
                // Inverse-rotate the destination offset into source space.
                const double lr = r - dest_cr, lc = c - dest_cc;
                const double sr = cos_t * lr + sin_t * lc;
                const double sc = -sin_t * lr + cos_t * lc;
                const double src_r = src.center_r + sr;
                const double src_c = src.center_c + sc;
                const double inner = src.inner_distance(src_r, src_c);
                if (inner <= 0) continue;
                const double alpha =
                    spec.feather > 0 ? std::min(1.0, inner / spec.feather) : 1.0;
                double value;
                if (spec.rotation_deg == 0.0) {
                    value = video.at(ts, static_cast<int>(std::lround(src_r)),
                                     static_cast<int>(std::lround(src_c)));
                } else {
                    value = bilinear(video, ts, src_r, src_c);
                }
                const std::size_t idx = out.forged.index(td, r, c);
                out.forged.samples[idx] = static_cast<float>(
                    alpha * value + (1.0 - alpha) * video.samples[idx]);
                out.gt.bits[idx] = 1;
            }
    }

    if (!spec.gt_destination_only)
        for (int k = 0; k < span; ++k) {
            const int t = src.t_begin + k;
            for (int r = rb0 - spec.dr; r <= rb1 - spec.dr; ++r)
                for (int c = cb0 - spec.dc; c <= cb1 - spec.dc; ++c)
                    if (src.contains(r, c)) out.gt.at(t, r, c) = 1;
        }

    // rho_max over destination frames; d_max over destination sites.
    std::vector<std::int64_t> depth(static_cast<std::size_t>(video.rows) *
                                        video.cols,
                                    0);
    for (int k = 0; k < span; ++k) {
        const int td = src.t_begin + spec.dt + k;
        std::int64_t area = 0;
        for (int r = rb0; r <= rb1; ++r)
            for (int c = cb0; c <= cb1; ++c) {
                const double lr = r - dest_cr, lc = c - dest_cc;
                const double sr = cos_t * lr + sin_t * lc;
                const double sc = -sin_t * lr + cos_t * lc;
                if (src.contains(src.center_r + sr, src.center_c + sc)) {
                    ++area;
                    ++depth[std::size_t(r) * video.cols + c];
                }
            }
        (void)td;
        out.rho_max = std::max(out.rho_max, std::sqrt(double(area) / kPi));
    }
    for (auto d : depth) out.d_max = std::max<int>(out.d_max, static_cast<int>(d));
    return out;
}

Video synth_texture(int frames, int rows, int cols, TextureKind kind,
                    std::uint64_t seed, double sigma) {
    Video video(frames, rows, cols);
    switch (kind) {
        case TextureKind::GaussianBlurNoise: {
            for (int t = 0; t < frames; ++t) {
                Rng rng = Rng::derive(seed, 0x6e6f, static_cast<std::uint64_t>(t));
                std::vector<float> plane(static_cast<std::size_t>(rows) * cols);
                for (auto& v : plane) v = static_cast<float>(rng.unit());
                separable_gaussian_blur(plane, rows, cols, sigma);
                float lo = plane[0], hi = plane[0];
                for (float v : plane) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                const float scale = hi > lo ? 1.0f / (hi - lo) : 0.0f;
                float* dst = video.samples.data() + video.index(t, 0, 0);
                for (std::size_t i = 0; i < plane.size(); ++i)
                    dst[i] = (plane[i] - lo) * scale;
            }
            break;
        }
        case TextureKind::Tiles: {
            const int tile = 16;
            const int tr = (rows + tile - 1) / tile, tc = (cols + tile - 1) / tile;
            Rng rng = Rng::derive(seed, 0x7469, 0);
            std::vector<float> shade(static_cast<std::size_t>(tr) * tc);
            for (auto& s : shade) s = static_cast<float>(rng.unit());
            for (int t = 0; t < frames; ++t)
                for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c)
                        video.at(t, r, c) =
                            shade[std::size_t(r / tile) * tc + c / tile];
            break;
        }
        case TextureKind::Gradient: {
            const double denom = std::max(1, (frames - 1) + (rows - 1) + (cols - 1));
            for (int t = 0; t < frames; ++t)
                for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c)
                        video.at(t, r, c) = static_cast<float>((t + r + c) / denom);
            break;
        }
    }
    return video;
}

Video degrade_gaussian_noise(const Video& video, double sigma,
                             std::uint64_t seed) {
    if (sigma == 0.0) return video;
    Video out = video;
    Rng rng = Rng::derive(seed, 0x6e7a, 1);
    for (auto& v : out.samples)
        v = static_cast<float>(
            std::clamp(double(v) + sigma * rng.normal(), 0.0, 1.0));
    return out;
}

Video degrade_jpeg(const Video& video, int quality) {
    if (quality < 1 || quality > 100)
        throw ConfigError("jpeg quality must be in [1,100]");
    Video out = video;
    cv::Mat img(video.rows, video.cols, CV_8UC1);
    const std::vector<int> params = {cv::IMWRITE_JPEG_QUALITY, quality};
    std::vector<std::uint8_t> buffer;
    for (int t = 0; t < video.frames; ++t) {
        for (int r = 0; r < video.rows; ++r) {
            std::uint8_t* dst = img.ptr<std::uint8_t>(r);
            const float* srcp = video.samples.data() + video.index(t, r, 0);
            for (int c = 0; c < video.cols; ++c) {
                const float v = std::clamp(srcp[c], 0.0f, 1.0f);
                dst[c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
            }
        }
        buffer.clear();
        if (!cv::imencode(".jpg", img, buffer, params))
            throw IoError("jpeg encode failed");
        cv::Mat back = cv::imdecode(buffer, cv::IMREAD_GRAYSCALE);
        if (back.empty()) throw IoError("jpeg decode failed");
        for (int r = 0; r < video.rows; ++r) {
            const std::uint8_t* srcp = back.ptr<std::uint8_t>(r);
            float* dst = out.samples.data() + out.index(t, r, 0);
            for (int c = 0; c < video.cols; ++c)
                dst[c] = srcp[c] / 255.0f;
        }
    }
    return out;
}

} // namespace vcmd
