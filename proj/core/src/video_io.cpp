#include "vcmd/video_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vcmd {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> list_frames(const fs::path& dir,
                                  std::initializer_list<const char*> exts) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        for (const char* e : exts)
            if (ext == e) {
                files.push_back(entry.path());
                break;
            }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
              });
    return files;
}

void frame_to_luma(const cv::Mat& img, const fs::path& name, Video& video, int t) {
    const float inv = 1.0f / 255.0f;
    if (img.type() == CV_8UC1) {
        for (int r = 0; r < img.rows; ++r) {
            const std::uint8_t* src = img.ptr<std::uint8_t>(r);
            float* dst = video.samples.data() + video.index(t, r, 0);
            for (int c = 0; c < img.cols; ++c) dst[c] = src[c] * inv;
        }
    } else if (img.type() == CV_8UC3) {
        // OpenCV loads BGR; Rec.601 luma = 0.299 R + 0.587 G + 0.114 B.
        for (int r = 0; r < img.rows; ++r) {
            const cv::Vec3b* src = img.ptr<cv::Vec3b>(r);
            float* dst = video.samples.data() + video.index(t, r, 0);
            for (int c = 0; c < img.cols; ++c)
                dst[c] = (0.299f * src[c][2] + 0.587f * src[c][1] +
                          0.114f * src[c][0]) * inv;
        }
    } else {
        throw IoError("unsupported pixel format (need 8-bit gray or RGB): " +
                      name.string());
    }
}

Video load_frame_dir(const fs::path& dir) {
    const auto files = list_frames(dir, {".png", ".pgm"});
    if (files.empty())
        throw IoError("no PNG/PGM frames in directory: " + dir.string());
    Video video;
    video.frames = static_cast<int>(files.size());
    for (int t = 0; t < video.frames; ++t) {
        cv::Mat img = cv::imread(files[t].string(), cv::IMREAD_UNCHANGED);
        if (img.empty())
            throw IoError("cannot decode frame: " + files[t].string());
        if (t == 0) {
            video.rows = img.rows;
            video.cols = img.cols;
            video.samples.assign(
                static_cast<std::size_t>(video.frames) * img.rows * img.cols, 0.0f);
        } else if (img.rows != video.rows || img.cols != video.cols) {
            std::ostringstream msg;
            msg << "frame dimensions differ: " << files[t].string() << " is "
                << img.rows << "x" << img.cols << ", expected " << video.rows
                << "x" << video.cols;
            throw IoError(msg.str());
        }
        frame_to_luma(img, files[t], video, t);
    }
    return video;
}

Video load_y4m(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open y4m file: " + path.string());
    std::string header;
    if (!std::getline(in, header) || header.rfind("YUV4MPEG2", 0) != 0)
        throw IoError("not a YUV4MPEG2 stream: " + path.string());

    int width = 0, height = 0;
    std::string colorspace = "420";
    std::istringstream hs(header);
    std::string tok;
    hs >> tok; // signature
    while (hs >> tok) {
        if (tok.size() < 2) continue;
        switch (tok[0]) {
            case 'W': width = std::stoi(tok.substr(1)); break;
            case 'H': height = std::stoi(tok.substr(1)); break;
            case 'C': colorspace = tok.substr(1); break;
            default: break; // frame rate, interlacing, aspect: ignored
        }
    }
    if (width <= 0 || height <= 0)
        throw IoError("y4m header missing W/H: " + path.string());

    std::size_t chroma_bytes;
    if (colorspace.rfind("420", 0) == 0)
        chroma_bytes = 2 * static_cast<std::size_t>(width / 2) * (height / 2);
    else if (colorspace.rfind("422", 0) == 0)
        chroma_bytes = 2 * static_cast<std::size_t>(width / 2) * height;
    else if (colorspace.rfind("444", 0) == 0)
        chroma_bytes = 2 * static_cast<std::size_t>(width) * height;
    else if (colorspace.rfind("mono", 0) == 0)
        chroma_bytes = 0;
    else
        throw IoError("unsupported y4m colorspace C" + colorspace + ": " +
                      path.string());

    const std::size_t luma_bytes = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> luma(luma_bytes);
    std::vector<float> samples;
    int frames = 0;
    std::string frame_line;
    while (std::getline(in, frame_line)) {
        if (frame_line.rfind("FRAME", 0) != 0)
            throw IoError("malformed frame marker at frame " +
                          std::to_string(frames) + ": " + path.string());
        in.read(reinterpret_cast<char*>(luma.data()),
                static_cast<std::streamsize>(luma_bytes));
        if (!in)
            throw IoError("truncated luma plane at frame " +
                          std::to_string(frames) + ": " + path.string());
        in.ignore(static_cast<std::streamsize>(chroma_bytes));
        if (!in)
            throw IoError("truncated chroma planes at frame " +
                          std::to_string(frames) + ": " + path.string());
        samples.resize(samples.size() + luma_bytes);
        float* dst = samples.data() + samples.size() - luma_bytes;
        const float inv = 1.0f / 255.0f;
        for (std::size_t i = 0; i < luma_bytes; ++i) dst[i] = luma[i] * inv;
        ++frames;
    }
    if (frames == 0) throw IoError("y4m stream has no frames: " + path.string());
    Video video;
    video.frames = frames;
    video.rows = height;
    video.cols = width;
    video.samples = std::move(samples);
    return video;
}

std::string frame_name(const char* prefix, int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06d.png", prefix, t);
    return buf;
}

} // namespace

Video load_video(const fs::path& path, VideoSource kind) {
    if (!fs::exists(path)) throw IoError("no such path: " + path.string());
    if (kind == VideoSource::Auto)
        kind = fs::is_directory(path) ? VideoSource::FrameDir : VideoSource::Y4M;
    return kind == VideoSource::FrameDir ? load_frame_dir(path) : load_y4m(path);
}

void save_video_frames(const Video& video, const fs::path& dir) {
    fs::create_directories(dir);
    cv::Mat img(video.rows, video.cols, CV_8UC1);
    for (int t = 0; t < video.frames; ++t) {
        for (int r = 0; r < video.rows; ++r) {
            std::uint8_t* dst = img.ptr<std::uint8_t>(r);
            const float* src = video.samples.data() + video.index(t, r, 0);
            for (int c = 0; c < video.cols; ++c) {
                const float v = std::min(1.0f, std::max(0.0f, src[c]));
                dst[c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
            }
        }
        const fs::path out = dir / frame_name("", t);
        if (!cv::imwrite(out.string(), img))
            throw IoError("cannot write frame: " + out.string());
    }
}

void save_mask(const MaskVolume& mask, const fs::path& dir) {
    fs::create_directories(dir);
    cv::Mat img(mask.rows, mask.cols, CV_8UC1);
    for (int t = 0; t < mask.frames; ++t) {
        for (int r = 0; r < mask.rows; ++r) {
            std::uint8_t* dst = img.ptr<std::uint8_t>(r);
            const std::uint8_t* src = mask.bits.data() + mask.index(t, r, 0);
            for (int c = 0; c < mask.cols; ++c) dst[c] = src[c] ? 255 : 0;
        }
        const fs::path out = dir / frame_name("mask_", t);
        if (!cv::imwrite(out.string(), img))
            throw IoError("cannot write mask frame: " + out.string());
    }
}

MaskVolume load_mask(const fs::path& dir) {
    if (!fs::exists(dir)) throw IoError("no such path: " + dir.string());
    const auto files = list_frames(dir, {".png", ".pgm"});
    if (files.empty()) throw IoError("no mask frames in: " + dir.string());
    MaskVolume mask;
    mask.frames = static_cast<int>(files.size());
    for (int t = 0; t < mask.frames; ++t) {
        cv::Mat img = cv::imread(files[t].string(), cv::IMREAD_GRAYSCALE);
        if (img.empty())
            throw IoError("cannot decode mask frame: " + files[t].string());
        if (t == 0) {
            mask.rows = img.rows;
            mask.cols = img.cols;
            mask.bits.assign(static_cast<std::size_t>(mask.frames) * img.rows *
                                 img.cols,
                             0);
        } else if (img.rows != mask.rows || img.cols != mask.cols) {
            throw IoError("mask frame dimensions differ: " + files[t].string());
        }
        for (int r = 0; r < mask.rows; ++r) {
            const std::uint8_t* src = img.ptr<std::uint8_t>(r);
            std::uint8_t* dst = mask.bits.data() + mask.index(t, r, 0);
            for (int c = 0; c < mask.cols; ++c) dst[c] = src[c] >= 128 ? 1 : 0;
        }
    }
    return mask;
}

void save_overlays(const Video& video, const MaskVolume& mask, const fs::path& dir) {
    if (!mask.same_dims(MaskVolume{video.frames, video.rows, video.cols}))
        throw IoError("overlay mask dimensions do not match the video");
    fs::create_directories(dir);
    cv::Mat img(video.rows, video.cols, CV_8UC3);
    for (int t = 0; t < video.frames; ++t) {
        for (int r = 0; r < video.rows; ++r) {
            cv::Vec3b* dst = img.ptr<cv::Vec3b>(r);
            const float* src = video.samples.data() + video.index(t, r, 0);
            const std::uint8_t* m = mask.bits.data() + mask.index(t, r, 0);
            for (int c = 0; c < video.cols; ++c) {
                const float v = std::min(1.0f, std::max(0.0f, src[c]));
                const auto g = static_cast<std::uint8_t>(std::lround(v * 255.0f));
                if (m[c]) {
                    dst[c] = cv::Vec3b(g / 2, g / 2,
                                       static_cast<std::uint8_t>(128 + g / 2));
                } else {
                    dst[c] = cv::Vec3b(g, g, g);
                }
            }
        }
        const fs::path out = dir / frame_name("overlay_", t);
        if (!cv::imwrite(out.string(), img))
            throw IoError("cannot write overlay frame: " + out.string());
    }
}

} // namespace vcmd
