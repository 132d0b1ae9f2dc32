#include "vcmd/zernike.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "vcmd/parallel.hpp"

namespace vcmd {

namespace {

constexpr std::uint32_t kFeatureMagic = 0x56434646; // "VCFF"

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Disc support with per-moment complex weights. Weights are already
// corrected so that a plain dot product against patch intensities yields
// the final moment: each kernel except (0,0) is orthogonalized against the
// discrete constant, scaled by sqrt(n+1), and divided by the pixel count.
struct KernelTable {
    int radius = 0;
    int count = 0;
    std::vector<int> dr, dc;
    std::vector<std::vector<std::complex<double>>> weights; // [moment][pixel]
};

KernelTable build_kernel_table(const std::vector<MomentIndex>& moments, int radius) {
    KernelTable kt;
    kt.radius = radius;
    for (int u = -radius; u <= radius; ++u)
        for (int v = -radius; v <= radius; ++v)
            if (u * u + v * v <= radius * radius) {
                kt.dr.push_back(u);
                kt.dc.push_back(v);
            }
    kt.count = static_cast<int>(kt.dr.size());
    kt.weights.resize(moments.size());
    for (std::size_t mi = 0; mi < moments.size(); ++mi) {
        const auto& idx = moments[mi];
        if (!valid_moment_index(idx))
            throw ConfigError("invalid Zernike order (n=" + std::to_string(idx.n) +
                              ", m=" + std::to_string(idx.m) + ")");
        auto& w = kt.weights[mi];
        w.resize(kt.count);
        std::complex<double> mean(0.0, 0.0);
        for (int i = 0; i < kt.count; ++i) {
            const double rho =
                std::sqrt(double(kt.dr[i]) * kt.dr[i] + double(kt.dc[i]) * kt.dc[i]) / radius;
            const double theta = std::atan2(double(kt.dr[i]), double(kt.dc[i]));
            const double rad = radial_polynomial(idx.n, idx.m, rho);
            w[i] = std::complex<double>(rad * std::cos(idx.m * theta),
                                        -rad * std::sin(idx.m * theta));
            mean += w[i];
        }
        mean /= double(kt.count);
        const bool is_dc = (idx.n == 0 && idx.m == 0);
        const double scale = std::sqrt(double(idx.n + 1)) / kt.count;
        for (int i = 0; i < kt.count; ++i) {
            if (!is_dc) w[i] -= mean;
            w[i] *= scale;
        }
    }
    return kt;
}

// FFTW planning is not thread safe; executions on distinct buffers are.
std::mutex g_fftw_mutex;

struct FftPlans {
    int rows = 0, cols = 0;
    fftw_plan fwd = nullptr, bwd = nullptr;
    fftw_complex* probe_in = nullptr;
    fftw_complex* probe_out = nullptr;

    FftPlans(int h, int w) : rows(h), cols(w) {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        probe_in = fftw_alloc_complex(static_cast<std::size_t>(h) * w);
        probe_out = fftw_alloc_complex(static_cast<std::size_t>(h) * w);
        fwd = fftw_plan_dft_2d(h, w, probe_in, probe_out, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(h, w, probe_in, probe_out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlans() {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(probe_in);
        fftw_free(probe_out);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
};

// Frequency-domain kernels, one per moment, with the 1/(H*W) inverse-FFT
// normalization folded in. Correlation is expressed as a circular
// convolution by placing weight (dr,dc) at index (-dr mod H, -dc mod W);
// wrap-around only corrupts border sites, which are invalid anyway.
std::vector<std::vector<std::complex<double>>>
kernel_spectra(const KernelTable& kt, const FftPlans& plans) {
    const int h = plans.rows, w = plans.cols;
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<std::vector<std::complex<double>>> spectra(kt.weights.size());
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    for (std::size_t mi = 0; mi < kt.weights.size(); ++mi) {
        std::memset(in, 0, sizeof(fftw_complex) * n);
        for (int i = 0; i < kt.count; ++i) {
            const int rr = ((-kt.dr[i]) % h + h) % h;
            const int cc = ((-kt.dc[i]) % w + w) % w;
            in[static_cast<std::size_t>(rr) * w + cc][0] = kt.weights[mi][i].real();
            in[static_cast<std::size_t>(rr) * w + cc][1] = kt.weights[mi][i].imag();
        }
        fftw_execute_dft(plans.fwd, in, out);
        auto& s = spectra[mi];
        s.resize(n);
        const double norm = 1.0 / double(n);
        for (std::size_t k = 0; k < n; ++k)
            s[k] = std::complex<double>(out[k][0] * norm, out[k][1] * norm);
    }
    fftw_free(in);
    fftw_free(out);
    return spectra;
}

// Complex moment planes for one frame: planes[moment][r*cols+c].
// The plans were created out-of-place, so every execute call below keeps
// distinct input/output arrays.
void moment_planes_for_frame(const Video& video, int t, const FftPlans& plans,
                             const std::vector<std::vector<std::complex<double>>>& spectra,
                             fftw_complex* buf_a, fftw_complex* buf_b,
                             fftw_complex* buf_c,
                             std::vector<std::complex<double>>* planes) {
    const int h = video.rows, w = video.cols;
    const std::size_t n = static_cast<std::size_t>(h) * w;
    const float* frame = video.samples.data() + video.index(t, 0, 0);
    for (std::size_t k = 0; k < n; ++k) {
        buf_a[k][0] = frame[k];
        buf_a[k][1] = 0.0;
    }
    fftw_execute_dft(plans.fwd, buf_a, buf_b); // buf_b = frame spectrum
    for (std::size_t mi = 0; mi < spectra.size(); ++mi) {
        const auto& s = spectra[mi];
        for (std::size_t k = 0; k < n; ++k) {
            const double re = buf_b[k][0] * s[k].real() - buf_b[k][1] * s[k].imag();
            const double im = buf_b[k][0] * s[k].imag() + buf_b[k][1] * s[k].real();
            buf_a[k][0] = re;
            buf_a[k][1] = im;
        }
        fftw_execute_dft(plans.bwd, buf_a, buf_c);
        auto* dst = planes[mi].data();
        for (std::size_t k = 0; k < n; ++k)
            dst[k] = std::complex<double>(buf_c[k][0], buf_c[k][1]);
    }
}

} // namespace

bool valid_moment_index(const MomentIndex& idx) {
    return idx.n >= 0 && idx.m >= 0 && idx.m <= idx.n && (idx.n - idx.m) % 2 == 0;
}

double radial_polynomial(int n, int m, double rho) {
    if (!valid_moment_index({n, m}))
        throw ConfigError("invalid Zernike order (n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
    double value = 0.0;
    const int kmax = (n - m) / 2;
    for (int k = 0; k <= kmax; ++k) {
        const double coef = factorial(n - k) /
                            (factorial(k) * factorial((n + m) / 2 - k) *
                             factorial((n - m) / 2 - k));
        value += (k % 2 == 0 ? coef : -coef) * std::pow(rho, n - 2 * k);
    }
    return value;
}

const std::vector<MomentIndex>& default_moments_2d() {
    static const std::vector<MomentIndex> set = {
        {0, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1}, {3, 3},
        {4, 0}, {4, 2}, {4, 4}, {5, 1}, {5, 3}, {5, 5}};
    return set;
}

const std::vector<MomentIndex>& default_moments_3d() {
    static const std::vector<MomentIndex> set = {
        {0, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1}, {3, 3}};
    return set;
}

std::vector<std::complex<double>>
compute_moments(const Video& video, int t, int r, int c,
                const std::vector<MomentIndex>& moments, int patch_radius) {
    if (r - patch_radius < 0 || r + patch_radius >= video.rows ||
        c - patch_radius < 0 || c + patch_radius >= video.cols ||
        t < 0 || t >= video.frames)
        throw std::out_of_range("patch support leaves the video");
    const KernelTable kt = build_kernel_table(moments, patch_radius);
    std::vector<double> patch(kt.count);
    for (int i = 0; i < kt.count; ++i)
        patch[i] = video.at(t, r + kt.dr[i], c + kt.dc[i]);
    std::vector<std::complex<double>> out(moments.size());
    for (std::size_t mi = 0; mi < moments.size(); ++mi) {
        std::complex<double> acc(0.0, 0.0);
        const auto& w = kt.weights[mi];
        for (int i = 0; i < kt.count; ++i) acc += patch[i] * w[i];
        out[mi] = acc;
    }
    return out;
}

std::vector<float> feature_2d(const std::vector<std::complex<double>>& moments) {
    std::vector<float> f(moments.size());
    for (std::size_t i = 0; i < moments.size(); ++i)
        f[i] = static_cast<float>(std::abs(moments[i]));
    return f;
}

std::vector<float> feature_3d_flip_invariant(
    const std::vector<std::vector<std::complex<double>>>& stack) {
    const int span = static_cast<int>(stack.size());
    if (span < 1 || span % 2 == 0)
        throw ConfigError("flip-invariant stack needs an odd number of frames");
    const int half = span / 2;
    const std::size_t nm = stack[0].size();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<float> out(nm * span);
    for (int tau = -half; tau <= half; ++tau) {
        const auto& fwd = stack[half + tau];
        const auto& rev = stack[half - tau];
        float* dst = out.data() + static_cast<std::size_t>(tau + half) * nm;
        for (std::size_t k = 0; k < nm; ++k) {
            double v;
            if (tau > 0)
                v = inv_sqrt2 * std::abs(fwd[k] + rev[k]);
            else if (tau < 0)
                v = inv_sqrt2 * std::abs(fwd[k] - rev[k]);
            else
                v = std::abs(fwd[k]);
            dst[k] = static_cast<float>(v);
        }
    }
    return out;
}

FeatureField extract_field(const Video& video, const FeatureConfig& cfg, int threads) {
    const int radius = cfg.patch_radius;
    if (video.rows < 2 * radius + 1 || video.cols < 2 * radius + 1)
        throw ConfigError("video smaller than one patch (radius " +
                          std::to_string(radius) + ")");
    const int half = cfg.mode == FeatureMode::ThreeD_FI ? cfg.temporal_half_extent : 0;
    if (video.frames < 2 * half + 1)
        throw ConfigError("video shorter than the temporal patch extent");

    const auto& moments = cfg.active_moments();
    const int nm = static_cast<int>(moments.size());

    FeatureField field;
    field.level = 0;
    field.grid_step = 1;
    field.frames = video.frames;
    field.rows = video.rows;
    field.cols = video.cols;
    field.feature_len = cfg.feature_length();
    field.vectors.assign(field.sites() * field.feature_len, 0.0f);
    field.valid.assign(field.sites(), 0);
    for (int t = half; t < video.frames - half; ++t)
        for (int r = radius; r < video.rows - radius; ++r) {
            auto* row = field.valid.data() + field.site_index(t, r, 0);
            std::fill(row + radius, row + video.cols - radius, std::uint8_t{1});
        }

    const KernelTable kt = build_kernel_table(moments, radius);
    const FftPlans plans(video.rows, video.cols);
    const auto spectra = kernel_spectra(kt, plans);
    const std::size_t plane_px = static_cast<std::size_t>(video.rows) * video.cols;

    if (cfg.mode == FeatureMode::TwoD) {
        parallel_for(video.frames, threads, [&](std::int64_t tb, std::int64_t te) {
            fftw_complex* a = fftw_alloc_complex(plane_px);
            fftw_complex* b = fftw_alloc_complex(plane_px);
            fftw_complex* c2 = fftw_alloc_complex(plane_px);
            std::vector<std::vector<std::complex<double>>> planes(
                nm, std::vector<std::complex<double>>(plane_px));
            for (std::int64_t t = tb; t < te; ++t) {
                moment_planes_for_frame(video, static_cast<int>(t), plans, spectra,
                                        a, b, c2, planes.data());
                for (int r = radius; r < video.rows - radius; ++r)
                    for (int c = radius; c < video.cols - radius; ++c) {
                        float* dst = field.vectors.data() +
                                     field.site_index(static_cast<int>(t), r, c) * nm;
                        const std::size_t px = static_cast<std::size_t>(r) * video.cols + c;
                        for (int k = 0; k < nm; ++k)
                            dst[k] = static_cast<float>(std::abs(planes[k][px]));
                    }
            }
            fftw_free(a);
            fftw_free(b);
            fftw_free(c2);
        });
        return field;
    }

    // 3D flip-invariant mode: process output frames in chunks; each chunk
    // recomputes the 2*half overlapping moment planes it needs.
    const int span = 2 * half + 1;
    const int chunk = std::max(4 * std::max(threads, 1), span);
    for (int t0 = half; t0 < video.frames - half; t0 += chunk) {
        const int t1 = std::min(t0 + chunk, video.frames - half); // output frames [t0,t1)
        const int p0 = t0 - half, p1 = t1 + half;                 // planes [p0,p1)
        std::vector<std::vector<std::vector<std::complex<double>>>> planes(
            p1 - p0, std::vector<std::vector<std::complex<double>>>(
                         nm, std::vector<std::complex<double>>(plane_px)));
        parallel_for(p1 - p0, threads, [&](std::int64_t pb, std::int64_t pe) {
            fftw_complex* a = fftw_alloc_complex(plane_px);
            fftw_complex* b = fftw_alloc_complex(plane_px);
            fftw_complex* c2 = fftw_alloc_complex(plane_px);
            for (std::int64_t p = pb; p < pe; ++p)
                moment_planes_for_frame(video, static_cast<int>(p0 + p), plans,
                                        spectra, a, b, c2, planes[p].data());
            fftw_free(a);
            fftw_free(b);
            fftw_free(c2);
        });
        parallel_for(t1 - t0, threads, [&](std::int64_t ob, std::int64_t oe) {
            const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
            for (std::int64_t o = ob; o < oe; ++o) {
                const int t = t0 + static_cast<int>(o);
                for (int r = radius; r < video.rows - radius; ++r)
                    for (int c = radius; c < video.cols - radius; ++c) {
                        const std::size_t px =
                            static_cast<std::size_t>(r) * video.cols + c;
                        float* dst = field.vectors.data() +
                                     field.site_index(t, r, c) * field.feature_len;
                        for (int tau = -half; tau <= half; ++tau) {
                            const auto& f = planes[t + tau - p0];
                            const auto& g = planes[t - tau - p0];
                            float* e = dst + static_cast<std::size_t>(tau + half) * nm;
                            for (int k = 0; k < nm; ++k) {
                                double v;
                                if (tau > 0)
                                    v = inv_sqrt2 * std::abs(f[k][px] + g[k][px]);
                                else if (tau < 0)
                                    v = inv_sqrt2 * std::abs(f[k][px] - g[k][px]);
                                else
                                    v = std::abs(f[k][px]);
                                e[k] = static_cast<float>(v);
                            }
                        }
                    }
            }
        });
    }
    return field;
}

void save_feature_field(const FeatureField& field, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write feature field: " + path.string());
    const std::uint32_t header[6] = {
        kFeatureMagic,
        static_cast<std::uint32_t>(field.level),
        static_cast<std::uint32_t>(field.frames),
        static_cast<std::uint32_t>(field.rows),
        static_cast<std::uint32_t>(field.cols),
        static_cast<std::uint32_t>(field.feature_len)};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(field.vectors.data()),
              static_cast<std::streamsize>(field.vectors.size() * sizeof(float)));
    if (!out) throw IoError("short write: " + path.string());
}

FeatureField load_feature_field(const std::filesystem::path& path, int stride) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read feature field: " + path.string());
    std::uint32_t header[6];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || header[0] != kFeatureMagic)
        throw IoError("not a feature field dump: " + path.string());
    FeatureField field;
    field.level = static_cast<int>(header[1]);
    field.frames = static_cast<int>(header[2]);
    field.rows = static_cast<int>(header[3]);
    field.cols = static_cast<int>(header[4]);
    field.feature_len = static_cast<int>(header[5]);
    field.grid_step = 1;
    for (int l = 0; l < field.level; ++l) field.grid_step *= stride;
    field.vectors.resize(field.sites() * field.feature_len);
    in.read(reinterpret_cast<char*>(field.vectors.data()),
            static_cast<std::streamsize>(field.vectors.size() * sizeof(float)));
    if (!in) throw IoError("truncated feature field dump: " + path.string());
    field.valid.assign(field.sites(), 1);
    return field;
}

} // namespace vcmd
