#include "support/oracles.hpp"

#include <cmath>
#include <limits>

namespace oracle {

namespace {

double radial(int n, int m, double rho) {
    // R_{n,m}(rho) = sum_k (-1)^k (n-k)! / (k! ((n+m)/2-k)! ((n-m)/2-k)!) rho^(n-2k)
    auto fact = [](int x) {
        double f = 1;
        while (x > 1) f *= x--;
        return f;
    };
    double acc = 0;
    for (int k = 0; k <= (n - m) / 2; ++k) {
        double term = fact(n - k) /
                      (fact(k) * fact((n + m) / 2 - k) * fact((n - m) / 2 - k));
        if (k & 1) term = -term;
        acc += term * std::pow(rho, n - 2 * k);
    }
    return acc;
}

} // namespace

std::vector<std::complex<double>>
brute_force_moments(const vcmd::Video& video, int t, int r, int c,
                    const std::vector<vcmd::MomentIndex>& moments, int radius) {
    std::vector<std::complex<double>> out(moments.size());
    for (std::size_t mi = 0; mi < moments.size(); ++mi) {
        const int n = moments[mi].n, m = moments[mi].m;
        std::complex<double> raw(0, 0), kernel_sum(0, 0);
        double intensity_sum = 0;
        long count = 0;
        for (int du = -radius; du <= radius; ++du)
            for (int dv = -radius; dv <= radius; ++dv) {
                if (du * du + dv * dv > radius * radius) continue;
                const double rho = std::sqrt(double(du * du + dv * dv)) / radius;
                const double theta = std::atan2(double(du), double(dv));
                const std::complex<double> k =
                    radial(n, m, rho) *
                    std::complex<double>(std::cos(m * theta), -std::sin(m * theta));
                const double pixel = video.at(t, r + du, c + dv);
                raw += pixel * k;
                kernel_sum += k;
                intensity_sum += pixel;
                ++count;
            }
        std::complex<double> value;
        if (n == 0 && m == 0)
            value = raw;
        else
            value = raw - (kernel_sum / double(count)) * intensity_sum;
        out[mi] = value * (std::sqrt(double(n + 1)) / double(count));
    }
    return out;
}

std::vector<double> exhaustive_nnf(const vcmd::FeatureField& src,
                                   const vcmd::FeatureField& tgt,
                                   double min_offset) {
    const double min_sq = min_offset * min_offset;
    std::vector<double> best(src.sites(), std::numeric_limits<double>::infinity());
    for (int t = 0; t < src.frames; ++t)
        for (int r = 0; r < src.rows; ++r)
            for (int c = 0; c < src.cols; ++c) {
                if (!src.is_valid(t, r, c)) continue;
                const int fr = r * src.grid_step, fc = c * src.grid_step;
                const float* a = src.at(t, r, c);
                double b = std::numeric_limits<double>::infinity();
                for (int tt = 0; tt < tgt.frames; ++tt)
                    for (int tr = 0; tr < tgt.rows; ++tr)
                        for (int tc = 0; tc < tgt.cols; ++tc) {
                            if (!tgt.is_valid(tt, tr, tc)) continue;
                            const double n2 = double(tr - fr) * (tr - fr) +
                                              double(tc - fc) * (tc - fc) +
                                              double(tt - t) * (tt - t);
                            if (n2 < min_sq) continue;
                            double d = 0;
                            const float* bb = tgt.at(tt, tr, tc);
                            for (int k = 0; k < src.feature_len; ++k) {
                                const double e = double(a[k]) - double(bb[k]);
                                d += e * e;
                            }
                            if (d < b) b = d;
                        }
                best[src.site_index(t, r, c)] = b;
            }
    return best;
}

vcmd::Video rotate_frame(const vcmd::Video& video, int t, double center_r,
                         double center_c, double degrees) {
    const double theta = degrees * 3.14159265358979323846 / 180.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    vcmd::Video out(1, video.rows, video.cols);
    for (int r = 0; r < video.rows; ++r)
        for (int c = 0; c < video.cols; ++c) {
            // Destination pixel pulls from the inverse-rotated source spot.
            const double lr = r - center_r, lc = c - center_c;
            const double sr = ct * lr + st * lc + center_r;
            const double sc = -st * lr + ct * lc + center_c;
            const int r0 = static_cast<int>(std::floor(sr));
            const int c0 = static_cast<int>(std::floor(sc));
            const double fr = sr - r0, fc = sc - c0;
            auto sample = [&](int rr, int cc) {
                rr = std::clamp(rr, 0, video.rows - 1);
                cc = std::clamp(cc, 0, video.cols - 1);
                return double(video.at(t, rr, cc));
            };
            const double v =
                (1 - fr) * ((1 - fc) * sample(r0, c0) + fc * sample(r0, c0 + 1)) +
                fr * ((1 - fc) * sample(r0 + 1, c0) + fc * sample(r0 + 1, c0 + 1));
            out.at(0, r, c) = static_cast<float>(v);
        }
    return out;
}

} // namespace oracle
