#include <doctest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "vcmd/forgegen.hpp"
#include "vcmd/postproc.hpp"

using namespace vcmd;

namespace {

ForgerySpec cylinder_spec(double cr, double cc, double radius, int t0, int t1,
                          int dr, int dc, int dt = 0) {
    ForgerySpec spec;
    spec.source.shape = RegionShape::Cylinder;
    spec.source.center_r = cr;
    spec.source.center_c = cc;
    spec.source.radius = radius;
    spec.source.t_begin = t0;
    spec.source.t_end = t1;
    spec.dr = dr;
    spec.dc = dc;
    spec.dt = dt;
    return spec;
}

} // namespace

TEST_SUITE_BEGIN("forgegen");

TEST_CASE("rigid translation copies exactly outside the feather ring") {
    const Video v =
        synth_texture(8, 80, 100, TextureKind::GaussianBlurNoise, 3, 1.5);
    const ForgerySpec spec = cylinder_spec(30, 30, 15, 1, 6, 30, 50);
    const ForgeryResult result = apply_copy_move(v, spec);
    for (int t = 1; t <= 6; ++t)
        for (int r = 0; r < 80; ++r)
            for (int c = 0; c < 100; ++c) {
                const double dist =
                    std::hypot(r - 60.0, c - 80.0); // destination center
                if (dist <= 15.0 - 2.0) {
                    // fully inside: exact copy of the displaced source
                    CHECK(result.forged.at(t, r, c) == v.at(t, r - 30, c - 50));
                } else if (dist > 15.0) {
                    CHECK(result.forged.at(t, r, c) == v.at(t, r, c));
                }
            }
}

TEST_CASE("temporal flip reverses the source frame order") {
    const Video v =
        synth_texture(10, 60, 60, TextureKind::GaussianBlurNoise, 5, 1.5);
    ForgerySpec spec = cylinder_spec(25, 20, 10, 2, 7, 0, 28);
    spec.temporal_flip = true;
    const ForgeryResult result = apply_copy_move(v, spec);
    for (int k = 0; k <= 5; ++k)
        for (int r = 18; r <= 32; ++r)
            for (int c = 41; c <= 55; ++c) {
                const double dist = std::hypot(r - 25.0, c - 48.0);
                if (dist > 10.0 - 2.0) continue;
                CHECK(result.forged.at(2 + k, r, c) == v.at(7 - k, r, c - 28));
            }
}

TEST_CASE("45-degree rotation matches the independent rotation oracle") {
    const Video v =
        synth_texture(3, 90, 90, TextureKind::GaussianBlurNoise, 7, 1.5);
    ForgerySpec spec = cylinder_spec(30, 30, 14, 1, 1, 25, 30);
    spec.rotation_deg = 45.0;
    spec.feather = 0.0;
    const ForgeryResult result = apply_copy_move(v, spec);

    // oracle: rotate the whole frame by 45 degrees about the source center,
    // then read the translated disc
    const Video rotated = oracle::rotate_frame(v, 1, 30, 30, 45.0);
    for (int r = 45; r <= 65; ++r)
        for (int c = 50; c <= 70; ++c) {
            const double dist = std::hypot(r - 55.0, c - 60.0);
            if (dist > 13.0) continue;
            CHECK(std::abs(result.forged.at(1, r, c) -
                           rotated.at(0, r - 25, c - 30)) <= 1e-6);
        }
}

TEST_CASE("ground truth marks both regions as two components") {
    const Video v =
        synth_texture(6, 70, 90, TextureKind::GaussianBlurNoise, 11, 1.5);
    const ForgerySpec spec = cylinder_spec(30, 25, 12, 1, 4, 10, 45);
    const ForgeryResult result = apply_copy_move(v, spec);
    const RegionLabeling labeling = label_regions(result.gt);
    CHECK(labeling.regions.size() == 2);

    SUBCASE("destination-only ground truth has one component") {
        ForgerySpec d = spec;
        d.gt_destination_only = true;
        const ForgeryResult r2 = apply_copy_move(v, d);
        CHECK(label_regions(r2.gt).regions.size() == 1);
    }
}

TEST_CASE("forgery stats match the spec geometry") {
    const Video v =
        synth_texture(10, 80, 80, TextureKind::GaussianBlurNoise, 13, 1.5);
    const ForgerySpec spec = cylinder_spec(35, 25, 14, 2, 8, 5, 40);
    const ForgeryResult result = apply_copy_move(v, spec);
    CHECK(result.d_max <= 7);              // frame-span length
    CHECK(result.d_max == 7);              // static cylinder: exactly the span
    CHECK(std::abs(result.rho_max - 14.0) <= 1.0);
}

TEST_CASE("occlusive copy leaves no seam beyond the feather bound") {
    // smooth substrate; the blend can only add |src-dst|/feather per pixel
    const Video v =
        synth_texture(4, 80, 80, TextureKind::GaussianBlurNoise, 17, 2.0);
    ForgerySpec spec = cylinder_spec(30, 30, 12, 1, 2, 20, 20);
    spec.kind = ForgeryKind::Occlusive;
    const ForgeryResult result = apply_copy_move(v, spec);

    double max_grad_src = 0, max_grad_forged = 0, max_diff = 0;
    for (int t = 1; t <= 2; ++t)
        for (int r = 1; r < 79; ++r)
            for (int c = 1; c < 79; ++c) {
                const double gsrc = std::max(
                    std::abs(v.at(t, r, c) - v.at(t, r - 1, c)),
                    std::abs(v.at(t, r, c) - v.at(t, r, c - 1)));
                const double gfor = std::max(
                    std::abs(result.forged.at(t, r, c) -
                             result.forged.at(t, r - 1, c)),
                    std::abs(result.forged.at(t, r, c) -
                             result.forged.at(t, r, c - 1)));
                max_grad_src = std::max(max_grad_src, gsrc);
                max_grad_forged = std::max(max_grad_forged, gfor);
                // copied-vs-covered contrast inside the destination disc
                if (std::hypot(r - 50.0, c - 50.0) <= 12.5)
                    max_diff = std::max(
                        max_diff, std::abs(double(v.at(t, r, c)) -
                                           v.at(t, r - 20, c - 20)));
            }
    CHECK(max_grad_forged <=
          2 * max_grad_src + max_diff / spec.feather + 1e-9);
}

TEST_CASE("out-of-bounds specs are rejected") {
    const Video v =
        synth_texture(5, 40, 40, TextureKind::GaussianBlurNoise, 19, 1.5);
    CHECK_THROWS_AS(apply_copy_move(v, cylinder_spec(20, 20, 10, 1, 3, 15, 0)),
                    ConfigError);
    CHECK_THROWS_AS(apply_copy_move(v, cylinder_spec(20, 20, 10, 3, 6, 0, 0, 3)),
                    ConfigError);
    CHECK_THROWS_AS(apply_copy_move(v, cylinder_spec(20, 20, 25, 1, 3, 0, 0)),
                    ConfigError);
}

TEST_CASE("synthetic textures") {
    SUBCASE("deterministic under seed") {
        const Video a =
            synth_texture(3, 32, 32, TextureKind::GaussianBlurNoise, 23, 1.5);
        const Video b =
            synth_texture(3, 32, 32, TextureKind::GaussianBlurNoise, 23, 1.5);
        CHECK(a.samples == b.samples);
        const Video c =
            synth_texture(3, 32, 32, TextureKind::GaussianBlurNoise, 24, 1.5);
        CHECK(a.samples != c.samples);
    }
    SUBCASE("gradient formula") {
        const Video g = synth_texture(3, 4, 5, TextureKind::Gradient, 0);
        for (int t = 0; t < 3; ++t)
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 5; ++c)
                    CHECK(g.at(t, r, c) ==
                          doctest::Approx((t + r + c) / 9.0).epsilon(1e-6));
    }
    SUBCASE("tiles are deterministic and tile-constant") {
        const Video t1 = synth_texture(2, 48, 48, TextureKind::Tiles, 31);
        const Video t2 = synth_texture(2, 48, 48, TextureKind::Tiles, 31);
        CHECK(t1.samples == t2.samples);
        CHECK(t1.at(0, 0, 0) == t1.at(0, 15, 15));
        CHECK(t1.at(0, 0, 0) == t1.at(1, 3, 3));
    }
    SUBCASE("blur-noise autocorrelation follows the Gaussian model") {
        // normalized autocorrelation of sigma-blurred white noise at lag d
        // is exp(-d^2 / (4 sigma^2)); validated by direct correlation
        const double sigma = 1.5;
        const Video v = synth_texture(1, 160, 160, TextureKind::GaussianBlurNoise,
                                      37, sigma);
        double mean = 0;
        for (float s : v.samples) mean += s;
        mean /= double(v.samples.size());
        const auto corr = [&](int lag) {
            double num = 0, den = 0;
            for (int r = 0; r < 160; ++r)
                for (int c = 0; c < 160 - lag; ++c) {
                    num += (v.at(0, r, c) - mean) * (v.at(0, r, c + lag) - mean);
                    den += (v.at(0, r, c) - mean) * (v.at(0, r, c) - mean);
                }
            return num / den;
        };
        for (int lag = 1; lag <= 3; ++lag) {
            const double want = std::exp(-lag * lag / (4.0 * sigma * sigma));
            CHECK(std::abs(corr(lag) - want) < 0.08);
        }
    }
}

TEST_CASE("degradations") {
    const Video v =
        synth_texture(3, 48, 48, TextureKind::GaussianBlurNoise, 41, 1.5);
    SUBCASE("zero-sigma noise is the identity") {
        const Video out = degrade_gaussian_noise(v, 0.0, 1);
        CHECK(out.samples == v.samples);
    }
    SUBCASE("noise sigma is honored within 10%") {
        Video mid(4, 64, 64, 0.5f);
        const Video out = degrade_gaussian_noise(mid, 0.02, 7);
        double var = 0;
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            const double d = double(out.samples[i]) - 0.5;
            var += d * d;
        }
        const double std_dev = std::sqrt(var / double(out.samples.size()));
        CHECK(std_dev == doctest::Approx(0.02).epsilon(0.10));
    }
    SUBCASE("q=100 jpeg on mid-gray deviates at most 2/255") {
        Video mid(2, 32, 32, 128.0f / 255.0f);
        const Video out = degrade_jpeg(mid, 100);
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            CHECK(std::abs(out.samples[i] - mid.samples[i]) <= 2.0f / 255.0f);
    }
    SUBCASE("jpeg stays in range and is deterministic") {
        const Video a = degrade_jpeg(v, 50);
        const Video b = degrade_jpeg(v, 50);
        CHECK(a.samples == b.samples);
        for (float s : a.samples) {
            CHECK(s >= 0.0f);
            CHECK(s <= 1.0f);
        }
    }
}

TEST_CASE("forgery spec JSON round-trip") {
    ForgerySpec spec = cylinder_spec(30.5, 40.25, 12, 2, 9, 15, -20, 1);
    spec.rotation_deg = 25;
    spec.temporal_flip = true;
    spec.kind = ForgeryKind::Occlusive;
    spec.feather = 3.5;
    const ForgerySpec back = ForgerySpec::from_json_text(spec.to_json());
    CHECK(back.source.center_r == spec.source.center_r);
    CHECK(back.source.center_c == spec.source.center_c);
    CHECK(back.source.radius == spec.source.radius);
    CHECK(back.source.t_begin == spec.source.t_begin);
    CHECK(back.source.t_end == spec.source.t_end);
    CHECK(back.dr == spec.dr);
    CHECK(back.dc == spec.dc);
    CHECK(back.dt == spec.dt);
    CHECK(back.rotation_deg == spec.rotation_deg);
    CHECK(back.temporal_flip == spec.temporal_flip);
    CHECK((back.kind == spec.kind));
    CHECK(back.feather == spec.feather);

    CHECK_THROWS_AS(ForgerySpec::from_json_text("{ not json"), ConfigError);
    CHECK_THROWS_AS(ForgerySpec::from_json_text("{}"), ConfigError);
}

TEST_SUITE_END();
