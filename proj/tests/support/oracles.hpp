#pragma once

// Independent reference implementations used to validate the library.
// Everything here is written from the operation definitions, sharing no
// code with the implementation paths it checks.

#include <complex>
#include <vector>

#include "vcmd/patchmatch.hpp"
#include "vcmd/types.hpp"
#include "vcmd/zernike.hpp"

namespace oracle {

/// Direct double-loop Zernike moments of the disc patch centered on (r,c):
/// plain summation with its own radial-polynomial evaluation, constant
/// orthogonalization and sqrt(n+1)/count scaling.
std::vector<std::complex<double>>
brute_force_moments(const vcmd::Video& video, int t, int r, int c,
                    const std::vector<vcmd::MomentIndex>& moments, int radius);

/// Exhaustive nearest-neighbor search under the same admissibility rule as
/// the matcher (valid target, in bounds, norm >= min_offset). Returns the
/// optimal squared distance per source site, or infinity when unmatchable.
std::vector<double> exhaustive_nnf(const vcmd::FeatureField& src,
                                   const vcmd::FeatureField& tgt,
                                   double min_offset);

/// Bilinear rotation of one frame about (center_r, center_c); pixels
/// sampling outside the frame clamp to the border.
vcmd::Video rotate_frame(const vcmd::Video& video, int t, double center_r,
                         double center_c, double degrees);

} // namespace oracle
