#pragma once

#include <cmath>

#include "ligtrack/core.hpp"

namespace ligtrack {

/// Cubic convolution kernel (Keys family). a = -0.5 gives the Catmull-Rom
/// style kernel used by default. Weights over any sample phase sum to 1.
struct BicubicKernel {
    double a = -0.5;

    double weight(double t) const {
        t = std::abs(t);
        if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
        if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
        return 0.0;
    }
};

/// 16-neighbor cubic-convolution upsampling by an integer factor of 2 or 4.
///
/// Output samples use the pixel-center mapping src = (dst + 0.5)/factor - 0.5,
/// samples outside the image are edge-replicated, and the result is clamped
/// to [0,1]. Implemented separably (rows then columns) with double
/// intermediates; a constant image upsamples to exactly the same constant.
Frame bicubic_upsample(const Frame& frame, int factor, BicubicKernel kernel = {});

} // namespace ligtrack
