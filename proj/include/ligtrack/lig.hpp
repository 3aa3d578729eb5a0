#pragma once

#include <cstdint>
#include <vector>

#include "ligtrack/core.hpp"

namespace ligtrack {

struct LigParams {
    int patch_size = 7;   // k, odd
    int center_size = 3;  // c, odd, < k
    int sector_count = 8; // angular sectors for the gradient test
    double top_fraction = 1e-4;

    void validate() const;
};

/// Per-pixel intensity-gradient response map. Values within floor(k/2) of a
/// border are exactly 0.
struct IgMap {
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major, all >= 0

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // row-major, 0 or 1

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const;
};

BinaryMask make_mask(int width, int height);

/// Center-minus-ring contrast of one k-by-k window:
/// max(0, mean of the central c-by-c cell - mean of the remaining ring).
/// `window` is row-major with k*k entries.
double local_intensity(const std::vector<double>& window, int patch_size, int center_size);

/// Inward-gradient measure of one k-by-k window. Every non-center pixel gets
/// a central-difference gradient (clamped at window borders); its inwardness
/// is the positive part of the projection onto the unit vector toward the
/// window center. Pixels are binned into `sector_count` angular sectors by
/// bearing from the center and the minimum sector mean is returned, so a
/// one-sided edge (empty inward flow in some direction) scores 0.
double local_gradient(const std::vector<double>& window, int patch_size, int sector_count);

/// IG(p) = local_intensity(window at p) * local_gradient(window at p) for
/// every pixel at least floor(k/2) away from the borders; the border band is
/// 0. Rows are split across `workers` threads; the result is bit-identical
/// for every worker count.
IgMap compute_ig_map(const Frame& frame, const LigParams& params, int workers = 1);

/// The m = max(1, round(top_fraction * width * height)) largest map values,
/// sorted descending. This is the population the adaptive threshold averages.
std::vector<double> top_values(const IgMap& ig, double top_fraction);

/// Mean of top_values(ig, top_fraction). An all-zero map yields 0.
double adaptive_threshold(const IgMap& ig, double top_fraction);

/// Bit set iff IG(p) >= threshold and IG(p) > 0.
BinaryMask binarize(const IgMap& ig, double threshold);

} // namespace ligtrack
