#include "ligtrack/upsample.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace ligtrack {
namespace {

struct Tap {
    int idx[4];
    double w[4]; // w[3] is forced so the four weights sum to exactly 1
};

// One tap per output coordinate along an axis of `src_n` samples.
std::vector<Tap> make_taps(int src_n, int dst_n, int factor, const BicubicKernel& kernel) {
    std::vector<Tap> taps(static_cast<std::size_t>(dst_n));
    for (int d = 0; d < dst_n; ++d) {
        double s = (d + 0.5) / factor - 0.5;
        double base = std::floor(s);
        double frac = s - base;
        int i0 = static_cast<int>(base) - 1;
        Tap& t = taps[static_cast<std::size_t>(d)];
        for (int j = 0; j < 4; ++j)
            t.idx[j] = std::clamp(i0 + j, 0, src_n - 1);
        t.w[0] = kernel.weight(frac + 1.0);
        t.w[1] = kernel.weight(frac);
        t.w[2] = kernel.weight(frac - 1.0);
        // Exact partition of unity, so constant inputs reproduce bit-exactly
        // via the difference-form evaluation below.
        t.w[3] = 1.0 - (t.w[0] + t.w[1] + t.w[2]);
    }
    return taps;
}

inline double apply_tap(const Tap& t, const double* line, std::size_t stride) {
    double p0 = line[static_cast<std::size_t>(t.idx[0]) * stride];
    double p1 = line[static_cast<std::size_t>(t.idx[1]) * stride];
    double p2 = line[static_cast<std::size_t>(t.idx[2]) * stride];
    double p3 = line[static_cast<std::size_t>(t.idx[3]) * stride];
    // p1 + sum of weighted differences: zero differences leave p1 untouched.
    return p1 + (t.w[0] * (p0 - p1) + t.w[2] * (p2 - p1) + t.w[3] * (p3 - p1));
}

} // namespace

Frame bicubic_upsample(const Frame& frame, int factor, BicubicKernel kernel) {
    frame.validate();
    if (factor != 2 && factor != 4)
        throw std::invalid_argument("upsample factor must be 2 or 4");

    const int sw = frame.width, sh = frame.height;
    const int dw = sw * factor, dh = sh * factor;
    const auto col_taps = make_taps(sw, dw, factor, kernel);
    const auto row_taps = make_taps(sh, dh, factor, kernel);

    // Horizontal pass: sh rows of dw samples, unclamped doubles.
    std::vector<double> mid(static_cast<std::size_t>(sh) * dw);
    for (int y = 0; y < sh; ++y) {
        const double* src_row = frame.pixels.data() + static_cast<std::size_t>(y) * sw;
        double* mid_row = mid.data() + static_cast<std::size_t>(y) * dw;
        for (int x = 0; x < dw; ++x)
            mid_row[x] = apply_tap(col_taps[static_cast<std::size_t>(x)], src_row, 1);
    }

    Frame out;
    out.width = dw;
    out.height = dh;
    out.index = frame.index;
    out.source_depth = frame.source_depth;
    out.pixels.resize(static_cast<std::size_t>(dw) * dh);

    // Vertical pass over the intermediate, clamping to [0,1] at the end.
    for (int y = 0; y < dh; ++y) {
        const Tap& t = row_taps[static_cast<std::size_t>(y)];
        double* dst_row = out.pixels.data() + static_cast<std::size_t>(y) * dw;
        for (int x = 0; x < dw; ++x) {
            double v = apply_tap(t, mid.data() + x, static_cast<std::size_t>(dw));
            dst_row[x] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

} // namespace ligtrack
