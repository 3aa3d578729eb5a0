#include "ligtrack/lig.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace ligtrack {
namespace {

void check_window(const std::vector<double>& window, int k) {
    if (k < 3 || k % 2 == 0) throw std::invalid_argument("patch size must be odd and >= 3");
    if (window.size() != static_cast<std::size_t>(k) * k)
        throw std::invalid_argument("window size does not match patch size");
}

// Precomputed geometry of one k-by-k window: for every non-center pixel the
// clamped central-difference neighbor offsets, the unit vector toward the
// window center, and the angular sector of its bearing from the center.
// `stride` is the row pitch of the buffer the table will be applied to, so
// the same table layout serves both an extracted window (stride k) and a
// window addressed in place inside a full frame (stride = frame width).
struct GradEntry {
    std::ptrdiff_t xp, xm, yp, ym;
    double ux, uy;
    int sector;
};

struct GradientTable {
    int k = 0;
    int sectors = 0;
    std::vector<GradEntry> entries;
    std::vector<int> sector_counts;
};

GradientTable build_gradient_table(int k, int sectors, std::ptrdiff_t stride) {
    GradientTable t;
    t.k = k;
    t.sectors = sectors;
    t.sector_counts.assign(static_cast<std::size_t>(sectors), 0);
    const int r = k / 2;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int wy = 0; wy < k; ++wy) {
        for (int wx = 0; wx < k; ++wx) {
            if (wx == r && wy == r) continue;
            int dx = wx - r, dy = wy - r;
            GradEntry e;
            e.xp = static_cast<std::ptrdiff_t>(wy) * stride + std::min(wx + 1, k - 1);
            e.xm = static_cast<std::ptrdiff_t>(wy) * stride + std::max(wx - 1, 0);
            e.yp = static_cast<std::ptrdiff_t>(std::min(wy + 1, k - 1)) * stride + wx;
            e.ym = static_cast<std::ptrdiff_t>(std::max(wy - 1, 0)) * stride + wx;
            double norm = std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
            e.ux = -dx / norm;
            e.uy = -dy / norm;
            double bearing = std::atan2(static_cast<double>(dy), static_cast<double>(dx));
            if (bearing < 0.0) bearing += two_pi;
            int s = static_cast<int>(std::floor(sectors * bearing / two_pi));
            e.sector = std::min(s, sectors - 1);
            t.entries.push_back(e);
            ++t.sector_counts[static_cast<std::size_t>(e.sector)];
        }
    }
    return t;
}

// Min-over-sectors mean inwardness at the window whose top-left corner is
// `base`. `sums` is caller-provided scratch sized to the sector count.
double eval_gradient(const GradientTable& t, const double* base, std::vector<double>& sums) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (const GradEntry& e : t.entries) {
        double gx = (base[e.xp] - base[e.xm]) * 0.5;
        double gy = (base[e.yp] - base[e.ym]) * 0.5;
        double dot = gx * e.ux + gy * e.uy;
        if (dot > 0.0) sums[static_cast<std::size_t>(e.sector)] += dot;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < t.sectors; ++s) {
        int n = t.sector_counts[static_cast<std::size_t>(s)];
        if (n == 0) continue;
        best = std::min(best, sums[static_cast<std::size_t>(s)] / n);
    }
    return std::isinf(best) ? 0.0 : best;
}

} // namespace

void LigParams::validate() const {
    if (patch_size < 3 || patch_size % 2 == 0)
        throw std::invalid_argument("patch_size must be odd and >= 3");
    if (center_size < 1 || center_size % 2 == 0 || center_size >= patch_size)
        throw std::invalid_argument("center_size must be odd and < patch_size");
    if (sector_count < 4) throw std::invalid_argument("sector_count must be >= 4");
    if (!(top_fraction > 0.0 && top_fraction <= 1.0))
        throw std::invalid_argument("top_fraction must lie in (0,1]");
}

std::size_t BinaryMask::count() const {
    std::size_t c = 0;
    for (auto b : bits) c += b;
    return c;
}

BinaryMask make_mask(int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("mask dimensions must be positive");
    BinaryMask m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
}

double local_intensity(const std::vector<double>& window, int patch_size, int center_size) {
    check_window(window, patch_size);
    const int k = patch_size, c = center_size;
    if (c < 1 || c % 2 == 0 || c >= k)
        throw std::invalid_argument("center_size must be odd and < patch_size");
    const int r = k / 2, cr = c / 2;
    double center = 0.0;
    for (int wy = r - cr; wy <= r + cr; ++wy)
        for (int wx = r - cr; wx <= r + cr; ++wx)
            center += window[static_cast<std::size_t>(wy) * k + wx];
    double total = 0.0;
    for (double v : window) total += v;
    const int c2 = c * c;
    const int ring_n = k * k - c2;
    double diff = center / c2 - (total - center) / ring_n;
    return diff > 0.0 ? diff : 0.0;
}

double local_gradient(const std::vector<double>& window, int patch_size, int sector_count) {
    check_window(window, patch_size);
    if (sector_count < 4) throw std::invalid_argument("sector_count must be >= 4");
    GradientTable t = build_gradient_table(patch_size, sector_count, patch_size);
    std::vector<double> sums(static_cast<std::size_t>(sector_count));
    return eval_gradient(t, window.data(), sums);
}

IgMap compute_ig_map(const Frame& frame, const LigParams& params, int workers) {
    frame.validate();
    params.validate();
    const int k = params.patch_size, c = params.center_size;
    const int W = frame.width, H = frame.height;
    if (W < k || H < k)
        throw std::invalid_argument("frame smaller than the patch size");
    if (workers < 1) throw std::invalid_argument("worker count must be >= 1");

    IgMap ig;
    ig.width = W;
    ig.height = H;
    ig.values.assign(static_cast<std::size_t>(W) * H, 0.0);

    const int r = k / 2, cr = c / 2;
    const int c2 = c * c;
    const int ring_n = k * k - c2;
    const GradientTable table = build_gradient_table(k, params.sector_count, W);
    const double* px = frame.pixels.data();

    // One output row at a time. Column sums restart on every row (never
    // carried down from the previous row), so any partition of the rows
    // across workers computes identical bits.
    auto run_rows = [&](int y_begin, int y_end) {
        std::vector<double> col_k(static_cast<std::size_t>(W));
        std::vector<double> col_c(static_cast<std::size_t>(W));
        std::vector<double> sums(static_cast<std::size_t>(params.sector_count));
        for (int y = y_begin; y < y_end; ++y) {
            for (int x = 0; x < W; ++x) {
                double sk = 0.0;
                for (int yy = y - r; yy <= y + r; ++yy)
                    sk += px[static_cast<std::size_t>(yy) * W + x];
                col_k[static_cast<std::size_t>(x)] = sk;
                double sc = 0.0;
                for (int yy = y - cr; yy <= y + cr; ++yy)
                    sc += px[static_cast<std::size_t>(yy) * W + x];
                col_c[static_cast<std::size_t>(x)] = sc;
            }
            double* out_row = ig.values.data() + static_cast<std::size_t>(y) * W;
            for (int x = r; x < W - r; ++x) {
                double sum_k = 0.0;
                for (int xx = x - r; xx <= x + r; ++xx)
                    sum_k += col_k[static_cast<std::size_t>(xx)];
                double sum_c = 0.0;
                for (int xx = x - cr; xx <= x + cr; ++xx)
                    sum_c += col_c[static_cast<std::size_t>(xx)];
                double L = sum_c / c2 - (sum_k - sum_c) / ring_n;
                if (L <= 0.0) continue; // IG is exactly 0 without evaluating G
                const double* base = px + static_cast<std::size_t>(y - r) * W + (x - r);
                double G = eval_gradient(table, base, sums);
                out_row[x] = L * G;
            }
        }
    };

    const int y_lo = r, y_hi = H - r; // interior rows [y_lo, y_hi)
    const int rows = y_hi - y_lo;
    const int n_workers = std::min(workers, rows);
    if (n_workers <= 1) {
        run_rows(y_lo, y_hi);
        return ig;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers) - 1);
    int chunk = (rows + n_workers - 1) / n_workers;
    for (int w = 1; w < n_workers; ++w) {
        int b = y_lo + w * chunk;
        int e = std::min(b + chunk, y_hi);
        if (b < e) pool.emplace_back(run_rows, b, e);
    }
    run_rows(y_lo, std::min(y_lo + chunk, y_hi));
    for (auto& th : pool) th.join();
    return ig;
}

std::vector<double> top_values(const IgMap& ig, double top_fraction) {
    if (!(top_fraction > 0.0 && top_fraction <= 1.0))
        throw std::invalid_argument("top_fraction must lie in (0,1]");
    if (ig.values.empty()) throw std::invalid_argument("empty IG map");
    auto total = static_cast<long long>(ig.values.size());
    long long m = std::llround(top_fraction * ig.width * ig.height);
    m = std::clamp(m, 1LL, total);

    std::vector<double> top = ig.values;
    auto mid = top.begin() + static_cast<std::ptrdiff_t>(m);
    std::nth_element(top.begin(), mid, top.end(), std::greater<>());
    top.erase(mid, top.end());
    std::sort(top.begin(), top.end(), std::greater<>());
    return top;
}

double adaptive_threshold(const IgMap& ig, double top_fraction) {
    std::vector<double> top = top_values(ig, top_fraction);
    double sum = std::accumulate(top.begin(), top.end(), 0.0);
    return sum / static_cast<double>(top.size());
}

BinaryMask binarize(const IgMap& ig, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");
    BinaryMask m = make_mask(ig.width, ig.height);
    for (std::size_t i = 0; i < ig.values.size(); ++i)
        m.bits[i] = (ig.values[i] >= threshold && ig.values[i] > 0.0) ? 1 : 0;
    return m;
}

} // namespace ligtrack
