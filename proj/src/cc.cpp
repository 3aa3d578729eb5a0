#include "ligtrack/cc.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ligtrack {
namespace {

// Sliding-window OR along one axis: out(i) = any(in[i-a .. i-a+side-1]).
// Tracked as a running count of set entries so each step is O(1).
void line_dilate(const std::uint8_t* in, std::uint8_t* out, int n, std::ptrdiff_t stride,
                 int side, int anchor) {
    int lo = -anchor, hi = side - 1 - anchor; // window [i+lo, i+hi]
    int count = 0;
    for (int i = lo; i <= hi - 1; ++i)
        if (i >= 0 && i < n) count += in[i * stride];
    for (int i = 0; i < n; ++i) {
        int add = i + hi;
        if (add >= 0 && add < n) count += in[add * stride];
        out[i * stride] = count > 0 ? 1 : 0;
        int drop = i + lo;
        if (drop >= 0 && drop < n) count -= in[drop * stride];
    }
}

struct UnionFind {
    std::vector<int> parent;

    int make() {
        parent.push_back(static_cast<int>(parent.size()));
        return static_cast<int>(parent.size()) - 1;
    }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

} // namespace

BinaryMask dilate(const BinaryMask& mask, int se_side) {
    if (se_side < 1) throw std::invalid_argument("se_side must be >= 1");
    if (se_side == 1) return mask;
    const int W = mask.width, H = mask.height;
    const int anchor = (se_side - 1) / 2;

    // a square SE separates into a horizontal then a vertical line SE
    BinaryMask mid = make_mask(W, H);
    for (int y = 0; y < H; ++y)
        line_dilate(mask.bits.data() + static_cast<std::size_t>(y) * W,
                    mid.bits.data() + static_cast<std::size_t>(y) * W, W, 1, se_side, anchor);
    BinaryMask out = make_mask(W, H);
    for (int x = 0; x < W; ++x)
        line_dilate(mid.bits.data() + x, out.bits.data() + x, H, W, se_side, anchor);
    return out;
}

std::vector<Component> label_components(const BinaryMask& mask, const Frame& intensity) {
    if (intensity.width != mask.width || intensity.height != mask.height)
        throw std::invalid_argument("intensity frame does not match mask dimensions");
    const int W = mask.width, H = mask.height;

    // pass 1: provisional labels, merging across the 4 already-seen
    // neighbors (W, NW, N, NE) of each set pixel
    std::vector<int> prov(static_cast<std::size_t>(W) * H, -1);
    UnionFind uf;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!mask.at(x, y)) continue;
            int best = -1;
            const int nx[4] = {x - 1, x - 1, x, x + 1};
            const int ny[4] = {y, y - 1, y - 1, y - 1};
            for (int i = 0; i < 4; ++i) {
                if (nx[i] < 0 || nx[i] >= W || ny[i] < 0) continue;
                int lab = prov[static_cast<std::size_t>(ny[i]) * W + nx[i]];
                if (lab < 0) continue;
                if (best < 0) {
                    best = lab;
                } else {
                    uf.unite(best, lab);
                }
            }
            if (best < 0) best = uf.make();
            prov[static_cast<std::size_t>(y) * W + x] = best;
        }
    }

    // pass 2: roots -> dense labels in order of first appearance
    std::vector<int> dense(uf.parent.size(), 0);
    std::vector<Component> comps;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            int p = prov[static_cast<std::size_t>(y) * W + x];
            if (p < 0) continue;
            int root = uf.find(p);
            int& d = dense[static_cast<std::size_t>(root)];
            if (d == 0) {
                d = static_cast<int>(comps.size()) + 1;
                Component c;
                c.label = d;
                c.bbox = {static_cast<double>(x), static_cast<double>(y),
                          static_cast<double>(x), static_cast<double>(y)};
                comps.push_back(std::move(c));
            }
            Component& c = comps[static_cast<std::size_t>(d) - 1];
            c.pixels.emplace_back(x, y);
            c.bbox.x_min = std::min(c.bbox.x_min, static_cast<double>(x));
            c.bbox.x_max = std::max(c.bbox.x_max, static_cast<double>(x));
            c.bbox.y_min = std::min(c.bbox.y_min, static_cast<double>(y));
            c.bbox.y_max = std::max(c.bbox.y_max, static_cast<double>(y));
        }
    }
    for (Component& c : comps) {
        c.area = static_cast<int>(c.pixels.size());
        double sx = 0.0, sy = 0.0, mx = 0.0;
        for (auto [x, y] : c.pixels) {
            sx += x;
            sy += y;
            mx = std::max(mx, intensity.at(x, y));
        }
        c.centroid_x = sx / c.area;
        c.centroid_y = sy / c.area;
        c.max_intensity = mx;
    }
    return comps;
}

std::vector<Component> rule_filter(const std::vector<Component>& components,
                                   int area_min_exclusive, int area_max_exclusive) {
    if (area_min_exclusive >= area_max_exclusive)
        throw std::invalid_argument("area_min_exclusive must be < area_max_exclusive");
    std::vector<Component> kept;
    for (const Component& c : components)
        if (c.area > area_min_exclusive && c.area < area_max_exclusive) kept.push_back(c);
    return kept;
}

std::vector<Detection> select_targets(const std::vector<Component>& components, int top_n,
                                      int frame_index) {
    if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");
    std::vector<const Component*> order;
    order.reserve(components.size());
    for (const Component& c : components) order.push_back(&c);
    std::sort(order.begin(), order.end(), [](const Component* a, const Component* b) {
        if (a->max_intensity != b->max_intensity) return a->max_intensity > b->max_intensity;
        if (a->area != b->area) return a->area > b->area;
        if (a->bbox.y_min != b->bbox.y_min) return a->bbox.y_min < b->bbox.y_min;
        if (a->bbox.x_min != b->bbox.x_min) return a->bbox.x_min < b->bbox.x_min;
        return a->label < b->label;
    });

    std::vector<Detection> out;
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(top_n), order.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Component& c = *order[i];
        Detection d;
        d.frame_index = frame_index;
        d.bbox = c.bbox;
        d.cx = c.centroid_x;
        d.cy = c.centroid_y;
        d.score = c.max_intensity;
        d.area = c.area;
        out.push_back(d);
    }
    return out;
}

} // namespace ligtrack
