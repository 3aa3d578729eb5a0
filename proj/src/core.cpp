#include "ligtrack/core.hpp"

#include <algorithm>

namespace ligtrack {

void Frame::validate() const {
    if (width < 1 || height < 1)
        throw std::invalid_argument("frame dimensions must be at least 1x1");
    if (source_depth != 8 && source_depth != 16)
        throw std::invalid_argument("frame source_depth must be 8 or 16");
    if (pixels.size() != static_cast<size_t>(width) * height)
        throw std::invalid_argument("frame pixel count does not match width*height");
    for (double v : pixels) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("frame intensity outside [0,1]");
    }
}

Frame make_frame(int width, int height, int index, int source_depth,
                 std::vector<double> pixels) {
    Frame f;
    f.width = width;
    f.height = height;
    f.index = index;
    f.source_depth = source_depth;
    f.pixels = std::move(pixels);
    f.validate();
    return f;
}

void SortParams::validate() const {
    if (!(iou_min > 0.0 && iou_min < 1.0))
        throw std::invalid_argument("sort.iou_min must lie in (0,1)");
    if (max_age < 1) throw std::invalid_argument("sort.max_age must be >= 1");
    if (min_hits < 1) throw std::invalid_argument("sort.min_hits must be >= 1");
    if (!(process_noise_scale > 0.0) || !(measurement_noise_scale > 0.0))
        throw std::invalid_argument("sort noise scales must be positive");
}

int PipelineConfig::effective_patch_size() const {
    if (patch_size > 0) return patch_size;
    switch (upsample_factor) {
        case 1: return 7;
        case 2: return 19;
        default: return 39;
    }
}

int PipelineConfig::effective_center_size() const {
    if (center_size > 0) return center_size;
    // 3 for k=7, 7 for k=19, 13 for k=39: largest odd value <= (k+2)/3
    int k = effective_patch_size();
    int c = (k + 2) / 3;
    if (c % 2 == 0) --c;
    return std::max(c, 1);
}

int PipelineConfig::effective_dilation_side() const {
    if (dilation_side > 0) return dilation_side;
    return upsample_factor == 1 ? 5 : 10;
}

int PipelineConfig::effective_area_min() const {
    if (!scale_area_rule) return area_min_exclusive;
    return area_min_exclusive * upsample_factor * upsample_factor;
}

int PipelineConfig::effective_area_max() const {
    if (!scale_area_rule) return area_max_exclusive;
    return area_max_exclusive * upsample_factor * upsample_factor;
}

void PipelineConfig::validate() const {
    int k = effective_patch_size();
    int c = effective_center_size();
    if (k < 3 || k % 2 == 0)
        throw std::invalid_argument("patch_size must be odd and >= 3");
    if (c < 1 || c % 2 == 0 || c >= k)
        throw std::invalid_argument("center_size must be odd and < patch_size");
    if (sector_count < 4)
        throw std::invalid_argument("sector_count must be >= 4");
    if (!(top_fraction > 0.0 && top_fraction <= 1.0))
        throw std::invalid_argument("top_fraction must lie in (0,1]");
    if (effective_dilation_side() < 1)
        throw std::invalid_argument("dilation_side must be >= 1");
    if (area_min_exclusive >= area_max_exclusive)
        throw std::invalid_argument("area_min_exclusive must be < area_max_exclusive");
    if (upsample_factor != 1 && upsample_factor != 2 && upsample_factor != 4)
        throw std::invalid_argument("upsample_factor must be 1, 2 or 4");
    if (top_n_targets < 1)
        throw std::invalid_argument("top_n_targets must be >= 1");
    if (!(tp_distance > 0.0))
        throw std::invalid_argument("tp_distance must be positive");
    sort.validate();
}

double bbox_iou(const BBox& a, const BBox& b) {
    double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min) + 1.0;
    double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min) + 1.0;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    double inter = iw * ih;
    double uni = a.area() + b.area() - inter;
    return inter / uni;
}

double centroid_distance(const Point& p, const Point& q) {
    return std::hypot(p.x - q.x, p.y - q.y);
}

} // namespace ligtrack
