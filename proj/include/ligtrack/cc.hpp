#pragma once

#include <utility>
#include <vector>

#include "ligtrack/core.hpp"
#include "ligtrack/lig.hpp"

namespace ligtrack {

/// One 8-connected region of set pixels. Labels are dense from 1 in
/// row-major order of first appearance. max_intensity is measured on the
/// frame the mask was derived from (the processed frame, not the IG map).
struct Component {
    int label = 0;
    std::vector<std::pair<int, int>> pixels; // (x,y), scan order
    int area = 0;
    BBox bbox; // tight, integer-aligned
    double max_intensity = 0.0;
    double centroid_x = 0.0, centroid_y = 0.0;
};

/// Morphological dilation by a se_side x se_side square. The square placed
/// at pixel p covers [p-a, p-a+se_side-1] per axis with anchor
/// a = floor((se_side-1)/2), so odd sides are centered and even sides sit
/// one pixel heavy toward +x/+y. The SE is clipped at the borders.
BinaryMask dilate(const BinaryMask& mask, int se_side);

/// 8-connectivity labeling (two-pass union-find). `intensity` supplies the
/// per-pixel values for max_intensity and must match the mask dimensions.
std::vector<Component> label_components(const BinaryMask& mask, const Frame& intensity);

/// Keeps components with area strictly between the two bounds.
std::vector<Component> rule_filter(const std::vector<Component>& components,
                                   int area_min_exclusive, int area_max_exclusive);

/// Orders candidates by max_intensity descending, then larger area, then
/// smaller (y,x) of the bbox top-left, then label, and returns the first
/// top_n as Detections.
std::vector<Detection> select_targets(const std::vector<Component>& components, int top_n,
                                      int frame_index);

} // namespace ligtrack
