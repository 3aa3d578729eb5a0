#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ligtrack {

/// Single grayscale frame with intensities normalized to [0,1].
/// Source bit depth is kept so the normalization is reversible on output.
struct Frame {
    int width = 0;
    int height = 0;
    int index = 0;        // 0-based frame ordinal within the sequence
    int source_depth = 8; // bits per pixel of the origin file (8 or 16)
    std::vector<double> pixels; // row-major, size = width*height

    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }

    void validate() const;
};

Frame make_frame(int width, int height, int index, int source_depth,
                 std::vector<double> pixels);

/// Axis-aligned box with inclusive extents: a box covering a single pixel
/// has x_min == x_max. Coordinates are continuous (Kalman states produce
/// fractional boxes); mask-derived boxes are integer-aligned.
struct BBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

    double width() const { return x_max - x_min + 1.0; }
    double height() const { return y_max - y_min + 1.0; }
    double area() const { return width() * height(); }
    bool valid() const {
        return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
               std::isfinite(y_max) && x_min <= x_max && y_min <= y_max;
    }
};

struct Point {
    double x = 0, y = 0;
};

/// One candidate target in a frame.
struct Detection {
    int frame_index = 0;
    BBox bbox;
    double cx = 0, cy = 0; // centroid, continuous pixel coordinates
    double score = 0;      // max source-frame intensity inside the component
    int area = 0;          // pixel count of the source component
};

/// SORT tracker knobs. The noise scales multiply the built-in covariance
/// templates so the filter can be stiffened or loosened from config.
struct SortParams {
    double iou_min = 0.3;
    int max_age = 1;
    int min_hits = 3;
    double process_noise_scale = 1.0;
    double measurement_noise_scale = 1.0;

    void validate() const;
};

/// Full pipeline configuration. A value of 0 for patch_size, center_size or
/// dilation_side means "derive from upsample_factor": patch 7/19/39 and
/// SE side 5/10/10 for factors 1/2/4.
struct PipelineConfig {
    int patch_size = 0;
    int center_size = 0;
    int sector_count = 8;
    double top_fraction = 1e-4;
    int dilation_side = 0;
    int area_min_exclusive = 1;
    int area_max_exclusive = 100;
    bool scale_area_rule = false; // multiply area bounds by factor^2
    int upsample_factor = 1;
    int top_n_targets = 1;
    double tp_distance = 10.0; // original-scale pixels; eval rescales
    SortParams sort;

    int effective_patch_size() const;
    int effective_center_size() const;
    int effective_dilation_side() const;
    int effective_area_min() const;
    int effective_area_max() const;

    void validate() const;
};

/// Intersection-over-union under the inclusive-extent convention.
/// Returns 0 for disjoint boxes.
double bbox_iou(const BBox& a, const BBox& b);

/// Euclidean distance between two centroids.
double centroid_distance(const Point& p, const Point& q);

} // namespace ligtrack
