#include <doctest.h>

#include <random>

#include "ligtrack/core.hpp"

using namespace ligtrack;

namespace {

// Counting-oracle IoU: enumerate integer pixel cells covered by each box.
double iou_by_counting(const BBox& a, const BBox& b) {
    int x_lo = static_cast<int>(std::min(a.x_min, b.x_min));
    int x_hi = static_cast<int>(std::max(a.x_max, b.x_max));
    int y_lo = static_cast<int>(std::min(a.y_min, b.y_min));
    int y_hi = static_cast<int>(std::max(a.y_max, b.y_max));
    long inter = 0, uni = 0;
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            bool in_a = x >= a.x_min && x <= a.x_max && y >= a.y_min && y <= a.y_max;
            bool in_b = x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace

TEST_CASE("bbox extents are inclusive") {
    BBox b{2, 3, 5, 7};
    CHECK(b.width() == 4.0);
    CHECK(b.height() == 5.0);
    CHECK(b.area() == 20.0);

    BBox single{4, 9, 4, 9};
    CHECK(single.width() == 1.0);
    CHECK(single.area() == 1.0);
    CHECK(single.valid());
    CHECK_FALSE(BBox{5, 0, 4, 0}.valid());
}

TEST_CASE("iou of half-overlapping boxes") {
    BBox a{0, 0, 9, 9};
    BBox b{5, 0, 14, 9};
    // 50 shared pixels of 150 distinct ones
    CHECK(bbox_iou(a, b) == doctest::Approx(50.0 / 150.0).epsilon(1e-12));
    CHECK(bbox_iou(a, a) == doctest::Approx(1.0));
    CHECK(bbox_iou(a, BBox{20, 20, 25, 25}) == 0.0);
    // boxes touching edge-to-edge share no pixels under inclusive extents
    CHECK(bbox_iou(BBox{0, 0, 4, 4}, BBox{5, 0, 9, 4}) == 0.0);
}

TEST_CASE("iou matches cell-counting oracle on random integer boxes") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coord(0, 30), ext(0, 12);
    for (int i = 0; i < 500; ++i) {
        BBox a, b;
        a.x_min = coord(rng); a.x_max = a.x_min + ext(rng);
        a.y_min = coord(rng); a.y_max = a.y_min + ext(rng);
        b.x_min = coord(rng); b.x_max = b.x_min + ext(rng);
        b.y_min = coord(rng); b.y_max = b.y_min + ext(rng);
        double v = bbox_iou(a, b);
        CHECK(v == doctest::Approx(iou_by_counting(a, b)).epsilon(1e-12));
        CHECK(v == doctest::Approx(bbox_iou(b, a)).epsilon(1e-15));
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("centroid distance") {
    CHECK(centroid_distance({0, 0}, {3, 4}) == doctest::Approx(5.0));
    CHECK(centroid_distance({1.5, 2.5}, {1.5, 2.5}) == 0.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 200; ++i) {
        Point p{u(rng), u(rng)}, q{u(rng), u(rng)}, r{u(rng), u(rng)};
        CHECK(centroid_distance(p, q) == doctest::Approx(centroid_distance(q, p)));
        CHECK(centroid_distance(p, r) <=
              centroid_distance(p, q) + centroid_distance(q, r) + 1e-9);
    }
}

TEST_CASE("derived parameters follow the upsample factor") {
    PipelineConfig c;
    c.upsample_factor = 1;
    CHECK(c.effective_patch_size() == 7);
    CHECK(c.effective_center_size() == 3);
    CHECK(c.effective_dilation_side() == 5);
    c.upsample_factor = 2;
    CHECK(c.effective_patch_size() == 19);
    CHECK(c.effective_center_size() == 7);
    CHECK(c.effective_dilation_side() == 10);
    c.upsample_factor = 4;
    CHECK(c.effective_patch_size() == 39);
    CHECK(c.effective_center_size() == 13);
    CHECK(c.effective_dilation_side() == 10);

    // explicit values win over derivation
    c.patch_size = 11;
    c.center_size = 5;
    c.dilation_side = 3;
    CHECK(c.effective_patch_size() == 11);
    CHECK(c.effective_center_size() == 5);
    CHECK(c.effective_dilation_side() == 3);
}

TEST_CASE("area rule bounds scale by factor squared only when asked") {
    PipelineConfig c;
    c.upsample_factor = 2;
    CHECK(c.effective_area_min() == 1);
    CHECK(c.effective_area_max() == 100);
    c.scale_area_rule = true;
    CHECK(c.effective_area_min() == 4);
    CHECK(c.effective_area_max() == 400);
    c.upsample_factor = 4;
    CHECK(c.effective_area_min() == 16);
    CHECK(c.effective_area_max() == 1600);
}

TEST_CASE("config validation rejects out-of-range values") {
    PipelineConfig c;
    CHECK_NOTHROW(c.validate());
    c.patch_size = 8;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.patch_size = 7;
    c.center_size = 7; // not smaller than patch
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.center_size = 0;
    c.top_fraction = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.top_fraction = 1e-4;
    c.upsample_factor = 3;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.upsample_factor = 1;
    c.sort.iou_min = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.sort.iou_min = 0.3;
    c.sort.min_hits = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("frame validation") {
    CHECK_NOTHROW(make_frame(2, 2, 0, 8, {0.0, 0.5, 1.0, 0.25}));
    CHECK_THROWS_AS(make_frame(2, 2, 0, 8, {0.0, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_frame(2, 2, 0, 8, {0.0, 0.5, 1.0, 1.25}), std::invalid_argument);
    CHECK_THROWS_AS(make_frame(0, 2, 0, 8, {}), std::invalid_argument);
    CHECK_THROWS_AS(make_frame(2, 2, 0, 12, {0.0, 0.5, 1.0, 0.25}), std::invalid_argument);
}
