#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ligtrack/core.hpp"

namespace ligtrack {

/// (u, v, s, r): box center, scale (area) and aspect ratio (w/h), with
/// inclusive-extent width and height.
Eigen::Vector4d bbox_to_measurement(const BBox& b);

/// Inverse of bbox_to_measurement: w = sqrt(s*r), h = s/w, box centered at
/// (u,v). Rejects s <= 0 or r <= 0.
BBox measurement_to_bbox(double u, double v, double s, double r);

/// Constant-velocity Kalman filter over the 7-state box model
/// [u, v, s, r, u_dot, v_dot, s_dot]. The aspect ratio carries no velocity.
class KalmanBoxFilter {
public:
    KalmanBoxFilter(const BBox& first, double process_noise_scale,
                    double measurement_noise_scale);

    /// Advances one frame. If the predicted scale would drop to or below
    /// zero, the scale velocity is zeroed and the scale keeps its value.
    void predict();

    /// Measurement update with the box observation, Joseph-form covariance.
    void update(const BBox& observed);

    BBox bbox() const;
    const Eigen::Matrix<double, 7, 1>& state() const { return x_; }
    const Eigen::Matrix<double, 7, 7>& covariance() const { return P_; }

    /// Replaces the state mean (covariance untouched), e.g. to warm-start a
    /// filter from a known trajectory.
    void set_state(const Eigen::Matrix<double, 7, 1>& x) { x_ = x; }

private:
    Eigen::Matrix<double, 7, 1> x_;
    Eigen::Matrix<double, 7, 7> P_;
    Eigen::Matrix<double, 7, 7> Q_;
    Eigen::Matrix<double, 4, 4> R_;
};

/// Result of gating one frame's predicted boxes against its detections.
struct Association {
    std::vector<std::pair<int, int>> matches; // (track index, detection index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

/// Optimal assignment maximizing total IoU; pairs with IoU < iou_min are
/// reported unmatched instead.
Association associate(const std::vector<BBox>& predicted,
                      const std::vector<Detection>& detections, double iou_min);

/// One reported track row for the current frame.
struct TrackSnapshot {
    int id = 0;
    BBox bbox;
    double score = 0.0; // score of the last matched detection
};

/// SORT: predict, associate, update, manage track lifecycle. Strictly
/// sequential per video; frames must be stepped in increasing index order
/// (the caller steps empty frames explicitly so aging advances).
class SortTracker {
public:
    explicit SortTracker(const SortParams& params);

    /// Processes one frame and returns the confirmed tracks, i.e. tracks
    /// updated this frame whose cumulative hit count has reached min_hits.
    std::vector<TrackSnapshot> step(int frame_index, const std::vector<Detection>& detections);

    int live_track_count() const { return static_cast<int>(tracks_.size()); }

private:
    struct Track {
        int id = 0;
        KalmanBoxFilter kf;
        int hits = 1;
        int age = 0;
        int time_since_update = 0;
        double last_score = 0.0;
    };

    SortParams params_;
    std::vector<Track> tracks_;
    int next_id_ = 1;
    long last_frame_ = -1;
};

} // namespace ligtrack
