#include "ligtrack/sort.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ligtrack/assignment.hpp"

namespace ligtrack {
namespace {

Eigen::Matrix<double, 7, 7> transition_matrix() {
    Eigen::Matrix<double, 7, 7> F = Eigen::Matrix<double, 7, 7>::Identity();
    F(0, 4) = 1.0; // u += u_dot
    F(1, 5) = 1.0; // v += v_dot
    F(2, 6) = 1.0; // s += s_dot
    return F;
}

Eigen::Matrix<double, 4, 7> observation_matrix() {
    Eigen::Matrix<double, 4, 7> H = Eigen::Matrix<double, 4, 7>::Zero();
    H(0, 0) = H(1, 1) = H(2, 2) = H(3, 3) = 1.0;
    return H;
}

constexpr double kMinScale = 1e-6;

} // namespace

Eigen::Vector4d bbox_to_measurement(const BBox& b) {
    if (!b.valid()) throw std::invalid_argument("invalid box");
    double w = b.width(), h = b.height();
    Eigen::Vector4d z;
    z << (b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0, w * h, w / h;
    return z;
}

BBox measurement_to_bbox(double u, double v, double s, double r) {
    if (!(s > 0.0) || !(r > 0.0))
        throw std::invalid_argument("scale and aspect ratio must be positive");
    double w = std::sqrt(s * r);
    double h = s / w;
    BBox b;
    b.x_min = u - (w - 1.0) / 2.0;
    b.x_max = u + (w - 1.0) / 2.0;
    b.y_min = v - (h - 1.0) / 2.0;
    b.y_max = v + (h - 1.0) / 2.0;
    return b;
}

KalmanBoxFilter::KalmanBoxFilter(const BBox& first, double process_noise_scale,
                                 double measurement_noise_scale) {
    Eigen::Vector4d z = bbox_to_measurement(first);
    x_.setZero();
    x_.head<4>() = z; // velocities start at zero, variance makes them free

    Eigen::Matrix<double, 7, 1> p0;
    p0 << 10, 10, 10, 10, 1e4, 1e4, 1e4;
    P_ = p0.asDiagonal();

    Eigen::Matrix<double, 7, 1> q;
    q << 1, 1, 1, 0.01, 0.01, 0.01, 1e-4;
    Q_ = (q * process_noise_scale).asDiagonal();

    Eigen::Vector4d r;
    r << 1, 1, 10, 0.01;
    R_ = (r * measurement_noise_scale).asDiagonal();
}

void KalmanBoxFilter::predict() {
    if (x_(2) + x_(6) <= 0.0) x_(6) = 0.0; // scale must stay positive
    static const Eigen::Matrix<double, 7, 7> F = transition_matrix();
    x_ = F * x_;
    P_ = F * P_ * F.transpose() + Q_;
}

void KalmanBoxFilter::update(const BBox& observed) {
    static const Eigen::Matrix<double, 4, 7> H = observation_matrix();
    Eigen::Vector4d z = bbox_to_measurement(observed);
    Eigen::Vector4d y = z - H * x_;
    Eigen::Matrix4d S = H * P_ * H.transpose() + R_;
    Eigen::Matrix<double, 7, 4> K = P_ * H.transpose() * S.inverse();
    x_ += K * y;
    // Joseph form keeps the covariance PSD under roundoff
    Eigen::Matrix<double, 7, 7> IKH = Eigen::Matrix<double, 7, 7>::Identity() - K * H;
    P_ = IKH * P_ * IKH.transpose() + K * R_ * K.transpose();
    P_ = ((P_ + P_.transpose()) / 2.0).eval();
    x_(2) = std::max(x_(2), kMinScale);
    x_(3) = std::max(x_(3), kMinScale);
}

BBox KalmanBoxFilter::bbox() const {
    return measurement_to_bbox(x_(0), x_(1), std::max(x_(2), kMinScale),
                               std::max(x_(3), kMinScale));
}

Association associate(const std::vector<BBox>& predicted,
                      const std::vector<Detection>& detections, double iou_min) {
    Association out;
    const int T = static_cast<int>(predicted.size());
    const int D = static_cast<int>(detections.size());
    if (T == 0 || D == 0) {
        for (int i = 0; i < T; ++i) out.unmatched_tracks.push_back(i);
        for (int j = 0; j < D; ++j) out.unmatched_detections.push_back(j);
        return out;
    }

    // pad to square; padding cells cost 0 = IoU 0, never better than a real
    // overlap, so the solver prefers real pairs
    const int N = std::max(T, D);
    std::vector<double> cost(static_cast<std::size_t>(N) * N, 0.0);
    for (int i = 0; i < T; ++i)
        for (int j = 0; j < D; ++j)
            cost[static_cast<std::size_t>(i) * N + j] =
                -bbox_iou(predicted[static_cast<std::size_t>(i)],
                          detections[static_cast<std::size_t>(j)].bbox);

    std::vector<int> row_to_col = min_cost_assignment(cost, N, N);

    std::vector<char> det_matched(static_cast<std::size_t>(D), 0);
    for (int i = 0; i < T; ++i) {
        int j = row_to_col[static_cast<std::size_t>(i)];
        if (j >= 0 && j < D &&
            -cost[static_cast<std::size_t>(i) * N + j] >= iou_min) {
            out.matches.push_back({i, j});
            det_matched[static_cast<std::size_t>(j)] = 1;
        } else {
            out.unmatched_tracks.push_back(i);
        }
    }
    for (int j = 0; j < D; ++j)
        if (!det_matched[static_cast<std::size_t>(j)]) out.unmatched_detections.push_back(j);
    return out;
}

SortTracker::SortTracker(const SortParams& params) : params_(params) { params_.validate(); }

std::vector<TrackSnapshot> SortTracker::step(int frame_index,
                                             const std::vector<Detection>& detections) {
    if (frame_index <= last_frame_)
        throw std::invalid_argument("frames must be stepped in increasing order");
    last_frame_ = frame_index;

    std::vector<BBox> predicted;
    predicted.reserve(tracks_.size());
    for (Track& t : tracks_) {
        t.kf.predict();
        ++t.age;
        ++t.time_since_update;
        predicted.push_back(t.kf.bbox());
    }

    Association assoc = associate(predicted, detections, params_.iou_min);

    for (auto [ti, di] : assoc.matches) {
        Track& t = tracks_[static_cast<std::size_t>(ti)];
        const Detection& d = detections[static_cast<std::size_t>(di)];
        t.kf.update(d.bbox);
        ++t.hits;
        t.time_since_update = 0;
        t.last_score = d.score;
    }

    for (int di : assoc.unmatched_detections) {
        const Detection& d = detections[static_cast<std::size_t>(di)];
        Track t{next_id_++,
                KalmanBoxFilter(d.bbox, params_.process_noise_scale,
                                params_.measurement_noise_scale),
                1, 0, 0, d.score};
        tracks_.push_back(std::move(t));
    }

    std::erase_if(tracks_, [&](const Track& t) {
        return t.time_since_update > params_.max_age;
    });

    std::vector<TrackSnapshot> reported;
    for (const Track& t : tracks_)
        if (t.time_since_update == 0 && t.hits >= params_.min_hits)
            reported.push_back({t.id, t.kf.bbox(), t.last_score});
    return reported;
}

} // namespace ligtrack
