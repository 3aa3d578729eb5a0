#pragma once

#include <map>
#include <string>
#include <vector>

#include "ligtrack/core.hpp"
#include "ligtrack/io.hpp"

namespace ligtrack {

/// Per-frame ground truth for single-target sequences; a frame without an
/// entry has no target.
struct GroundTruth {
    std::map<int, io::GtRecord> records;
};

/// Indexes GT rows by frame. Throws std::runtime_error on duplicate frames.
GroundTruth make_ground_truth(const std::vector<io::GtRecord>& rows);

struct FrameCounts {
    long long tp = 0;
    long long fp = 0;
    long long missed = 0;
};

/// Scores the detections of one frame. With a GT record, the detection
/// nearest to the GT centroid within tp_distance (inclusive; first in row
/// order on exact ties) is the single TP and every other detection is an FP;
/// if none qualifies the frame counts one miss plus an FP per detection.
/// Without a GT record every detection is an FP. `dets` must all belong to
/// the same frame.
FrameCounts match_frame(const std::vector<Detection>& dets,
                        const io::GtRecord* gt, double tp_distance);

struct MetricsReport {
    long long tp = 0;
    long long fp = 0;
    long long missed = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

/// 2pr/(p+r), or 0 when p + r == 0.
double f1_score(double precision, double recall);

/// precision = tp/(tp+fp) and recall = tp/(tp+missed), each 0 when its
/// denominator is 0. Throws std::invalid_argument on negative counts.
MetricsReport compute_metrics(long long tp, long long fp, long long missed);

/// Folds match_frame over exactly the frames that have a GT record;
/// detections on frames outside the GT file are ignored. GT files store
/// original-scale coordinates, so for runs on upsampled frames both the GT
/// centroids and tp_distance are multiplied by `upsample_factor` to compare
/// in the processed coordinate space.
MetricsReport evaluate_detections(const std::vector<Detection>& dets,
                                  const GroundTruth& gt, double tp_distance,
                                  int upsample_factor = 1);

/// Adapts track output for scoring: each row becomes a detection located at
/// its box center.
std::vector<Detection> detections_from_tracks(const std::vector<io::TrackRow>& rows);

/// Six-field JSON object (tp, fp, missed, precision, recall, f1); floats use
/// the fixed 6-decimal rendering so reports compare byte-for-byte.
std::string metrics_to_json(const MetricsReport& report);
void write_metrics_json(const MetricsReport& report, const std::string& path);

} // namespace ligtrack
