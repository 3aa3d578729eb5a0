#include "ligtrack/eval.hpp"

#include <stdexcept>
#include <unordered_map>

namespace ligtrack {

GroundTruth make_ground_truth(const std::vector<io::GtRecord>& rows) {
    GroundTruth gt;
    for (const auto& r : rows) {
        auto [it, inserted] = gt.records.emplace(r.frame, r);
        if (!inserted)
            throw std::runtime_error("duplicate ground-truth record for frame " +
                                     std::to_string(r.frame));
    }
    return gt;
}

FrameCounts match_frame(const std::vector<Detection>& dets,
                        const io::GtRecord* gt, double tp_distance) {
    if (tp_distance < 0.0)
        throw std::invalid_argument("tp_distance must be non-negative");
    FrameCounts c;
    if (gt == nullptr) {
        c.fp = static_cast<long long>(dets.size());
        return c;
    }
    int best = -1;
    double best_dist = 0.0;
    for (int i = 0; i < static_cast<int>(dets.size()); ++i) {
        double d = centroid_distance({dets[i].cx, dets[i].cy}, {gt->cx, gt->cy});
        if (d <= tp_distance && (best < 0 || d < best_dist)) {
            best = i;
            best_dist = d;
        }
    }
    if (best >= 0) {
        c.tp = 1;
        c.fp = static_cast<long long>(dets.size()) - 1;
    } else {
        c.missed = 1;
        c.fp = static_cast<long long>(dets.size());
    }
    return c;
}

double f1_score(double precision, double recall) {
    double sum = precision + recall;
    if (sum <= 0.0) return 0.0;
    return 2.0 * precision * recall / sum;
}

MetricsReport compute_metrics(long long tp, long long fp, long long missed) {
    if (tp < 0 || fp < 0 || missed < 0)
        throw std::invalid_argument("metric counts must be non-negative");
    MetricsReport r;
    r.tp = tp;
    r.fp = fp;
    r.missed = missed;
    r.precision = (tp + fp > 0) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = (tp + missed > 0) ? static_cast<double>(tp) / static_cast<double>(tp + missed) : 0.0;
    r.f1 = f1_score(r.precision, r.recall);
    return r;
}

MetricsReport evaluate_detections(const std::vector<Detection>& dets,
                                  const GroundTruth& gt, double tp_distance,
                                  int upsample_factor) {
    if (upsample_factor < 1)
        throw std::invalid_argument("upsample_factor must be >= 1");
    std::unordered_map<int, std::vector<Detection>> by_frame;
    for (const auto& d : dets) by_frame[d.frame_index].push_back(d);

    long long tp = 0, fp = 0, missed = 0;
    const std::vector<Detection> no_dets;
    for (const auto& [frame, record] : gt.records) {
        io::GtRecord scaled = record;
        scaled.cx *= upsample_factor;
        scaled.cy *= upsample_factor;
        auto it = by_frame.find(frame);
        const std::vector<Detection>& frame_dets = (it != by_frame.end()) ? it->second : no_dets;
        FrameCounts c = match_frame(frame_dets, &scaled, tp_distance * upsample_factor);
        tp += c.tp;
        fp += c.fp;
        missed += c.missed;
    }
    return compute_metrics(tp, fp, missed);
}

std::vector<Detection> detections_from_tracks(const std::vector<io::TrackRow>& rows) {
    std::vector<Detection> dets;
    dets.reserve(rows.size());
    for (const auto& r : rows) {
        Detection d;
        d.frame_index = r.frame;
        d.bbox = r.bbox;
        d.cx = (r.bbox.x_min + r.bbox.x_max) / 2.0;
        d.cy = (r.bbox.y_min + r.bbox.y_max) / 2.0;
        d.score = r.score;
        d.area = static_cast<int>(r.bbox.area());
        dets.push_back(d);
    }
    return dets;
}

std::string metrics_to_json(const MetricsReport& report) {
    std::string out = "{\n";
    out += "  \"tp\": " + std::to_string(report.tp) + ",\n";
    out += "  \"fp\": " + std::to_string(report.fp) + ",\n";
    out += "  \"missed\": " + std::to_string(report.missed) + ",\n";
    out += "  \"precision\": " + io::format_fixed(report.precision) + ",\n";
    out += "  \"recall\": " + io::format_fixed(report.recall) + ",\n";
    out += "  \"f1\": " + io::format_fixed(report.f1) + "\n";
    out += "}\n";
    return out;
}

void write_metrics_json(const MetricsReport& report, const std::string& path) {
    io::write_text_file(path, metrics_to_json(report));
}

} // namespace ligtrack
