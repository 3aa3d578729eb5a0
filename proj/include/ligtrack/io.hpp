#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ligtrack/core.hpp"

namespace ligtrack::io {

/// Binary (P5) PGM reader. maxval 255 loads as 8-bit, 65535 as 16-bit
/// big-endian; other maxvals are rejected. Intensities are normalized by
/// 2^depth - 1. `depth_override` (8 or 16) forces the normalization divisor
/// regardless of the file header; 0 keeps the header depth.
Frame read_pgm(const std::string& path, int index = 0, int depth_override = 0);

/// Writes `frame` as binary PGM at the given depth (0 = frame.source_depth).
/// 16-bit samples are big-endian per the PGM convention.
void write_pgm(const Frame& frame, const std::string& path, int depth = 0);

/// Frame files of one input video, in presentation order.
struct Sequence {
    std::vector<std::string> paths; // absolute or dir-relative, ordered
    int depth_override = 0;         // 0 = trust each file header
};

/// Lists *.pgm under `dir` sorted lexicographically by filename. A sidecar
/// `frames.json` ({"order": [names...], "depth": 8|16}, both optional) can
/// reorder the frames or force the bit depth.
Sequence discover_sequence(const std::string& dir);

/// One row of the detections CSV. Coordinates are in the processed scale;
/// when the pipeline upsampled the frame, the original-scale coordinates are
/// carried alongside and written as extra orig_* columns.
struct DetectionRow {
    Detection det;
    bool has_original = false;
    BBox orig_bbox;
    double orig_cx = 0, orig_cy = 0;
};

struct TrackRow {
    int frame = 0;
    int track_id = 0;
    BBox bbox;
    double score = 0;
};

/// Ground-truth record for one frame; frames without a record have no target.
struct GtRecord {
    int frame = 0;
    double cx = 0, cy = 0;
    BBox bbox;
};

void write_detections_csv(const std::string& path, const std::vector<DetectionRow>& rows);
std::vector<DetectionRow> read_detections_csv(const std::string& path);

/// The exact bytes write_detections_csv would produce, for in-memory
/// output comparisons.
std::string detections_csv_text(const std::vector<DetectionRow>& rows);

void write_tracks_csv(const std::string& path, const std::vector<TrackRow>& rows);
std::vector<TrackRow> read_tracks_csv(const std::string& path);

void write_gt_csv(const std::string& path, const std::vector<GtRecord>& records);
std::vector<GtRecord> read_gt_csv(const std::string& path);

/// Fixed 6-decimal rendering used for every float written to CSV/JSON so
/// byte-level output comparisons are meaningful.
std::string format_fixed(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ligtrack::io
