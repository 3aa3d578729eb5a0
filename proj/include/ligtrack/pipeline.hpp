#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ligtrack/core.hpp"
#include "ligtrack/eval.hpp"
#include "ligtrack/io.hpp"
#include "ligtrack/synth.hpp"

namespace ligtrack {

inline constexpr const char* kToolVersion = "0.1.0";

/// Record of one detect run: the effective configuration, per-stage timings,
/// and per-frame detection counts. Per-frame stage times are summed across
/// workers and divided by the number of threads actually spawned, so the
/// per-stage totals stay comparable to the run's wall-clock time.
struct RunManifest {
    PipelineConfig config;
    std::string input_path;
    int workers = 1;
    std::vector<std::pair<std::string, double>> stage_ms; // (stage, total ms) in stage order
    double wall_ms = 0;
    std::vector<int> frame_detections; // selected detections per frame, frame order
    std::string tool_version = kToolVersion;
};

struct DetectResult {
    std::vector<io::DetectionRow> rows;
    RunManifest manifest;
};

/// Runs the per-frame detection pipeline (optional bicubic upsample, IG map,
/// adaptive threshold, binarize, dilate, component labeling, rule filter,
/// target selection) over every frame of `video_dir`. Frames are distributed
/// across `workers` threads; row order and content are byte-identical for
/// every worker count. Throws std::runtime_error (with the frame index) for
/// unreadable frames, mixed frame sizes, or an empty directory.
DetectResult run_detect(const std::string& video_dir, const PipelineConfig& cfg, int workers);

std::string manifest_to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& path);

/// Steps the tracker over every frame of [first, last] (inclusive), feeding
/// empty detection lists on gap frames so dropouts age tracks out. Rows must
/// be sorted by frame (non-decreasing); unsorted input throws
/// std::runtime_error. Empty input yields an empty track list.
std::vector<io::TrackRow> run_track(const std::vector<io::DetectionRow>& rows,
                                    const SortParams& params);

/// Scores a detections or tracks CSV (recognized by its header row) against
/// a ground-truth CSV.
MetricsReport run_eval_file(const std::string& input_csv, const std::string& gt_csv,
                            double tp_distance, int upsample_factor);

/// Result of one IG-map scaling benchmark across worker counts.
struct BenchReport {
    std::vector<int> worker_counts;  // first entry is the 1-worker baseline
    std::vector<double> mean_lig_ms; // mean per-frame IG time, same order
    std::vector<double> speedup;     // baseline mean / this mean
    bool outputs_identical = false;  // detections byte-equal across counts
    int frame_count = 0;
};

/// Processes the sequence once per worker count with the IG computation
/// row-parallel at that width (frames sequential, so the measured speedup is
/// the IG kernel's own scaling). Requires >= 2 worker counts, the first
/// being 1. Verifies the detection output is byte-identical across counts.
BenchReport run_bench(const std::string& video_dir, const PipelineConfig& cfg,
                      const std::vector<int>& worker_counts);
std::string bench_to_json(const BenchReport& r);

/// Writes frame_%05d.pgm files, gt.csv, scenario.json (echo of `sc`), and
/// manifest.json (tool version, RNG name, speck events) into out_dir.
void run_synth(const Scenario& sc, const std::string& out_dir);

/// Copies every frame into out_dir (same filename) with a 3-px max-intensity
/// border burned in around each track box of that frame, clipped at the
/// edges. Throws if a track row references a frame outside the sequence.
void run_render(const std::string& video_dir, const std::vector<io::TrackRow>& tracks,
                const std::string& out_dir);

/// Bicubic-upsamples every frame of the sequence into out_dir (same
/// filenames).
void run_upsample(const std::string& video_dir, int factor, const std::string& out_dir);

/// JSON mirror of PipelineConfig (nested "sort" object). Absent fields keep
/// their defaults.
PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config_file(const std::string& path);

} // namespace ligtrack
