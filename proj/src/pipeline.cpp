#include "ligtrack/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ligtrack/cc.hpp"
#include "ligtrack/lig.hpp"
#include "ligtrack/sort.hpp"
#include "ligtrack/upsample.hpp"

namespace fs = std::filesystem;

namespace ligtrack {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct FrameWork {
    std::vector<io::DetectionRow> rows;
    int width = 0, height = 0; // original (pre-upsample) size, for uniformity checks
    double read_ms = 0, upsample_ms = 0, lig_ms = 0, threshold_ms = 0, cc_ms = 0;
};

// one frame through the whole detection pipeline; lig_workers parallelizes
// the IG map rows (detect keeps it at 1 and parallelizes across frames)
FrameWork process_frame(const std::string& path, int index, int depth_override,
                        const PipelineConfig& cfg, const LigParams& lp, int lig_workers) {
    FrameWork w;
    auto t0 = Clock::now();
    Frame f = io::read_pgm(path, index, depth_override);
    w.read_ms = ms_since(t0);
    w.width = f.width;
    w.height = f.height;

    t0 = Clock::now();
    if (cfg.upsample_factor > 1) f = bicubic_upsample(f, cfg.upsample_factor);
    w.upsample_ms = ms_since(t0);

    t0 = Clock::now();
    IgMap ig = compute_ig_map(f, lp, lig_workers);
    w.lig_ms = ms_since(t0);

    t0 = Clock::now();
    double thresh = adaptive_threshold(ig, cfg.top_fraction);
    BinaryMask mask = binarize(ig, thresh);
    w.threshold_ms = ms_since(t0);

    t0 = Clock::now();
    BinaryMask dilated = dilate(mask, cfg.effective_dilation_side());
    std::vector<Component> comps = label_components(dilated, f);
    std::vector<Component> kept =
        rule_filter(comps, cfg.effective_area_min(), cfg.effective_area_max());
    std::vector<Detection> dets = select_targets(kept, cfg.top_n_targets, index);
    w.cc_ms = ms_since(t0);

    w.rows.reserve(dets.size());
    for (const Detection& d : dets) {
        io::DetectionRow row;
        row.det = d;
        if (cfg.upsample_factor > 1) {
            // original-scale columns use the same pure scale the evaluator
            // applies to ground truth, so the two are directly comparable
            double inv = 1.0 / cfg.upsample_factor;
            row.has_original = true;
            row.orig_bbox = {d.bbox.x_min * inv, d.bbox.y_min * inv, d.bbox.x_max * inv,
                             d.bbox.y_max * inv};
            row.orig_cx = d.cx * inv;
            row.orig_cy = d.cy * inv;
        }
        w.rows.push_back(row);
    }
    return w;
}

LigParams lig_params_for(const PipelineConfig& cfg) {
    LigParams lp;
    lp.patch_size = cfg.effective_patch_size();
    lp.center_size = cfg.effective_center_size();
    lp.sector_count = cfg.sector_count;
    lp.top_fraction = cfg.top_fraction;
    return lp;
}

json config_json(const PipelineConfig& cfg) {
    json j;
    j["patch_size"] = cfg.patch_size;
    j["center_size"] = cfg.center_size;
    j["sector_count"] = cfg.sector_count;
    j["top_fraction"] = cfg.top_fraction;
    j["dilation_side"] = cfg.dilation_side;
    j["area_min_exclusive"] = cfg.area_min_exclusive;
    j["area_max_exclusive"] = cfg.area_max_exclusive;
    j["scale_area_rule"] = cfg.scale_area_rule;
    j["upsample_factor"] = cfg.upsample_factor;
    j["top_n_targets"] = cfg.top_n_targets;
    j["tp_distance"] = cfg.tp_distance;
    j["sort"] = {{"iou_min", cfg.sort.iou_min},
                 {"max_age", cfg.sort.max_age},
                 {"min_hits", cfg.sort.min_hits},
                 {"process_noise_scale", cfg.sort.process_noise_scale},
                 {"measurement_noise_scale", cfg.sort.measurement_noise_scale}};
    return j;
}

} // namespace

DetectResult run_detect(const std::string& video_dir, const PipelineConfig& cfg, int workers) {
    cfg.validate();
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    io::Sequence seq = io::discover_sequence(video_dir);
    const std::size_t n = seq.paths.size();
    if (n == 0) throw std::runtime_error(video_dir + ": no frames found");
    LigParams lp = lig_params_for(cfg);

    int spawned = static_cast<int>(std::min<std::size_t>(workers, n));
    std::vector<FrameWork> work(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};

    auto body = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load(std::memory_order_relaxed)) return;
            try {
                work[i] = process_frame(seq.paths[i], static_cast<int>(i), seq.depth_override,
                                        cfg, lp, 1);
            } catch (const std::exception& e) {
                errors[i] = "frame " + std::to_string(i) + " (" + seq.paths[i] + "): " + e.what();
                failed.store(true);
            }
        }
    };

    auto wall0 = Clock::now();
    std::vector<std::thread> pool;
    pool.reserve(spawned - 1);
    for (int t = 1; t < spawned; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();

    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
    for (std::size_t i = 1; i < n; ++i)
        if (work[i].width != work[0].width || work[i].height != work[0].height)
            throw std::runtime_error(
                "frame " + std::to_string(i) + " (" + seq.paths[i] + "): size " +
                std::to_string(work[i].width) + "x" + std::to_string(work[i].height) +
                " differs from frame 0 (" + std::to_string(work[0].width) + "x" +
                std::to_string(work[0].height) + ")");

    DetectResult result;
    result.manifest.config = cfg;
    result.manifest.input_path = video_dir;
    result.manifest.workers = workers;
    double read = 0, up = 0, lig = 0, thr = 0, cc = 0;
    result.manifest.frame_detections.reserve(n);
    for (const FrameWork& w : work) {
        read += w.read_ms;
        up += w.upsample_ms;
        lig += w.lig_ms;
        thr += w.threshold_ms;
        cc += w.cc_ms;
        result.manifest.frame_detections.push_back(static_cast<int>(w.rows.size()));
        result.rows.insert(result.rows.end(), w.rows.begin(), w.rows.end());
    }
    double div = spawned;
    result.manifest.stage_ms = {{"read", read / div},
                                {"upsample", up / div},
                                {"lig", lig / div},
                                {"threshold", thr / div},
                                {"cc", cc / div}};
    result.manifest.wall_ms = ms_since(wall0);
    return result;
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["tool_version"] = m.tool_version;
    j["input_path"] = m.input_path;
    j["workers"] = m.workers;
    j["config"] = config_json(m.config);
    j["effective"] = {{"patch_size", m.config.effective_patch_size()},
                      {"center_size", m.config.effective_center_size()},
                      {"dilation_side", m.config.effective_dilation_side()},
                      {"area_min_exclusive", m.config.effective_area_min()},
                      {"area_max_exclusive", m.config.effective_area_max()}};
    json stages = json::object();
    for (const auto& [name, ms] : m.stage_ms) stages[name] = ms;
    j["stage_ms"] = stages;
    j["wall_ms"] = m.wall_ms;
    j["frame_detections"] = m.frame_detections;
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& path) {
    io::write_text_file(path, manifest_to_json(m));
}

std::vector<io::TrackRow> run_track(const std::vector<io::DetectionRow>& rows,
                                    const SortParams& params) {
    params.validate();
    std::vector<io::TrackRow> out;
    if (rows.empty()) return out;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].det.frame_index < rows[i - 1].det.frame_index)
            throw std::runtime_error("detections not sorted by frame: frame " +
                                     std::to_string(rows[i].det.frame_index) + " follows frame " +
                                     std::to_string(rows[i - 1].det.frame_index));

    SortTracker tracker(params);
    int first = rows.front().det.frame_index;
    int last = rows.back().det.frame_index;
    std::size_t pos = 0;
    for (int frame = first; frame <= last; ++frame) {
        std::vector<Detection> dets;
        while (pos < rows.size() && rows[pos].det.frame_index == frame)
            dets.push_back(rows[pos++].det);
        for (const TrackSnapshot& s : tracker.step(frame, dets)) {
            io::TrackRow r;
            r.frame = frame;
            r.track_id = s.id;
            r.bbox = s.bbox;
            r.score = s.score;
            out.push_back(r);
        }
    }
    return out;
}

MetricsReport run_eval_file(const std::string& input_csv, const std::string& gt_csv,
                            double tp_distance, int upsample_factor) {
    std::string text = io::read_text_file(input_csv);
    std::string head = text.substr(0, text.find('\n'));
    if (!head.empty() && head.back() == '\r') head.pop_back();

    std::vector<Detection> dets;
    if (head.rfind("frame,track_id", 0) == 0) {
        dets = detections_from_tracks(io::read_tracks_csv(input_csv));
    } else if (head.rfind("frame,x_min", 0) == 0) {
        for (const auto& r : io::read_detections_csv(input_csv)) dets.push_back(r.det);
    } else {
        throw std::runtime_error(input_csv + ": neither a detections nor a tracks CSV");
    }
    GroundTruth gt = make_ground_truth(io::read_gt_csv(gt_csv));
    return evaluate_detections(dets, gt, tp_distance, upsample_factor);
}

BenchReport run_bench(const std::string& video_dir, const PipelineConfig& cfg,
                      const std::vector<int>& worker_counts) {
    if (worker_counts.size() < 2)
        throw std::invalid_argument("bench needs at least two worker counts");
    if (worker_counts.front() != 1)
        throw std::invalid_argument("first worker count must be 1 (the speedup baseline)");
    for (int w : worker_counts)
        if (w < 1) throw std::invalid_argument("worker counts must be >= 1");
    cfg.validate();

    io::Sequence seq = io::discover_sequence(video_dir);
    const std::size_t n = seq.paths.size();
    if (n == 0) throw std::runtime_error(video_dir + ": no frames found");
    LigParams lp = lig_params_for(cfg);

    BenchReport report;
    report.worker_counts = worker_counts;
    report.frame_count = static_cast<int>(n);
    report.outputs_identical = true;

    std::string baseline_text;
    for (std::size_t c = 0; c < worker_counts.size(); ++c) {
        std::vector<io::DetectionRow> rows;
        double lig_total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            FrameWork w = process_frame(seq.paths[i], static_cast<int>(i), seq.depth_override,
                                        cfg, lp, worker_counts[c]);
            lig_total += w.lig_ms;
            rows.insert(rows.end(), w.rows.begin(), w.rows.end());
        }
        report.mean_lig_ms.push_back(lig_total / static_cast<double>(n));
        std::string text = io::detections_csv_text(rows);
        if (c == 0)
            baseline_text = std::move(text);
        else if (text != baseline_text)
            report.outputs_identical = false;
    }
    for (double mean : report.mean_lig_ms)
        report.speedup.push_back(mean > 0 ? report.mean_lig_ms.front() / mean : 0.0);
    return report;
}

std::string bench_to_json(const BenchReport& r) {
    json j;
    j["tool_version"] = kToolVersion;
    j["frame_count"] = r.frame_count;
    j["worker_counts"] = r.worker_counts;
    j["mean_lig_ms"] = r.mean_lig_ms;
    j["speedup"] = r.speedup;
    j["outputs_identical"] = r.outputs_identical;
    return j.dump(2) + "\n";
}

void run_synth(const Scenario& sc, const std::string& out_dir) {
    SynthResult res = generate_sequence(sc); // validates before anything is written
    fs::create_directories(out_dir);
    char name[32];
    for (const Frame& f : res.frames) {
        std::snprintf(name, sizeof name, "frame_%05d.pgm", f.index);
        io::write_pgm(f, (fs::path(out_dir) / name).string(), 16);
    }
    io::write_gt_csv((fs::path(out_dir) / "gt.csv").string(), res.gt);
    io::write_text_file((fs::path(out_dir) / "scenario.json").string(), scenario_to_json(sc));

    json j;
    j["tool_version"] = kToolVersion;
    j["rng"] = kSynthRngName;
    j["frame_count"] = static_cast<int>(res.frames.size());
    json specks = json::array();
    for (const SpeckEvent& s : res.specks)
        specks.push_back({{"frame", s.frame}, {"x", s.x}, {"y", s.y}});
    j["specks"] = specks;
    io::write_text_file((fs::path(out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

namespace {

void burn_border(Frame& f, const BBox& b) {
    int x0 = static_cast<int>(std::lround(b.x_min));
    int y0 = static_cast<int>(std::lround(b.y_min));
    int x1 = static_cast<int>(std::lround(b.x_max));
    int y1 = static_cast<int>(std::lround(b.y_max));
    auto put = [&](int x, int y) {
        if (x >= 0 && x < f.width && y >= 0 && y < f.height)
            f.pixels[static_cast<std::size_t>(y) * f.width + x] = 1.0;
    };
    for (int o = 0; o < 3; ++o) { // 3-px border growing outward from the box
        int left = x0 - o, right = x1 + o, top = y0 - o, bottom = y1 + o;
        for (int x = left; x <= right; ++x) {
            put(x, top);
            put(x, bottom);
        }
        for (int y = top; y <= bottom; ++y) {
            put(left, y);
            put(right, y);
        }
    }
}

} // namespace

void run_render(const std::string& video_dir, const std::vector<io::TrackRow>& tracks,
                const std::string& out_dir) {
    io::Sequence seq = io::discover_sequence(video_dir);
    const std::size_t n = seq.paths.size();
    if (n == 0) throw std::runtime_error(video_dir + ": no frames found");

    std::map<int, std::vector<BBox>> boxes;
    for (const auto& t : tracks) {
        if (t.frame < 0 || t.frame >= static_cast<int>(n))
            throw std::runtime_error("track row references missing frame " +
                                     std::to_string(t.frame));
        boxes[t.frame].push_back(t.bbox);
    }

    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < n; ++i) {
        Frame f = io::read_pgm(seq.paths[i], static_cast<int>(i), seq.depth_override);
        auto it = boxes.find(static_cast<int>(i));
        if (it != boxes.end())
            for (const BBox& b : it->second) burn_border(f, b);
        io::write_pgm(f, (fs::path(out_dir) / fs::path(seq.paths[i]).filename()).string());
    }
}

void run_upsample(const std::string& video_dir, int factor, const std::string& out_dir) {
    io::Sequence seq = io::discover_sequence(video_dir);
    if (seq.paths.empty()) throw std::runtime_error(video_dir + ": no frames found");
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < seq.paths.size(); ++i) {
        Frame f = io::read_pgm(seq.paths[i], static_cast<int>(i), seq.depth_override);
        Frame up = bicubic_upsample(f, factor);
        io::write_pgm(up, (fs::path(out_dir) / fs::path(seq.paths[i]).filename()).string());
    }
}

PipelineConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    try {
        PipelineConfig cfg;
        cfg.patch_size = j.value("patch_size", cfg.patch_size);
        cfg.center_size = j.value("center_size", cfg.center_size);
        cfg.sector_count = j.value("sector_count", cfg.sector_count);
        cfg.top_fraction = j.value("top_fraction", cfg.top_fraction);
        cfg.dilation_side = j.value("dilation_side", cfg.dilation_side);
        cfg.area_min_exclusive = j.value("area_min_exclusive", cfg.area_min_exclusive);
        cfg.area_max_exclusive = j.value("area_max_exclusive", cfg.area_max_exclusive);
        cfg.scale_area_rule = j.value("scale_area_rule", cfg.scale_area_rule);
        cfg.upsample_factor = j.value("upsample_factor", cfg.upsample_factor);
        cfg.top_n_targets = j.value("top_n_targets", cfg.top_n_targets);
        cfg.tp_distance = j.value("tp_distance", cfg.tp_distance);
        if (j.contains("sort")) {
            const json& s = j.at("sort");
            cfg.sort.iou_min = s.value("iou_min", cfg.sort.iou_min);
            cfg.sort.max_age = s.value("max_age", cfg.sort.max_age);
            cfg.sort.min_hits = s.value("min_hits", cfg.sort.min_hits);
            cfg.sort.process_noise_scale = s.value("process_noise_scale", cfg.sort.process_noise_scale);
            cfg.sort.measurement_noise_scale =
                s.value("measurement_noise_scale", cfg.sort.measurement_noise_scale);
        }
        return cfg;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
}

std::string config_to_json(const PipelineConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

PipelineConfig load_config_file(const std::string& path) {
    try {
        return config_from_json(io::read_text_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

} // namespace ligtrack
