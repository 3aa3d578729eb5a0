#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ligtrack/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ligtrack;

namespace {

// LIGTRACK_WORKERS supplies the default worker count; --workers overrides it
int env_default_workers() {
    const char* env = std::getenv("LIGTRACK_WORKERS");
    if (env == nullptr || *env == '\0') return 1;
    int v = 0;
    std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
        throw std::invalid_argument("LIGTRACK_WORKERS must be a positive integer, got '" + s +
                                    "'");
    return v;
}

// every detection-config flag a subcommand may override
struct ConfigFlags {
    std::string config_path;
    PipelineConfig values;
    CLI::Option* factor = nullptr;
    CLI::Option* patch = nullptr;
    CLI::Option* center = nullptr;
    CLI::Option* sectors = nullptr;
    CLI::Option* top_fraction = nullptr;
    CLI::Option* dilation = nullptr;
    CLI::Option* area_min = nullptr;
    CLI::Option* area_max = nullptr;
    CLI::Option* scale_area = nullptr;
    CLI::Option* top_n = nullptr;
    CLI::Option* tp_distance = nullptr;
    CLI::Option* iou_min = nullptr;
    CLI::Option* max_age = nullptr;
    CLI::Option* min_hits = nullptr;

    void attach(CLI::App* cmd, bool with_detect, bool with_sort) {
        cmd->add_option("--config", config_path, "JSON config file; flags override its values");
        if (with_detect) {
            factor = cmd->add_option("--factor", values.upsample_factor,
                                     "upsample factor (1, 2 or 4)");
            patch = cmd->add_option("--patch-size", values.patch_size,
                                    "window size k (0 = derive from factor)");
            center = cmd->add_option("--center-size", values.center_size,
                                     "center cell size (0 = derive)");
            sectors = cmd->add_option("--sector-count", values.sector_count,
                                      "gradient sector count");
            top_fraction = cmd->add_option("--top-fraction", values.top_fraction,
                                           "fraction of pixels averaged for the threshold");
            dilation = cmd->add_option("--dilation-side", values.dilation_side,
                                       "square SE side (0 = derive)");
            area_min = cmd->add_option("--area-min", values.area_min_exclusive,
                                       "exclusive lower area bound");
            area_max = cmd->add_option("--area-max", values.area_max_exclusive,
                                       "exclusive upper area bound");
            scale_area = cmd->add_flag("--scale-area-rule", values.scale_area_rule,
                                       "scale area bounds by factor^2");
            top_n = cmd->add_option("--top-n", values.top_n_targets,
                                    "detections kept per frame");
        }
        tp_distance = cmd->add_option("--tp-distance", values.tp_distance,
                                      "centroid distance for a true positive (original scale)");
        if (with_sort) {
            iou_min = cmd->add_option("--iou-min", values.sort.iou_min,
                                      "minimum IoU for a track-detection match");
            max_age = cmd->add_option("--max-age", values.sort.max_age,
                                      "frames a track may coast unmatched");
            min_hits = cmd->add_option("--min-hits", values.sort.min_hits,
                                       "updates required before a track is reported");
        }
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg =
            config_path.empty() ? PipelineConfig{} : load_config_file(config_path);
        auto take_int = [](CLI::Option* o, int from, int& to) {
            if (o != nullptr && o->count() > 0) to = from;
        };
        auto take_double = [](CLI::Option* o, double from, double& to) {
            if (o != nullptr && o->count() > 0) to = from;
        };
        take_int(factor, values.upsample_factor, cfg.upsample_factor);
        take_int(patch, values.patch_size, cfg.patch_size);
        take_int(center, values.center_size, cfg.center_size);
        take_int(sectors, values.sector_count, cfg.sector_count);
        take_double(top_fraction, values.top_fraction, cfg.top_fraction);
        take_int(dilation, values.dilation_side, cfg.dilation_side);
        take_int(area_min, values.area_min_exclusive, cfg.area_min_exclusive);
        take_int(area_max, values.area_max_exclusive, cfg.area_max_exclusive);
        if (scale_area != nullptr && scale_area->count() > 0)
            cfg.scale_area_rule = values.scale_area_rule;
        take_int(top_n, values.top_n_targets, cfg.top_n_targets);
        take_double(tp_distance, values.tp_distance, cfg.tp_distance);
        take_double(iou_min, values.sort.iou_min, cfg.sort.iou_min);
        take_int(max_age, values.sort.max_age, cfg.sort.max_age);
        take_int(min_hits, values.sort.min_hits, cfg.sort.min_hits);
        return cfg;
    }
};

std::vector<int> parse_counts(const std::string& list) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        std::string tok = list.substr(start, comma == std::string::npos ? std::string::npos
                                                                        : comma - start);
        int v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw std::invalid_argument("bad worker count '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"small moving-target detection and tracking for low-quality infrared video"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    int workers = 1;
    try {
        workers = env_default_workers();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    // detect
    auto* detect = app.add_subcommand("detect", "run the detection pipeline over a frame dir");
    std::string det_input, det_out, det_manifest;
    detect->add_option("--input", det_input, "directory of PGM frames")->required();
    detect->add_option("--out", det_out, "detections CSV to write")->required();
    detect->add_option("--manifest", det_manifest,
                       "run manifest path (default: manifest.json beside --out)");
    detect->add_option("--workers", workers, "frame-level worker threads");
    ConfigFlags det_cfg;
    det_cfg.attach(detect, true, false);

    // track
    auto* track = app.add_subcommand("track", "associate detections into tracks");
    std::string trk_input, trk_out;
    track->add_option("--input", trk_input, "detections CSV")->required();
    track->add_option("--out", trk_out, "tracks CSV to write")->required();
    ConfigFlags trk_cfg;
    trk_cfg.attach(track, false, true);

    // eval
    auto* eval = app.add_subcommand("eval", "score detections or tracks against ground truth");
    std::string ev_input, ev_gt, ev_out;
    eval->add_option("--input", ev_input, "detections or tracks CSV")->required();
    eval->add_option("--gt", ev_gt, "ground-truth CSV")->required();
    eval->add_option("--out", ev_out, "metrics JSON to write (also printed)");
    int ev_factor = 1;
    eval->add_option("--factor", ev_factor, "upsample factor the input was produced at");
    ConfigFlags ev_cfg;
    ev_cfg.attach(eval, false, false);

    // bench
    auto* bench = app.add_subcommand("bench", "measure IG-map scaling across worker counts");
    std::string bn_input, bn_out, bn_counts = "1,4";
    bench->add_option("--input", bn_input, "directory of PGM frames")->required();
    bench->add_option("--counts", bn_counts, "comma-separated worker counts, first must be 1");
    bench->add_option("--out", bn_out, "bench report JSON to write (also printed)");
    ConfigFlags bn_cfg;
    bn_cfg.attach(bench, true, false);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic sequence with ground truth");
    std::string sy_scenario, sy_out;
    synth->add_option("--scenario", sy_scenario, "scenario JSON file")->required();
    synth->add_option("--out", sy_out, "output directory")->required();

    // render
    auto* render = app.add_subcommand("render", "burn track boxes into frames for inspection");
    std::string rd_input, rd_tracks, rd_out;
    render->add_option("--input", rd_input, "directory of PGM frames")->required();
    render->add_option("--tracks", rd_tracks, "tracks CSV")->required();
    render->add_option("--out", rd_out, "output directory")->required();

    // upsample
    auto* upsample = app.add_subcommand("upsample", "bicubic-upsample a frame directory");
    std::string up_input, up_out;
    int up_factor = 2;
    upsample->add_option("--input", up_input, "directory of PGM frames")->required();
    upsample->add_option("--factor", up_factor, "2 or 4")->required();
    upsample->add_option("--out", up_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(detect)) {
            PipelineConfig cfg = det_cfg.resolve();
            DetectResult res = run_detect(det_input, cfg, workers);
            auto t0 = std::chrono::steady_clock::now();
            io::write_detections_csv(det_out, res.rows);
            double write_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
            res.manifest.stage_ms.emplace_back("write", write_ms);
            std::string manifest_path =
                det_manifest.empty() ? (fs::path(det_out).parent_path() / "manifest.json").string()
                                     : det_manifest;
            write_manifest(res.manifest, manifest_path);
            std::cout << "processed " << res.manifest.frame_detections.size() << " frames, "
                      << res.rows.size() << " detections, " << io::format_fixed(res.manifest.wall_ms)
                      << " ms\n";
        } else if (app.got_subcommand(track)) {
            PipelineConfig cfg = trk_cfg.resolve();
            auto rows = io::read_detections_csv(trk_input);
            auto out_rows = run_track(rows, cfg.sort);
            io::write_tracks_csv(trk_out, out_rows);
            std::cout << "tracked " << rows.size() << " detections into " << out_rows.size()
                      << " reported rows\n";
        } else if (app.got_subcommand(eval)) {
            PipelineConfig cfg = ev_cfg.resolve();
            MetricsReport report = run_eval_file(ev_input, ev_gt, cfg.tp_distance, ev_factor);
            std::string text = metrics_to_json(report);
            std::cout << text;
            if (!ev_out.empty()) io::write_text_file(ev_out, text);
        } else if (app.got_subcommand(bench)) {
            PipelineConfig cfg = bn_cfg.resolve();
            BenchReport report = run_bench(bn_input, cfg, parse_counts(bn_counts));
            for (std::size_t i = 0; i < report.worker_counts.size(); ++i)
                std::cout << "workers " << report.worker_counts[i] << ": "
                          << io::format_fixed(report.mean_lig_ms[i]) << " ms/frame ("
                          << io::format_fixed(report.speedup[i]) << "x)\n";
            std::cout << "outputs identical: " << (report.outputs_identical ? "yes" : "no")
                      << "\n";
            if (!bn_out.empty()) io::write_text_file(bn_out, bench_to_json(report));
            if (!report.outputs_identical) {
                std::cerr << "error: detection outputs differ across worker counts\n";
                return 2;
            }
        } else if (app.got_subcommand(synth)) {
            Scenario sc = read_scenario_file(sy_scenario);
            run_synth(sc, sy_out);
            std::cout << "wrote " << sc.frame_count << " frames to " << sy_out << "\n";
        } else if (app.got_subcommand(render)) {
            auto tracks = io::read_tracks_csv(rd_tracks);
            run_render(rd_input, tracks, rd_out);
            std::cout << "rendered " << tracks.size() << " track boxes into " << rd_out << "\n";
        } else if (app.got_subcommand(upsample)) {
            run_upsample(up_input, up_factor, up_out);
            std::cout << "upsampled frames written to " << up_out << "\n";
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
