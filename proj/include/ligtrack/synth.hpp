#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ligtrack/core.hpp"
#include "ligtrack/io.hpp"

namespace ligtrack {

/// Moving point target rendered as an isotropic Gaussian.
struct TargetSpec {
    Point start;    // center at frame 0
    Point velocity; // px/frame, center(t) = start + t*velocity
    double amplitude = 0.5;
    double sigma = 1.5;
};

/// Static background clutter blobs. Per-blob amplitude and sigma are drawn
/// once from the given ranges using a dedicated RNG stream, so the blobs are
/// identical in every frame of a run.
struct ClutterSpec {
    int count = 0;
    double amplitude_min = 0, amplitude_max = 0;
    double sigma_min = 1, sigma_max = 1;
    std::vector<Point> positions; // exactly `count` static centers
};

struct Scenario {
    int width = 0, height = 0;
    int frame_count = 0;
    double background_level = 0;
    TargetSpec target;
    ClutterSpec clutter;
    double noise_sigma = 0;    // i.i.d. per-pixel Gaussian, applied after the gain
    double flicker = 0;        // per-frame global gain = 1 + flicker * U(-1,1)
    double spurious_rate = 0;  // P(one-frame bright speck); never two frames in a row
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when the target leaves the frame bounds,
    /// amplitude + background exceeds 1, or any field is out of range.
    void validate() const;
};

/// A one-frame bright speck that was actually placed. Specks share the
/// target's amplitude and sigma (a confusable false target), are active on
/// frame t iff the rate draw fires at t but not at t-1, and are placed at
/// least kSpeckClearance px from the target center of their frame.
struct SpeckEvent {
    int frame = 0;
    double x = 0, y = 0;
};

inline constexpr double kSpeckClearance = 25.0; // min distance to the target center
inline constexpr double kSpeckMargin = 8.0;     // min distance to the frame border

/// Seed derivation and generator recorded in run metadata: every stream is an
/// mt19937_64 seeded with splitmix64(seed ^ stream_tag).
inline constexpr const char* kSynthRngName = "splitmix64-mt19937_64";

struct SynthResult {
    std::vector<Frame> frames;        // 16-bit depth, indices 0..frame_count-1
    std::vector<io::GtRecord> gt;     // one record per frame, exact target center
    std::vector<SpeckEvent> specks;   // for false-positive attribution in tests
};

/// Renders frame t = clamp(gain_t * (background + clutter + target + speck)
/// + noise, [0,1]). Deterministic given the scenario: each frame draws from
/// its own RNG stream, so regeneration is byte-identical. GT bboxes are
/// +/-2 sigma squares around the exact center.
SynthResult generate_sequence(const Scenario& sc);

/// JSON mirror of the Scenario fields.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);

Scenario read_scenario_file(const std::string& path);
void write_scenario_file(const Scenario& sc, const std::string& path);

} // namespace ligtrack
