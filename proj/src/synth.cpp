#include "ligtrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace ligtrack {

namespace {

using json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// stream tag for the once-per-run clutter parameter draws; frame streams use
// the frame index itself, which cannot collide with this value
constexpr std::uint64_t kClutterTag = 0x636c757474657221ULL;

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t tag) {
    return std::mt19937_64(splitmix64(seed ^ tag));
}

double next_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53; // [0, 1)
}

// Box-Muller with a cached spare so one gaussian costs half a pair
struct GaussianStream {
    std::mt19937_64* eng;
    double spare = 0;
    bool has_spare = false;

    double next() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        double u1;
        do {
            u1 = next_uniform(*eng);
        } while (u1 == 0.0);
        double u2 = next_uniform(*eng);
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

// adds an isotropic Gaussian, truncated to a +/-4 sigma box
void add_gaussian(std::vector<double>& img, int w, int h, double cx, double cy,
                  double amplitude, double sigma) {
    double reach = 4.0 * sigma;
    int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    int x1 = std::min(w - 1, static_cast<int>(std::ceil(cx + reach)));
    int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    int y1 = std::min(h - 1, static_cast<int>(std::ceil(cy + reach)));
    double inv = 1.0 / (2.0 * sigma * sigma);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double dx = x - cx, dy = y - cy;
            img[static_cast<size_t>(y) * w + x] += amplitude * std::exp(-(dx * dx + dy * dy) * inv);
        }
}

// first uniform of frame t's stream decides whether a speck fires at t
bool speck_draw(const Scenario& sc, int t) {
    if (t < 0) return false;
    auto eng = make_stream(sc.seed, static_cast<std::uint64_t>(t));
    return next_uniform(eng) < sc.spurious_rate;
}

} // namespace

void Scenario::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("frame size must be positive");
    if (frame_count < 1) throw std::invalid_argument("frame_count must be >= 1");
    if (background_level < 0.0 || background_level > 1.0)
        throw std::invalid_argument("background_level must be in [0,1]");
    if (target.amplitude < 0.0) throw std::invalid_argument("target amplitude must be >= 0");
    if (target.amplitude + background_level > 1.0)
        throw std::invalid_argument("target amplitude + background_level must be <= 1");
    if (target.sigma <= 0.0) throw std::invalid_argument("target sigma must be positive");
    // linear motion: checking both endpoints covers every frame
    for (int t : {0, frame_count - 1}) {
        double cx = target.start.x + t * target.velocity.x;
        double cy = target.start.y + t * target.velocity.y;
        if (cx < 0.0 || cx > width - 1 || cy < 0.0 || cy > height - 1)
            throw std::invalid_argument("target leaves the frame bounds at frame " +
                                        std::to_string(t));
    }
    if (clutter.count < 0) throw std::invalid_argument("clutter count must be >= 0");
    if (static_cast<int>(clutter.positions.size()) != clutter.count)
        throw std::invalid_argument("clutter positions must list exactly `count` centers");
    if (clutter.count > 0) {
        if (clutter.amplitude_min < 0.0 || clutter.amplitude_max < clutter.amplitude_min)
            throw std::invalid_argument("clutter amplitude range is invalid");
        if (clutter.sigma_min <= 0.0 || clutter.sigma_max < clutter.sigma_min)
            throw std::invalid_argument("clutter sigma range is invalid");
    }
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
    if (flicker < 0.0 || flicker >= 1.0) throw std::invalid_argument("flicker must be in [0,1)");
    if (spurious_rate < 0.0 || spurious_rate > 1.0)
        throw std::invalid_argument("spurious_rate must be in [0,1]");
}

SynthResult generate_sequence(const Scenario& sc) {
    sc.validate();
    const int w = sc.width, h = sc.height;
    const size_t n = static_cast<size_t>(w) * h;

    // static part, rendered once and reused by every frame
    std::vector<double> base(n, sc.background_level);
    {
        auto eng = make_stream(sc.seed, kClutterTag);
        for (int i = 0; i < sc.clutter.count; ++i) {
            double amp = sc.clutter.amplitude_min +
                         next_uniform(eng) * (sc.clutter.amplitude_max - sc.clutter.amplitude_min);
            double sigma = sc.clutter.sigma_min +
                           next_uniform(eng) * (sc.clutter.sigma_max - sc.clutter.sigma_min);
            add_gaussian(base, w, h, sc.clutter.positions[i].x, sc.clutter.positions[i].y,
                         amp, sigma);
        }
    }

    SynthResult out;
    out.frames.reserve(sc.frame_count);
    out.gt.reserve(sc.frame_count);

    std::vector<double> work(n);
    for (int t = 0; t < sc.frame_count; ++t) {
        double tx = sc.target.start.x + t * sc.target.velocity.x;
        double ty = sc.target.start.y + t * sc.target.velocity.y;

        // frame stream consumption order: speck draw, speck position,
        // flicker gain, then per-pixel noise
        auto eng = make_stream(sc.seed, static_cast<std::uint64_t>(t));
        bool fired = next_uniform(eng) < sc.spurious_rate;
        bool active = fired && !speck_draw(sc, t - 1);

        work = base;
        add_gaussian(work, w, h, tx, ty, sc.target.amplitude, sc.target.sigma);

        if (active) {
            // rejection-sample a position clear of the border and the target
            bool placed = false;
            double px = 0, py = 0;
            for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
                px = kSpeckMargin + next_uniform(eng) * (w - 1 - 2.0 * kSpeckMargin);
                py = kSpeckMargin + next_uniform(eng) * (h - 1 - 2.0 * kSpeckMargin);
                placed = std::hypot(px - tx, py - ty) >= kSpeckClearance;
            }
            if (placed) {
                add_gaussian(work, w, h, px, py, sc.target.amplitude, sc.target.sigma);
                out.specks.push_back({t, px, py});
            }
        }

        double gain = 1.0 + sc.flicker * (2.0 * next_uniform(eng) - 1.0);

        Frame frame;
        frame.width = w;
        frame.height = h;
        frame.index = t;
        frame.source_depth = 16;
        frame.pixels.resize(n);
        if (sc.noise_sigma > 0.0) {
            GaussianStream noise{&eng};
            for (size_t i = 0; i < n; ++i)
                frame.pixels[i] = std::clamp(gain * work[i] + sc.noise_sigma * noise.next(), 0.0, 1.0);
        } else {
            for (size_t i = 0; i < n; ++i)
                frame.pixels[i] = std::clamp(gain * work[i], 0.0, 1.0);
        }
        out.frames.push_back(std::move(frame));

        io::GtRecord rec;
        rec.frame = t;
        rec.cx = tx;
        rec.cy = ty;
        double r = 2.0 * sc.target.sigma;
        rec.bbox = {tx - r, ty - r, tx + r, ty + r};
        out.gt.push_back(rec);
    }
    return out;
}

namespace {

Point point_from_json(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw std::runtime_error(std::string("scenario: ") + what + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario: ") + e.what());
    }
    try {
        Scenario sc;
        sc.width = j.at("width").get<int>();
        sc.height = j.at("height").get<int>();
        sc.frame_count = j.at("frame_count").get<int>();
        sc.background_level = j.at("background_level").get<double>();
        const json& t = j.at("target");
        sc.target.start = point_from_json(t.at("start"), "target.start");
        sc.target.velocity = point_from_json(t.at("velocity"), "target.velocity");
        sc.target.amplitude = t.at("amplitude").get<double>();
        sc.target.sigma = t.at("sigma").get<double>();
        if (j.contains("clutter")) {
            const json& c = j.at("clutter");
            sc.clutter.count = c.value("count", 0);
            if (c.contains("amplitude")) {
                sc.clutter.amplitude_min = c.at("amplitude").at(0).get<double>();
                sc.clutter.amplitude_max = c.at("amplitude").at(1).get<double>();
            }
            if (c.contains("sigma")) {
                sc.clutter.sigma_min = c.at("sigma").at(0).get<double>();
                sc.clutter.sigma_max = c.at("sigma").at(1).get<double>();
            }
            if (c.contains("positions"))
                for (const auto& p : c.at("positions"))
                    sc.clutter.positions.push_back(point_from_json(p, "clutter position"));
        }
        sc.noise_sigma = j.value("noise_sigma", 0.0);
        sc.flicker = j.value("flicker", 0.0);
        sc.spurious_rate = j.value("spurious_rate", 0.0);
        sc.seed = j.value("seed", std::uint64_t{0});
        return sc;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scenario: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& sc) {
    json j;
    j["width"] = sc.width;
    j["height"] = sc.height;
    j["frame_count"] = sc.frame_count;
    j["background_level"] = sc.background_level;
    j["target"] = {{"start", {sc.target.start.x, sc.target.start.y}},
                   {"velocity", {sc.target.velocity.x, sc.target.velocity.y}},
                   {"amplitude", sc.target.amplitude},
                   {"sigma", sc.target.sigma}};
    json positions = json::array();
    for (const auto& p : sc.clutter.positions) positions.push_back({p.x, p.y});
    j["clutter"] = {{"count", sc.clutter.count},
                    {"amplitude", {sc.clutter.amplitude_min, sc.clutter.amplitude_max}},
                    {"sigma", {sc.clutter.sigma_min, sc.clutter.sigma_max}},
                    {"positions", positions}};
    j["noise_sigma"] = sc.noise_sigma;
    j["flicker"] = sc.flicker;
    j["spurious_rate"] = sc.spurious_rate;
    j["seed"] = sc.seed;
    return j.dump(2) + "\n";
}

Scenario read_scenario_file(const std::string& path) {
    try {
        return scenario_from_json(io::read_text_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_scenario_file(const Scenario& sc, const std::string& path) {
    io::write_text_file(path, scenario_to_json(sc));
}

} // namespace ligtrack
