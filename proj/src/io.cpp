#include "ligtrack/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;

namespace ligtrack::io {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// PGM header tokens are separated by whitespace; '#' starts a comment that
// runs to end of line.
std::size_t skip_separators(const std::string& buf, std::size_t pos) {
    while (pos < buf.size()) {
        char c = buf[pos];
        if (c == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    return pos;
}

long parse_header_int(const std::string& buf, std::size_t& pos, const std::string& path) {
    pos = skip_separators(buf, pos);
    std::size_t start = pos;
    while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') ++pos;
    if (pos == start) fail(path, "malformed PGM header");
    long v = 0;
    std::from_chars(buf.data() + start, buf.data() + pos, v);
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail_line(path, line, "not a number: '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& path, std::size_t line) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail_line(path, line, "not an integer: '" + s + "'");
    return v;
}

// Reads non-empty lines, strips a trailing '\r', checks the header.
std::vector<std::string> read_csv_lines(const std::string& path, const std::string& header,
                                        const std::string& alt_header = "") {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) fail(path, "missing CSV header");
    if (lines.front() != header && (alt_header.empty() || lines.front() != alt_header))
        fail_line(path, 1, "unexpected CSV header: '" + lines.front() + "'");
    return lines;
}

const char* kDetHeader = "frame,x_min,y_min,x_max,y_max,cx,cy,score,area";
const char* kDetHeaderOrig =
    "frame,x_min,y_min,x_max,y_max,cx,cy,score,area,"
    "orig_x_min,orig_y_min,orig_x_max,orig_y_max,orig_cx,orig_cy";
const char* kTrackHeader = "frame,track_id,x_min,y_min,x_max,y_max,score";
const char* kGtHeader = "frame,cx,cy,x_min,y_min,x_max,y_max";

} // namespace

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string read_text_file(const std::string& path) { return slurp(path); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    out << content;
    if (!out) fail(path, "write failed");
}

Frame read_pgm(const std::string& path, int index, int depth_override) {
    if (depth_override != 0 && depth_override != 8 && depth_override != 16)
        fail(path, "depth override must be 8 or 16");
    std::string buf = slurp(path);
    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5')
        fail(path, "not a binary PGM (P5) file");
    std::size_t pos = 2;
    long w = parse_header_int(buf, pos, path);
    long h = parse_header_int(buf, pos, path);
    long maxval = parse_header_int(buf, pos, path);
    if (w < 1 || h < 1) fail(path, "bad PGM dimensions");
    if (maxval != 255 && maxval != 65535)
        fail(path, "unsupported PGM maxval " + std::to_string(maxval) + " (need 255 or 65535)");
    if (pos >= buf.size()) fail(path, "truncated PGM header");
    ++pos; // exactly one separator byte between maxval and raster

    int file_depth = maxval > 255 ? 16 : 8;
    std::size_t bytes_per = file_depth == 16 ? 2 : 1;
    std::size_t need = static_cast<std::size_t>(w) * h * bytes_per;
    if (buf.size() - pos < need) fail(path, "truncated PGM raster");

    int depth = depth_override ? depth_override : file_depth;
    double divisor = static_cast<double>((1u << depth) - 1u);
    Frame f;
    f.width = static_cast<int>(w);
    f.height = static_cast<int>(h);
    f.index = index;
    f.source_depth = depth;
    f.pixels.resize(static_cast<std::size_t>(w) * h);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data()) + pos;
    for (std::size_t i = 0; i < f.pixels.size(); ++i) {
        unsigned v;
        if (file_depth == 16) {
            v = static_cast<unsigned>(p[2 * i]) << 8 | p[2 * i + 1];
        } else {
            v = p[i];
        }
        f.pixels[i] = std::min(1.0, v / divisor);
    }
    f.validate();
    return f;
}

void write_pgm(const Frame& frame, const std::string& path, int depth) {
    frame.validate();
    if (depth == 0) depth = frame.source_depth;
    if (depth != 8 && depth != 16) fail(path, "PGM depth must be 8 or 16");
    unsigned maxval = (1u << depth) - 1u;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    out << "P5\n" << frame.width << " " << frame.height << "\n" << maxval << "\n";
    std::vector<unsigned char> raster;
    raster.reserve(frame.pixels.size() * (depth == 16 ? 2 : 1));
    for (double v : frame.pixels) {
        auto q = static_cast<long>(std::lround(v * maxval));
        q = std::clamp(q, 0L, static_cast<long>(maxval));
        if (depth == 16) {
            raster.push_back(static_cast<unsigned char>(q >> 8));
            raster.push_back(static_cast<unsigned char>(q & 0xff));
        } else {
            raster.push_back(static_cast<unsigned char>(q));
        }
    }
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
    if (!out) fail(path, "write failed");
}

Sequence discover_sequence(const std::string& dir) {
    if (!fs::is_directory(dir)) fail(dir, "not a directory");
    Sequence seq;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());

    fs::path sidecar = fs::path(dir) / "frames.json";
    if (fs::exists(sidecar)) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(slurp(sidecar.string()));
        } catch (const nlohmann::json::exception& e) {
            fail(sidecar.string(), e.what());
        }
        if (j.contains("depth")) {
            int d = j["depth"].get<int>();
            if (d != 8 && d != 16) fail(sidecar.string(), "depth must be 8 or 16");
            seq.depth_override = d;
        }
        if (j.contains("order")) {
            names.clear();
            for (const auto& n : j["order"]) {
                std::string name = n.get<std::string>();
                if (!fs::exists(fs::path(dir) / name))
                    fail(sidecar.string(), "ordered frame not found: " + name);
                names.push_back(name);
            }
        }
    }
    for (const auto& n : names)
        seq.paths.push_back((fs::path(dir) / n).string());
    return seq;
}

std::string detections_csv_text(const std::vector<DetectionRow>& rows) {
    bool with_orig = !rows.empty() && rows.front().has_original;
    std::ostringstream out;
    out << (with_orig ? kDetHeaderOrig : kDetHeader) << "\n";
    for (const auto& r : rows) {
        if (r.has_original != with_orig)
            throw std::logic_error("detection rows disagree on original-scale columns");
        const auto& d = r.det;
        out << d.frame_index << ',' << format_fixed(d.bbox.x_min) << ','
            << format_fixed(d.bbox.y_min) << ',' << format_fixed(d.bbox.x_max) << ','
            << format_fixed(d.bbox.y_max) << ',' << format_fixed(d.cx) << ','
            << format_fixed(d.cy) << ',' << format_fixed(d.score) << ',' << d.area;
        if (with_orig) {
            out << ',' << format_fixed(r.orig_bbox.x_min) << ',' << format_fixed(r.orig_bbox.y_min)
                << ',' << format_fixed(r.orig_bbox.x_max) << ',' << format_fixed(r.orig_bbox.y_max)
                << ',' << format_fixed(r.orig_cx) << ',' << format_fixed(r.orig_cy);
        }
        out << '\n';
    }
    return out.str();
}

void write_detections_csv(const std::string& path, const std::vector<DetectionRow>& rows) {
    write_text_file(path, detections_csv_text(rows));
}

std::vector<DetectionRow> read_detections_csv(const std::string& path) {
    auto lines = read_csv_lines(path, kDetHeader, kDetHeaderOrig);
    bool with_orig = lines.front() == kDetHeaderOrig;
    std::size_t want = with_orig ? 15 : 9;
    std::vector<DetectionRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = split_csv(lines[i]);
        std::size_t ln = i + 1;
        if (f.size() != want)
            fail_line(path, ln, "expected " + std::to_string(want) + " fields, got " +
                                    std::to_string(f.size()));
        DetectionRow r;
        r.det.frame_index = parse_int(f[0], path, ln);
        r.det.bbox = {parse_double(f[1], path, ln), parse_double(f[2], path, ln),
                      parse_double(f[3], path, ln), parse_double(f[4], path, ln)};
        r.det.cx = parse_double(f[5], path, ln);
        r.det.cy = parse_double(f[6], path, ln);
        r.det.score = parse_double(f[7], path, ln);
        r.det.area = parse_int(f[8], path, ln);
        if (with_orig) {
            r.has_original = true;
            r.orig_bbox = {parse_double(f[9], path, ln), parse_double(f[10], path, ln),
                           parse_double(f[11], path, ln), parse_double(f[12], path, ln)};
            r.orig_cx = parse_double(f[13], path, ln);
            r.orig_cy = parse_double(f[14], path, ln);
        }
        rows.push_back(r);
    }
    return rows;
}

void write_tracks_csv(const std::string& path, const std::vector<TrackRow>& rows) {
    std::ostringstream out;
    out << kTrackHeader << "\n";
    for (const auto& r : rows) {
        out << r.frame << ',' << r.track_id << ',' << format_fixed(r.bbox.x_min) << ','
            << format_fixed(r.bbox.y_min) << ',' << format_fixed(r.bbox.x_max) << ','
            << format_fixed(r.bbox.y_max) << ',' << format_fixed(r.score) << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<TrackRow> read_tracks_csv(const std::string& path) {
    auto lines = read_csv_lines(path, kTrackHeader);
    std::vector<TrackRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = split_csv(lines[i]);
        std::size_t ln = i + 1;
        if (f.size() != 7) fail_line(path, ln, "expected 7 fields");
        TrackRow r;
        r.frame = parse_int(f[0], path, ln);
        r.track_id = parse_int(f[1], path, ln);
        r.bbox = {parse_double(f[2], path, ln), parse_double(f[3], path, ln),
                  parse_double(f[4], path, ln), parse_double(f[5], path, ln)};
        r.score = parse_double(f[6], path, ln);
        rows.push_back(r);
    }
    return rows;
}

void write_gt_csv(const std::string& path, const std::vector<GtRecord>& records) {
    std::ostringstream out;
    out << kGtHeader << "\n";
    for (const auto& g : records) {
        out << g.frame << ',' << format_fixed(g.cx) << ',' << format_fixed(g.cy) << ','
            << format_fixed(g.bbox.x_min) << ',' << format_fixed(g.bbox.y_min) << ','
            << format_fixed(g.bbox.x_max) << ',' << format_fixed(g.bbox.y_max) << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<GtRecord> read_gt_csv(const std::string& path) {
    auto lines = read_csv_lines(path, kGtHeader);
    std::vector<GtRecord> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto f = split_csv(lines[i]);
        std::size_t ln = i + 1;
        if (f.size() != 7) fail_line(path, ln, "expected 7 fields");
        GtRecord g;
        g.frame = parse_int(f[0], path, ln);
        g.cx = parse_double(f[1], path, ln);
        g.cy = parse_double(f[2], path, ln);
        g.bbox = {parse_double(f[3], path, ln), parse_double(f[4], path, ln),
                  parse_double(f[5], path, ln), parse_double(f[6], path, ln)};
        rows.push_back(g);
    }
    return rows;
}

} // namespace ligtrack::io
