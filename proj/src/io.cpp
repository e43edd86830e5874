#include "torusdyn/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace torusdyn {

namespace fs = std::filesystem;

void write_file_atomic(const std::string& path, const std::string& bytes) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) throw std::runtime_error("write_file_atomic: short write to " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_directory(const std::string& path) { fs::create_directories(path); }

std::string pgm_encode(const OccupancyGrid& grid) {
    std::string out = "P5\n" + std::to_string(grid.R) + " " + std::to_string(grid.R) + "\n255\n";
    out.reserve(out.size() + grid.marked.size());
    for (uint8_t v : grid.marked) out.push_back(char(v ? 255 : 0));
    return out;
}

OccupancyGrid pgm_decode(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w != h || w <= 0 || maxval != 255)
        throw std::runtime_error("pgm_decode: unsupported PGM (need square P5 maxval 255)");
    in.get();  // single whitespace after header
    OccupancyGrid grid(w);
    for (size_t i = 0; i < grid.marked.size(); ++i) {
        int c = in.get();
        if (c == EOF) throw std::runtime_error("pgm_decode: truncated pixel data");
        grid.marked[i] = c >= 128 ? 1 : 0;
    }
    grid.provenance = "pgm";
    return grid;
}

std::string ppm_encode(int w, int h, const std::vector<Rgb>& pixels) {
    if (pixels.size() != size_t(w) * size_t(h))
        throw std::invalid_argument("ppm_encode: pixel count mismatch");
    std::string out = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.reserve(out.size() + pixels.size() * 3);
    for (const Rgb& p : pixels) {
        out.push_back(char(p.r));
        out.push_back(char(p.g));
        out.push_back(char(p.b));
    }
    return out;
}

std::string render_domains(const OccupancyGrid& grid, const DomainReport& report) {
    int R = grid.R;
    std::vector<Rgb> pixels(size_t(R) * size_t(R), Rgb{0, 0, 0});
    // label lookup for complement cells
    auto comps = complement_components(grid);
    std::vector<int> label(size_t(R) * size_t(R), -1);
    for (const auto& comp : comps)
        for (int c : comp.cells) label[size_t(c)] = comp.label;
    auto color_of = [&](int lbl) -> Rgb {
        for (const auto& cr : report.components) {
            if (cr.label != lbl) continue;
            switch (cr.type) {
                case DomainType::Trivial:
                    return {200, 200, 200};
                case DomainType::DoublyEssential:
                    return {255, 255, 255};
                case DomainType::Essential: {
                    uint32_t hsh = uint32_t(2654435761u * uint32_t(7 + cr.p * 31 + cr.q * 131));
                    return {uint8_t(80 + (hsh & 0x7F)), uint8_t(80 + ((hsh >> 8) & 0x7F)),
                            uint8_t(80 + ((hsh >> 16) & 0x7F))};
                }
            }
        }
        return {120, 120, 120};
    };
    for (int cy = 0; cy < R; ++cy) {
        for (int cx = 0; cx < R; ++cx) {
            size_t i = size_t(cy) * size_t(R) + size_t(cx);
            if (grid.marked[i]) continue;  // marked set stays black
            pixels[i] = color_of(label[i]);
        }
    }
    return ppm_encode(R, R, pixels);
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

IntegerMatrix parse_matrix(const std::string& text) {
    IntegerMatrix m;
    if (std::sscanf(text.c_str(), "%ld,%ld,%ld,%ld", &m.a, &m.b, &m.c, &m.d) != 4)
        throw std::invalid_argument("config: matrix must be 'a,b,c,d'");
    if (!m.unimodular()) throw std::invalid_argument("config: matrix must have det +-1");
    return m;
}

}  // namespace

Config Config::parse(const std::map<std::string, std::string>& kv) {
    Config cfg;
    for (const auto& [key, value] : kv) {
        if (key == "alpha") {
            cfg.alpha = std::stod(value);
            if (!(cfg.alpha > 0 && cfg.alpha < 1))
                throw std::invalid_argument("config: alpha must be in (0,1)");
        } else if (key == "beta") {
            cfg.beta = std::stod(value);
            if (!(cfg.beta > 0 && cfg.beta < 1))
                throw std::invalid_argument("config: beta must be in (0,1)");
        } else if (key == "matrix") {
            cfg.matrix = parse_matrix(value);
        } else if (key == "stages") {
            cfg.stages = std::stoi(value);
            if (cfg.stages < 0 || cfg.stages > 8)
                throw std::invalid_argument("config: stages must be in [0,8]");
        } else if (key == "resolution") {
            cfg.resolution = std::stoi(value);
            if (cfg.resolution < 16 || cfg.resolution > 4096)
                throw std::invalid_argument("config: resolution must be in [16,4096]");
        } else if (key == "orbit_steps") {
            cfg.orbit_steps = std::stol(value);
            if (cfg.orbit_steps < 1 || cfg.orbit_steps > 1000000000L)
                throw std::invalid_argument("config: orbit_steps must be in [1,1e9]");
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::istringstream in(read_file(path));
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        trim(key);
        trim(value);
        kv[key] = value;
    }
    return parse(kv);
}

std::string Config::manifest() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "alpha=%.17g\nbeta=%.17g\nmatrix=%ld,%ld,%ld,%ld\nstages=%d\n"
                  "resolution=%d\norbit_steps=%ld\nseed=%llu\nout_dir=%s\n",
                  alpha, beta, matrix.a, matrix.b, matrix.c, matrix.d, stages, resolution,
                  orbit_steps, (unsigned long long)seed, out_dir.c_str());
    return buf;
}

}  // namespace torusdyn
