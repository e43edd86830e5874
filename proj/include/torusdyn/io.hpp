#ifndef TORUSDYN_IO_HPP
#define TORUSDYN_IO_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "torusdyn/classify.hpp"

namespace torusdyn {

/// Atomic file write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);
void ensure_directory(const std::string& path);

/// Binary PGM (P5), header exactly "P5\n<w> <h>\n255\n"; 0 = unmarked, 255 = marked.
std::string pgm_encode(const OccupancyGrid& grid);
OccupancyGrid pgm_decode(const std::string& bytes);

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
};

/// Binary PPM (P6), header exactly "P6\n<w> <h>\n255\n".
std::string ppm_encode(int w, int h, const std::vector<Rgb>& pixels);

/// Render: marked cells black, Trivial components light gray, Essential colored
/// by characteristic hash, DoublyEssential white.
std::string render_domains(const OccupancyGrid& grid, const DomainReport& report);

/// Key-value configuration with a fixed key set; unknown keys are rejected and
/// numeric keys range-checked.
struct Config {
    double alpha = std::sqrt(2.0) - 1.0;
    double beta = std::sqrt(3.0) - 1.0;
    IntegerMatrix matrix{1, 0, 0, 1};
    int stages = 3;
    int resolution = 256;
    long orbit_steps = 1000000;
    uint64_t seed = 1;
    std::string out_dir = "out";

    static Config parse(const std::map<std::string, std::string>& kv);
    static Config parse_file(const std::string& path);
    std::string manifest() const;
};

}  // namespace torusdyn

#endif
