#include "eprsim/geometry.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "eprsim/output.hpp"

namespace eprsim {

std::string to_string(PathModel m) {
    return m == PathModel::exact ? "exact" : "paraxial";
}

PathModel path_model_from_string(const std::string& s) {
    if (s == "exact") return PathModel::exact;
    if (s == "paraxial") return PathModel::paraxial;
    throw ConfigError("unknown path_model '" + s + "' (expected exact|paraxial)");
}

double Geometry::wavenumber() const {
    return 2.0 * std::numbers::pi / wavelength;
}

double Geometry::fringe_period() const {
    return wavelength * slits_to_screen / slit_separation;
}

double Geometry::bin_width() const {
    return 2.0 * screen_halfwidth / n_bins;
}

std::vector<double> Geometry::bin_centers() const {
    std::vector<double> z(n_bins);
    const double w = bin_width();
    for (int i = 0; i < n_bins; ++i) z[i] = -screen_halfwidth + (i + 0.5) * w;
    return z;
}

void Geometry::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw ConfigError(std::string(name) + " must be strictly positive");
    };
    positive(wavelength, "wavelength");
    positive(focal_length, "focal_length");
    positive(focal_offset, "focal_offset");
    positive(source_to_slits, "source_to_slits");
    positive(slit_separation, "slit_separation");
    positive(slit_width, "slit_width");
    positive(slits_to_screen, "slits_to_screen");
    positive(screen_halfwidth, "screen_halfwidth");
    if (!(focal_offset < focal_length))
        throw ConfigError("focal_offset must be smaller than focal_length");
    if (beam_divergence < 0.0)
        throw ConfigError("beam_divergence must be non-negative");
    for (double r : {path_r_D, path_r_K, path_r_L, path_r_M}) {
        if (r < 0.0) throw ConfigError("path constants must be non-negative");
    }
    if (path_r_L != path_r_M)
        throw ConfigError("path_r_L and path_r_M must be equal");
    if (n_bins < 2)
        throw std::invalid_argument("n_bins must be at least 2");
}

std::vector<std::string> Geometry::warnings() const {
    std::vector<std::string> w;
    if (slit_width * beam_divergence >= wavelength) {
        w.push_back(
            "slit_width * beam_divergence >= wavelength: the slow-divergence "
            "interference criterion is violated for this configuration");
    }
    return w;
}

std::string Geometry::to_config_string() const {
    std::ostringstream os;
    os << "wavelength = " << format_double(wavelength) << "\n"
       << "focal_length = " << format_double(focal_length) << "\n"
       << "focal_offset = " << format_double(focal_offset) << "\n"
       << "source_to_slits = " << format_double(source_to_slits) << "\n"
       << "slit_separation = " << format_double(slit_separation) << "\n"
       << "slit_width = " << format_double(slit_width) << "\n"
       << "slits_to_screen = " << format_double(slits_to_screen) << "\n"
       << "beam_divergence = " << format_double(beam_divergence) << "\n"
       << "path_r_D = " << format_double(path_r_D) << "\n"
       << "path_r_K = " << format_double(path_r_K) << "\n"
       << "path_r_L = " << format_double(path_r_L) << "\n"
       << "path_r_M = " << format_double(path_r_M) << "\n"
       << "screen_halfwidth = " << format_double(screen_halfwidth) << "\n"
       << "n_bins = " << n_bins << "\n"
       << "path_model = " << to_string(path_model) << "\n";
    return os.str();
}

std::uint64_t Geometry::hash() const {
    // FNV-1a 64 over the canonical serialization.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : to_config_string()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

Geometry Geometry::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

Geometry Geometry::from_string(const std::string& text) {
    Geometry geo;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        if (++seen[key] > 1)
            throw ConfigError("duplicate config key '" + key + "'");

        auto as_double = [&]() {
            try {
                return parse_double(value);
            } catch (const std::exception&) {
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": bad numeric value for '" + key + "'");
            }
        };
        if (key == "wavelength") geo.wavelength = as_double();
        else if (key == "focal_length") geo.focal_length = as_double();
        else if (key == "focal_offset") geo.focal_offset = as_double();
        else if (key == "source_to_slits") geo.source_to_slits = as_double();
        else if (key == "slit_separation") geo.slit_separation = as_double();
        else if (key == "slit_width") geo.slit_width = as_double();
        else if (key == "slits_to_screen") geo.slits_to_screen = as_double();
        else if (key == "beam_divergence") geo.beam_divergence = as_double();
        else if (key == "path_r_D") geo.path_r_D = as_double();
        else if (key == "path_r_K") geo.path_r_K = as_double();
        else if (key == "path_r_L") geo.path_r_L = as_double();
        else if (key == "path_r_M") geo.path_r_M = as_double();
        else if (key == "screen_halfwidth") geo.screen_halfwidth = as_double();
        else if (key == "n_bins") {
            const double v = as_double();
            if (v != std::floor(v))
                throw ConfigError("n_bins must be an integer");
            geo.n_bins = static_cast<int>(v);
        } else if (key == "path_model") {
            geo.path_model = path_model_from_string(value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return geo;
}

}  // namespace eprsim
