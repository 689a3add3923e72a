#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eprsim {

/// Raised for unreadable or invalid configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PathModel { exact, paraxial };

std::string to_string(PathModel m);
PathModel path_model_from_string(const std::string& s);

/// Apparatus geometry. All lengths in meters, angles in radians.
///
/// Defaults give ~2.5 fringes across the screen (fringe period
/// wavelength*slits_to_screen/slit_separation = 3.95 mm against a 10 mm
/// screen) and are numerically comfortable. The path constants r_D, r_K,
/// r_L, r_M default to zero; only path differences enter any rate.
struct Geometry {
    double wavelength = 790e-9;
    double focal_length = 0.1;
    double focal_offset = 0.02;
    double source_to_slits = 1.0;
    double slit_separation = 200e-6;
    double slit_width = 20e-6;
    double slits_to_screen = 1.0;
    double beam_divergence = 1e-3;
    double path_r_D = 0.0;
    double path_r_K = 0.0;
    double path_r_L = 0.0;
    double path_r_M = 0.0;
    double screen_halfwidth = 5e-3;
    int n_bins = 201;
    PathModel path_model = PathModel::exact;

    double wavenumber() const;
    double fringe_period() const;
    double bin_width() const;

    /// Centers of n_bins uniform bins over [-screen_halfwidth, +screen_halfwidth].
    std::vector<double> bin_centers() const;

    /// Throws ConfigError on violated invariants (positive lengths,
    /// focal_offset < focal_length, path_r_L == path_r_M, n_bins >= 2).
    void validate() const;

    /// Non-fatal validity flags, e.g. slit_width * beam_divergence >= wavelength.
    std::vector<std::string> warnings() const;

    /// Canonical key=value serialization (config file syntax, fixed key order).
    std::string to_config_string() const;

    /// FNV-1a over the canonical serialization; embedded in output metadata.
    std::uint64_t hash() const;

    static Geometry from_file(const std::string& path);
    static Geometry from_string(const std::string& text);
};

std::string hash_hex(std::uint64_t h);

}  // namespace eprsim
