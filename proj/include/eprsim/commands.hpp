#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace eprsim {

// Exit-code contract shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInvalidParam = 3;
inline constexpr int kExitInvalidRunSpec = 4;

enum class OutputFormat { csv, json };

struct CommonOptions {
    std::string config_path;  // empty = built-in defaults
    std::string format = "csv";
    std::string out_path;  // empty = the stream handed to the command
    double epsilon = 0.1;
};

struct PatternOptions {
    CommonOptions common;
    std::string alice = "focal";  // focal | offfocal_l | offfocal_m | offfocal_sum
    bool envelope = false;
};

struct MarginalsOptions {
    CommonOptions common;
};

struct CompareOptions {
    CommonOptions common;
};

struct RunOptions {
    CommonOptions common;
    std::string rule = "coherent_focal";
    int events = 1000;
    std::uint64_t seed = 1;
    int trials = 1;
    double threshold = 0.5;
    double background = 0.0;
    double efficiency = 1.0;
    std::string events_out;  // prefix; per-trial logs <prefix>_t<N>.log
};

// Each command writes data rows to `out` (or --out when set), diagnostics
// and warnings to `err`, and returns its exit code.
int run_pattern_command(const PatternOptions& opts, std::ostream& out, std::ostream& err);
int run_marginals_command(const MarginalsOptions& opts, std::ostream& out, std::ostream& err);
int run_compare_command(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int run_run_command(const RunOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace eprsim
