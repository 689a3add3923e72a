#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eprsim/experiment.hpp"
#include "eprsim/measurement.hpp"

namespace eprsim {

/// SplitMix64 with per-stream derived state and odd gamma. Platform
/// independent; one stream per Monte Carlo trial. Constants are the
/// Steele/Lea/Burak mix constants (documented in the README).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next();

    /// Uniform double in [0, 1), 53 random bits.
    double next_double();

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t state_;
    std::uint64_t gamma_;
};

struct RunConfig {
    int n_events = 0;
    std::uint64_t seed = 0;
    MeasurementRule rule = MeasurementRule::coherent_focal;
    Geometry geometry;
    double background_rate = 0.0;  // fraction of uniform noise events
    double efficiency = 1.0;       // survival probability per attempted event

    void validate() const;  // throws std::invalid_argument
};

struct EventRecord {
    int index = 0;
    std::string alice_outcome;  // "none" for background events
    int bob_bin = 0;
    bool is_background = false;
};

/// Detection-event stream, deterministic given (seed, stream, config).
/// Alice's outcome is drawn from the rule's probabilities and Bob's bin
/// from the conditional pattern of that outcome, both by inverse-CDF
/// lookup (ties to the lower bin index).
std::vector<EventRecord> simulate_run(const RunConfig& cfg, std::uint64_t stream = 0);

/// Per-bin counts from bob_bin values only. screen_halfwidth > 0 labels
/// positions with real bin centers, otherwise with bin indices. An empty
/// event list yields an all-zero pattern with flagged_empty set.
Pattern histogram(const std::vector<EventRecord>& events, int n_bins,
                  double screen_halfwidth = 0.0);

struct VisibilityEstimate {
    double v = 0.0;         // clamped to [0, 1]
    double std_error = 0.0;
    long n_events_used = 0;
};

/// Fringe contrast (max - min)/(max + min) over the pattern, after a
/// centered moving average of smooth_window bins (1 = no smoothing; the
/// decoder uses 3). std_error by binomial propagation when the pattern
/// carries counts. Throws on an all-zero pattern.
VisibilityEstimate visibility(const Pattern& p, int smooth_window = 1);

/// Decoder knobs (statistics, not physics). Counted histograms are first
/// rebinned to ~rebin_target balanced groups so the max/min estimator is
/// not dominated by single-bin shot noise, then smoothed.
struct DecoderParams {
    int rebin_target = 40;
    int smooth_window = 3;
};

struct DecodeResult {
    int bit = 0;  // 1 = focal-plane (fringes seen)
    VisibilityEstimate v;
    bool low_confidence = false;  // fewer than 10 * n_bins events
};

/// One-bit decision from Bob's singles alone: bit = 1 iff the measured
/// visibility exceeds threshold_v. Uses only bob_bin values.
DecodeResult decode_bit(const std::vector<EventRecord>& events, int n_bins,
                        double threshold_v, const DecoderParams& params = {});

/// Event log I/O: '#'-prefixed header (seed, stream, rule, n_events,
/// geometry hash) then one `index,alice_outcome,bob_bin,is_background`
/// line per record.
void write_event_log(std::ostream& os, const std::vector<EventRecord>& events,
                     const RunConfig& cfg, std::uint64_t stream);

struct EventLog {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string rule;
    int n_events = 0;
    std::string geometry_hash;
    std::vector<EventRecord> events;
};

EventLog read_event_log(std::istream& is);

struct TrialResult {
    int trial = 0;
    std::uint64_t stream = 0;
    int decoded_bit = 0;
    VisibilityEstimate v;
    bool low_confidence = false;
    int n_recorded = 0;
};

/// Independent seeded trials, stream = trial index.
std::vector<TrialResult> run_trials(const RunConfig& cfg, int trials,
                                    double threshold_v,
                                    const DecoderParams& params = {});

}  // namespace eprsim
