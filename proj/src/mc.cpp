#include "eprsim/mc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "eprsim/output.hpp"

namespace eprsim {

// ---------------------------------------------------------------------------
// SplitMix64

std::uint64_t SplitMix64::mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

SplitMix64::SplitMix64(std::uint64_t seed, std::uint64_t stream)
    : state_(mix(seed ^ mix(stream))),
      gamma_(mix(stream ^ 0xbf58476d1ce4e5b9ull) | 1ull) {
}

std::uint64_t SplitMix64::next() {
    state_ += gamma_;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SplitMix64::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Simulation

void RunConfig::validate() const {
    if (n_events < 1) throw std::invalid_argument("n_events must be at least 1");
    if (!(background_rate >= 0.0 && background_rate < 1.0))
        throw std::invalid_argument("background_rate must lie in [0, 1)");
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("efficiency must lie in (0, 1]");
    geometry.validate();
}

namespace {

// Cumulative table for inverse-CDF sampling. Ties break toward the lower
// bin index (lower_bound); the final entry is pinned to 1.
std::vector<double> cumulative(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("cumulative: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("cumulative: no weight");
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc / total;
    }
    cdf.back() = 1.0;
    return cdf;
}

int sample(const std::vector<double>& cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) return static_cast<int>(cdf.size()) - 1;
    return static_cast<int>(it - cdf.begin());
}

struct ConditionalSampler {
    std::vector<std::string> labels;
    std::vector<double> outcome_cdf;
    std::vector<std::vector<double>> bin_cdfs;  // per outcome
};

// Alice's outcome probabilities and Bob's conditional bin distributions
// under the rule, both derived from the phase-evolved joint state so the
// sampler shares one code path with the analytic machinery.
ConditionalSampler build_sampler(const RunConfig& cfg) {
    const auto centers = cfg.geometry.bin_centers();
    const StateVector psi =
        phase_evolved_state(cfg.geometry, arm_for(cfg.rule), centers);
    const BipartiteLayout layout{2, cfg.geometry.n_bins};
    const auto outcomes = measure(cfg.rule, psi, layout);

    ConditionalSampler s;
    std::vector<double> probs;
    for (const auto& o : outcomes) {
        if (o.probability <= 0.0) continue;
        std::vector<double> pmf(cfg.geometry.n_bins, 0.0);
        if (o.bob_state) {
            for (int j = 0; j < cfg.geometry.n_bins; ++j)
                pmf[j] = std::norm(o.bob_state->amp(j));
        } else if (o.bob_density) {
            for (int j = 0; j < cfg.geometry.n_bins; ++j)
                pmf[j] = o.bob_density->at(j, j).real();
        }
        s.labels.push_back(o.label);
        probs.push_back(o.probability);
        s.bin_cdfs.push_back(cumulative(pmf));
    }
    s.outcome_cdf = cumulative(probs);
    return s;
}

}  // namespace

std::vector<EventRecord> simulate_run(const RunConfig& cfg, std::uint64_t stream) {
    cfg.validate();
    const ConditionalSampler sampler = build_sampler(cfg);
    const int n_bins = cfg.geometry.n_bins;

    SplitMix64 rng(cfg.seed, stream);
    std::vector<EventRecord> events;
    events.reserve(cfg.n_events);
    for (int i = 0; i < cfg.n_events; ++i) {
        EventRecord rec;
        rec.index = i;
        if (cfg.background_rate > 0.0 && rng.next_double() < cfg.background_rate) {
            rec.alice_outcome = "none";
            rec.bob_bin = std::min(n_bins - 1,
                                   static_cast<int>(rng.next_double() * n_bins));
            rec.is_background = true;
        } else {
            const int oi = sample(sampler.outcome_cdf, rng.next_double());
            rec.alice_outcome = sampler.labels[oi];
            rec.bob_bin = sample(sampler.bin_cdfs[oi], rng.next_double());
        }
        if (cfg.efficiency < 1.0 && rng.next_double() >= cfg.efficiency) continue;
        events.push_back(std::move(rec));
    }
    return events;
}

Pattern histogram(const std::vector<EventRecord>& events, int n_bins,
                  double screen_halfwidth) {
    if (n_bins < 1) throw std::invalid_argument("histogram: n_bins must be positive");
    Pattern p;
    p.values.assign(n_bins, 0.0);
    p.positions.resize(n_bins);
    const double w = 2.0 * screen_halfwidth / n_bins;
    for (int i = 0; i < n_bins; ++i)
        p.positions[i] = screen_halfwidth > 0.0 ? -screen_halfwidth + (i + 0.5) * w
                                                : static_cast<double>(i);
    for (const auto& e : events) {
        if (e.bob_bin < 0 || e.bob_bin >= n_bins)
            throw std::out_of_range("histogram: bob_bin outside [0, n_bins)");
        p.values[e.bob_bin] += 1.0;
    }
    p.n_events = static_cast<long>(events.size());
    p.flagged_empty = events.empty();
    return p;
}

namespace {

std::vector<double> moving_average(const std::vector<double>& v, int window) {
    if (window <= 1) return v;
    const int r = window / 2;
    const int n = static_cast<int>(v.size());
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - r);
        const int hi = std::min(n - 1, i + r);
        double s = 0.0;
        for (int j = lo; j <= hi; ++j) s += v[j];
        out[i] = s / (hi - lo + 1);
    }
    return out;
}

}  // namespace

VisibilityEstimate visibility(const Pattern& p, int smooth_window) {
    if (p.values.empty()) throw std::invalid_argument("visibility: empty pattern");
    if (smooth_window < 1 || smooth_window % 2 == 0)
        throw std::invalid_argument("visibility: window must be odd and >= 1");
    const double total = [&] {
        double s = 0.0;
        for (double v : p.values) s += v;
        return s;
    }();
    if (!(total > 0.0)) throw std::invalid_argument("visibility: all-zero pattern");

    const auto s = moving_average(p.values, smooth_window);
    const auto [mn_it, mx_it] = std::minmax_element(s.begin(), s.end());
    const double mn = *mn_it, mx = *mx_it;

    VisibilityEstimate est;
    est.v = std::clamp((mx - mn) / (mx + mn), 0.0, 1.0);
    est.n_events_used = p.n_events;
    if (p.n_events > 0) {
        // Poisson errors on the extreme windows, propagated through
        // V = (M - m)/(M + m). Values are counts scaled by 1/window.
        const double scale = static_cast<double>(smooth_window);
        const double cm = mx * scale, cn = mn * scale;
        const double denom = (cm + cn) * (cm + cn);
        if (denom > 0.0)
            est.std_error =
                2.0 * std::sqrt(cn * cn * cm + cm * cm * cn) / denom;
    }
    return est;
}

namespace {

// Deterministic balanced rebin: n_bins fine bins -> target groups of size
// floor/ceil(n/target). Group means are rescaled by the average group size
// so unequal groups keep equal expectation while values stay in count units.
Pattern rebin_mean(const Pattern& p, int target) {
    const int n = static_cast<int>(p.values.size());
    if (target >= n || target < 2) return p;
    Pattern out;
    out.n_events = p.n_events;
    out.flagged_empty = p.flagged_empty;
    out.normalization = p.normalization;
    out.positions.resize(target);
    out.values.resize(target);
    const double avg_size = static_cast<double>(n) / target;
    for (int g = 0; g < target; ++g) {
        const int lo = static_cast<int>((static_cast<long>(g) * n) / target);
        const int hi = static_cast<int>((static_cast<long>(g + 1) * n) / target);
        double s = 0.0;
        for (int i = lo; i < hi; ++i) s += p.values[i];
        out.values[g] = s / (hi - lo) * avg_size;
        out.positions[g] = 0.5 * (p.positions[lo] + p.positions[hi - 1]);
    }
    return out;
}

}  // namespace

DecodeResult decode_bit(const std::vector<EventRecord>& events, int n_bins,
                        double threshold_v, const DecoderParams& params) {
    if (!(threshold_v > 0.0 && threshold_v < 1.0))
        throw std::invalid_argument("decode_bit: threshold must lie in (0, 1)");
    DecodeResult res;
    res.low_confidence =
        events.size() < static_cast<std::size_t>(10) * static_cast<std::size_t>(n_bins);
    // Bob's singles only: the histogram sees nothing but bob_bin values.
    const Pattern hist = histogram(events, n_bins);
    if (hist.flagged_empty) {
        res.bit = 0;
        res.low_confidence = true;
        return res;
    }
    const Pattern coarse = rebin_mean(hist, params.rebin_target);
    res.v = visibility(coarse, params.smooth_window);
    res.bit = res.v.v > threshold_v ? 1 : 0;
    return res;
}

// ---------------------------------------------------------------------------
// Event log I/O

void write_event_log(std::ostream& os, const std::vector<EventRecord>& events,
                     const RunConfig& cfg, std::uint64_t stream) {
    os << "# eprsim event log v1\n";
    os << "# seed = " << cfg.seed << "\n";
    os << "# stream = " << stream << "\n";
    os << "# rule = " << to_string(cfg.rule) << "\n";
    os << "# n_events = " << cfg.n_events << "\n";
    os << "# geometry_hash = " << hash_hex(cfg.geometry.hash()) << "\n";
    os << "# columns = index,alice_outcome,bob_bin,is_background\n";
    for (const auto& e : events) {
        os << e.index << ',' << e.alice_outcome << ',' << e.bob_bin << ','
           << (e.is_background ? 1 : 0) << '\n';
    }
}

EventLog read_event_log(std::istream& is) {
    EventLog log;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            std::string value = line.substr(eq + 1);
            auto trim = [](std::string& s) {
                s.erase(0, s.find_first_not_of(" \t"));
                s.erase(s.find_last_not_of(" \t\r") + 1);
            };
            trim(key);
            trim(value);
            if (key == "seed") log.seed = std::stoull(value);
            else if (key == "stream") log.stream = std::stoull(value);
            else if (key == "rule") log.rule = value;
            else if (key == "n_events") log.n_events = std::stoi(value);
            else if (key == "geometry_hash") log.geometry_hash = value;
            continue;
        }
        EventRecord rec;
        std::istringstream row(line);
        std::string field;
        if (!std::getline(row, field, ',')) throw std::runtime_error("bad event row");
        rec.index = std::stoi(field);
        if (!std::getline(row, rec.alice_outcome, ','))
            throw std::runtime_error("bad event row");
        if (!std::getline(row, field, ',')) throw std::runtime_error("bad event row");
        rec.bob_bin = std::stoi(field);
        if (!std::getline(row, field)) throw std::runtime_error("bad event row");
        rec.is_background = field == "1";
        log.events.push_back(std::move(rec));
    }
    return log;
}

std::vector<TrialResult> run_trials(const RunConfig& cfg, int trials,
                                    double threshold_v, const DecoderParams& params) {
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    std::vector<TrialResult> results;
    results.reserve(trials);
    // Trials are independent (stream = trial index) and could run in
    // parallel; sequential order keeps the output file deterministic.
    for (int t = 0; t < trials; ++t) {
        const auto events = simulate_run(cfg, static_cast<std::uint64_t>(t));
        const auto decoded = decode_bit(events, cfg.geometry.n_bins, threshold_v, params);
        TrialResult r;
        r.trial = t;
        r.stream = static_cast<std::uint64_t>(t);
        r.decoded_bit = decoded.bit;
        r.v = decoded.v;
        r.low_confidence = decoded.low_confidence;
        r.n_recorded = static_cast<int>(events.size());
        results.push_back(r);
    }
    return results;
}

}  // namespace eprsim
