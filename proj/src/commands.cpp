#include "eprsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "eprsim/experiment.hpp"
#include "eprsim/geometry.hpp"
#include "eprsim/mc.hpp"
#include "eprsim/measurement.hpp"
#include "eprsim/output.hpp"
#include "eprsim/version.hpp"

namespace eprsim {

namespace {

using nlohmann::json;

template <typename Fn>
int guarded(std::ostream& err, int param_exit, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return param_exit;
    }
}

OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + s + "' (expected csv|json)");
}

Geometry load_geometry(const CommonOptions& c, std::ostream& err) {
    Geometry geo =
        c.config_path.empty() ? Geometry{} : Geometry::from_file(c.config_path);
    geo.validate();
    for (const auto& w : geo.warnings()) err << "warning: " << w << "\n";
    return geo;
}

// Canonical geometry on one line so outputs are reproducible from their
// own metadata without the original config file.
std::string inline_geometry(const Geometry& geo) {
    std::istringstream in(geo.to_config_string());
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!out.empty()) out += "; ";
        out += line;
    }
    return out;
}

class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            os_ = &fallback;
        } else {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw std::invalid_argument("cannot open output file '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

Metadata base_metadata(const std::string& command, const Geometry& geo) {
    Metadata meta;
    meta.add("tool", std::string("eprsim ") + kVersion);
    meta.add("command", command);
    meta.add("geometry_hash", hash_hex(geo.hash()));
    meta.add("geometry", inline_geometry(geo));
    return meta;
}

json meta_to_json(const Metadata& meta) {
    json j = json::object();
    for (const auto& [k, v] : meta.items) j[k] = v;
    return j;
}

json density_to_json(const DensityMatrix& rho) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < rho.dim(); ++i) {
        json re_row = json::array(), im_row = json::array();
        for (int j = 0; j < rho.dim(); ++j) {
            re_row.push_back(rho.at(i, j).real());
            im_row.push_back(rho.at(i, j).imag());
        }
        re.push_back(re_row);
        im.push_back(im_row);
    }
    return json{{"re", re}, {"im", im}};
}

}  // namespace

// ---------------------------------------------------------------------------
// pattern

int run_pattern_command(const PatternOptions& opts, std::ostream& out,
                        std::ostream& err) {
    return guarded(err, kExitInvalidParam, [&] {
        const OutputFormat format = parse_format(opts.common.format);
        const Geometry geo = load_geometry(opts.common, err);
        const AliceSetting setting = alice_setting_from_string(opts.alice);
        const SpdcState state(opts.common.epsilon);

        SweepOptions sweep_opts;
        sweep_opts.sinc_envelope = opts.envelope;
        const Pattern raw = sweep_pattern(state, geo, setting, sweep_opts);
        const Pattern unit = raw.unit_integral();

        // Raw-flux flag: this pattern's mean rate against the off-focal
        // singles level 2*eps^2 (the configurations are not normalized to a
        // common total anywhere upstream).
        const double mean_rate =
            std::accumulate(raw.values.begin(), raw.values.end(), 0.0) /
            static_cast<double>(raw.values.size());
        const double eps2 = state.epsilon() * state.epsilon();

        Metadata meta = base_metadata("pattern", geo);
        meta.add("alice", to_string(setting));
        meta.add("epsilon", state.epsilon());
        meta.add("sinc_envelope", std::string(opts.envelope ? "true" : "false"));
        meta.add("raw_flux_ratio_vs_offfocal_singles", mean_rate / (2.0 * eps2));

        OutputTarget target(opts.common.out_path, out);
        std::ostream& os = target.stream();
        if (format == OutputFormat::csv) {
            meta.write_csv_header(os);
            os << "z_m,rate_raw,rate_unit_integral\n";
            for (std::size_t i = 0; i < raw.positions.size(); ++i) {
                os << format_double(raw.positions[i]) << ','
                   << format_double(raw.values[i]) << ','
                   << format_double(unit.values[i]) << '\n';
            }
        } else {
            json j;
            j["meta"] = meta_to_json(meta);
            j["columns"] = {"z_m", "rate_raw", "rate_unit_integral"};
            json rows = json::array();
            for (std::size_t i = 0; i < raw.positions.size(); ++i)
                rows.push_back({raw.positions[i], raw.values[i], unit.values[i]});
            j["rows"] = rows;
            os << j.dump(2) << '\n';
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------
// marginals

int run_marginals_command(const MarginalsOptions& opts, std::ostream& out,
                          std::ostream& err) {
    return guarded(err, kExitInvalidParam, [&] {
        const OutputFormat format = parse_format(opts.common.format);
        const Geometry geo = load_geometry(opts.common, err);

        const StateVector psi = entangled_pair_state(geo, AliceArm::focal);
        const BipartiteLayout layout{2, 2};
        const DensityMatrix rho_f =
            bob_marginal(MeasurementRule::coherent_focal, psi, layout);
        const DensityMatrix rho_g =
            bob_marginal(MeasurementRule::von_neumann_offfocal, psi, layout);
        const SignalStrength sig = signal_strength(psi, layout);
        const auto coherent =
            measure(MeasurementRule::coherent_focal, psi, layout);

        Metadata meta = base_metadata("marginals", geo);
        meta.add("epsilon", opts.common.epsilon);

        OutputTarget target(opts.common.out_path, out);
        std::ostream& os = target.stream();
        if (format == OutputFormat::csv) {
            meta.write_csv_header(os);
            os << "field,value\n";
            os << "trace_distance," << format_double(sig.trace_dist) << '\n';
            os << "helstrom_success," << format_double(sig.helstrom_success) << '\n';
            os << "coherent_raw_weight," << format_double(coherent.front().raw_weight)
               << '\n';
            auto emit = [&os](const char* name, const DensityMatrix& rho) {
                for (int i = 0; i < rho.dim(); ++i)
                    for (int j = 0; j < rho.dim(); ++j) {
                        os << name << '_' << i << j << "_re,"
                           << format_double(rho.at(i, j).real()) << '\n';
                        os << name << '_' << i << j << "_im,"
                           << format_double(rho.at(i, j).imag()) << '\n';
                    }
            };
            emit("rho_f", rho_f);
            emit("rho_g", rho_g);
        } else {
            json j;
            j["meta"] = meta_to_json(meta);
            j["trace_distance"] = sig.trace_dist;
            j["helstrom_success"] = sig.helstrom_success;
            j["coherent_raw_weight"] = coherent.front().raw_weight;
            j["rho_f"] = density_to_json(rho_f);
            j["rho_g"] = density_to_json(rho_g);
            os << j.dump(2) << '\n';
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------
// compare

int run_compare_command(const CompareOptions& opts, std::ostream& out,
                        std::ostream& err) {
    return guarded(err, kExitInvalidParam, [&] {
        const OutputFormat format = parse_format(opts.common.format);
        const Geometry geo = load_geometry(opts.common, err);
        const SpdcState state(opts.common.epsilon);

        const auto centers = geo.bin_centers();
        const int n = geo.n_bins;
        const BipartiteLayout layout{2, n};
        const StateVector psi = phase_evolved_state(geo, AliceArm::focal, centers);

        const HermitianOperator coherent_op =
            build_family(MeasurementRule::coherent_focal).members.front();
        const HermitianOperator lueders_op =
            build_family(MeasurementRule::lueders_focal).members.front();

        std::vector<double> qo(n), qm_coh(n), qm_lued(n);
        const FieldOperator fa = field_alice_focal(geo);
        for (int i = 0; i < n; ++i) {
            qo[i] = coincidence_rate(state, fa, field_bob(geo, centers[i]));
            std::vector<Complex> pz(static_cast<std::size_t>(n) * n, Complex{0.0, 0.0});
            pz[static_cast<std::size_t>(i) * n + i] = Complex{1.0, 0.0};
            const HermitianOperator proj_z(n, std::move(pz));
            qm_coh[i] = joint_expectation(coherent_op, proj_z, psi, layout);
            qm_lued[i] = joint_expectation(lueders_op, proj_z, psi, layout);
        }

        // Common normalization (unit mean), deviations relative to the
        // pattern scale so the interference zeros stay well conditioned.
        auto unit_mean = [](const std::vector<double>& v) {
            const double m =
                std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            std::vector<double> out(v);
            for (auto& x : out) x /= m;
            return out;
        };
        const auto qo_n = unit_mean(qo);
        const auto qm_n = unit_mean(qm_coh);
        const double scale = *std::max_element(qo_n.begin(), qo_n.end());
        std::vector<double> rel_dev(n);
        double max_rel_dev = 0.0;
        for (int i = 0; i < n; ++i) {
            rel_dev[i] = std::abs(qo_n[i] - qm_n[i]) / scale;
            max_rel_dev = std::max(max_rel_dev, rel_dev[i]);
        }
        const auto [lmin, lmax] = std::minmax_element(qm_lued.begin(), qm_lued.end());
        const double lueders_spread = *lmax - *lmin;

        Metadata meta = base_metadata("compare", geo);
        meta.add("epsilon", state.epsilon());
        meta.add("max_rel_deviation", max_rel_dev);
        meta.add("lueders_spread", lueders_spread);

        OutputTarget target(opts.common.out_path, out);
        std::ostream& os = target.stream();
        if (format == OutputFormat::csv) {
            meta.write_csv_header(os);
            os << "z_m,qo_rate,qm_coherent,qm_lueders,rel_dev_coherent\n";
            for (int i = 0; i < n; ++i) {
                os << format_double(centers[i]) << ',' << format_double(qo[i]) << ','
                   << format_double(qm_coh[i]) << ',' << format_double(qm_lued[i])
                   << ',' << format_double(rel_dev[i]) << '\n';
            }
        } else {
            json j;
            j["meta"] = meta_to_json(meta);
            j["max_rel_deviation"] = max_rel_dev;
            j["lueders_spread"] = lueders_spread;
            j["columns"] = {"z_m", "qo_rate", "qm_coherent", "qm_lueders",
                            "rel_dev_coherent"};
            json rows = json::array();
            for (int i = 0; i < n; ++i)
                rows.push_back({centers[i], qo[i], qm_coh[i], qm_lued[i], rel_dev[i]});
            j["rows"] = rows;
            os << j.dump(2) << '\n';
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------------------------
// run

namespace {

std::string trial_log_path(const std::string& prefix, int trial) {
    std::ostringstream os;
    os << prefix << "_t" << std::setw(4) << std::setfill('0') << trial << ".log";
    return os.str();
}

int nominal_bit(MeasurementRule rule) {
    // Alice at the focal plane transmits 1 whether or not orthodox rules
    // let Bob see it; the summary error rate makes the null visible.
    return rule == MeasurementRule::von_neumann_offfocal ? 0 : 1;
}

}  // namespace

int run_run_command(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, kExitInvalidRunSpec, [&] {
        const OutputFormat format = parse_format(opts.common.format);
        const Geometry geo = load_geometry(opts.common, err);
        if (opts.trials < 1)
            throw std::invalid_argument("trials must be at least 1");
        if (!(opts.threshold > 0.0 && opts.threshold < 1.0))
            throw std::invalid_argument("threshold must lie in (0, 1)");

        RunConfig cfg;
        cfg.n_events = opts.events;
        cfg.seed = opts.seed;
        cfg.rule = rule_from_string(opts.rule);
        cfg.geometry = geo;
        cfg.background_rate = opts.background;
        cfg.efficiency = opts.efficiency;
        cfg.validate();

        const DecoderParams decoder;
        std::vector<TrialResult> results;
        results.reserve(opts.trials);
        for (int t = 0; t < opts.trials; ++t) {
            const auto events = simulate_run(cfg, static_cast<std::uint64_t>(t));
            if (!opts.events_out.empty()) {
                std::ofstream log(trial_log_path(opts.events_out, t), std::ios::binary);
                if (!log)
                    throw std::invalid_argument("cannot open event log prefix '" +
                                                opts.events_out + "'");
                write_event_log(log, events, cfg, static_cast<std::uint64_t>(t));
            }
            const auto decoded =
                decode_bit(events, geo.n_bins, opts.threshold, decoder);
            TrialResult r;
            r.trial = t;
            r.stream = static_cast<std::uint64_t>(t);
            r.decoded_bit = decoded.bit;
            r.v = decoded.v;
            r.low_confidence = decoded.low_confidence;
            r.n_recorded = static_cast<int>(events.size());
            results.push_back(r);
        }

        int ones = 0, errors = 0;
        const int nominal = nominal_bit(cfg.rule);
        for (const auto& r : results) {
            ones += r.decoded_bit;
            errors += r.decoded_bit != nominal ? 1 : 0;
        }
        const double frac_ones = static_cast<double>(ones) / opts.trials;
        const double error_rate = static_cast<double>(errors) / opts.trials;

        Metadata meta = base_metadata("run", geo);
        meta.add("rule", to_string(cfg.rule));
        meta.add("seed", static_cast<std::uint64_t>(cfg.seed));
        meta.add("events", static_cast<std::uint64_t>(cfg.n_events));
        meta.add("trials", static_cast<std::uint64_t>(opts.trials));
        meta.add("threshold", opts.threshold);
        meta.add("background_rate", cfg.background_rate);
        meta.add("efficiency", cfg.efficiency);
        meta.add("decoder_rebin_target", static_cast<std::uint64_t>(decoder.rebin_target));
        meta.add("decoder_smooth_window",
                 static_cast<std::uint64_t>(decoder.smooth_window));
        meta.add("nominal_bit", static_cast<std::uint64_t>(nominal));
        meta.add("fraction_decoded_1", frac_ones);
        meta.add("bit_error_rate", error_rate);

        OutputTarget target(opts.common.out_path, out);
        std::ostream& os = target.stream();
        if (format == OutputFormat::csv) {
            meta.write_csv_header(os);
            os << "trial,stream,decoded_bit,visibility,v_std_error,low_confidence,"
                  "events_recorded\n";
            for (const auto& r : results) {
                os << r.trial << ',' << r.stream << ',' << r.decoded_bit << ','
                   << format_double(r.v.v) << ',' << format_double(r.v.std_error)
                   << ',' << (r.low_confidence ? 1 : 0) << ',' << r.n_recorded
                   << '\n';
            }
        } else {
            json j;
            j["meta"] = meta_to_json(meta);
            j["fraction_decoded_1"] = frac_ones;
            j["bit_error_rate"] = error_rate;
            json rows = json::array();
            for (const auto& r : results) {
                rows.push_back({{"trial", r.trial},
                                {"decoded_bit", r.decoded_bit},
                                {"visibility", r.v.v},
                                {"v_std_error", r.v.std_error},
                                {"low_confidence", r.low_confidence},
                                {"events_recorded", r.n_recorded}});
            }
            j["trials"] = rows;
            os << j.dump(2) << '\n';
        }
        return kExitOk;
    });
}

}  // namespace eprsim
