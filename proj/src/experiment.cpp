#include "eprsim/experiment.hpp"

#include <cmath>
#include <stdexcept>

namespace eprsim {

SpdcState::SpdcState(double epsilon)
    : epsilon_(epsilon),
      vec_([epsilon] {
          if (!(epsilon > 0.0))
              throw std::invalid_argument("SpdcState: epsilon must be positive");
          if (epsilon >= 0.3)
              throw std::invalid_argument(
                  "SpdcState: epsilon must stay below 0.3 (perturbative regime)");
          return StateVector({Complex{1.0, 0.0}, Complex{epsilon, 0.0},
                              Complex{-epsilon, 0.0}},
                             {"vac", "hv", "vh"});
      }()) {
}

Complex FieldOperator::coeff_h() const {
    return weight_h * std::polar(1.0, wavenumber * (common_path + path_h));
}

Complex FieldOperator::coeff_v() const {
    return weight_v * std::polar(1.0, wavenumber * (common_path + path_v));
}

std::pair<double, double> path_lengths(const Geometry& geo, double z) {
    if (std::abs(z) > geo.screen_halfwidth)
        throw std::out_of_range("path_lengths: z outside the screen");
    const double L = geo.slits_to_screen;
    const double half_sep = 0.5 * geo.slit_separation;
    if (geo.path_model == PathModel::paraxial) {
        const double excess = z * geo.slit_separation / (2.0 * L);
        return {L - excess, L + excess};
    }
    // Stable excess form sqrt(L^2 + x^2) - L = x^2 / (sqrt(L^2 + x^2) + L);
    // r1 - r2 then never suffers catastrophic cancellation.
    auto dist = [L](double x) {
        const double e = x * x / (std::sqrt(L * L + x * x) + L);
        return L + e;
    };
    return {dist(z - half_sep), dist(z + half_sep)};
}

FieldOperator field_bob(const Geometry& geo, double z) {
    const auto [r1, r2] = path_lengths(geo, z);
    FieldOperator f;
    f.weight_h = Complex{1.0, 0.0};  // h mode through the upper slit
    f.weight_v = Complex{1.0, 0.0};  // v mode through the lower slit
    f.path_h = r1;
    f.path_v = r2;
    f.common_path = geo.path_r_D;
    f.wavenumber = geo.wavenumber();
    f.description = "screen field at z";
    return f;
}

FieldOperator field_alice_offfocal(const Geometry& geo, OffFocalPoint which) {
    FieldOperator f;
    f.wavenumber = geo.wavenumber();
    if (which == OffFocalPoint::l) {
        f.weight_v = Complex{1.0, 0.0};
        f.path_v = geo.path_r_L;
        f.description = "off-focal detector at l";
    } else {
        f.weight_h = Complex{1.0, 0.0};
        f.path_h = geo.path_r_M;
        f.description = "off-focal detector at m";
    }
    return f;
}

FieldOperator field_alice_focal(const Geometry& geo) {
    FieldOperator f;
    f.weight_h = Complex{1.0, 0.0};
    f.weight_v = Complex{1.0, 0.0};
    // Both arm lengths to the focus are equal; carry them as a common path
    // so the arm difference is exactly zero.
    f.common_path = geo.path_r_K;
    f.wavenumber = geo.wavenumber();
    f.description = "focal detector at k";
    return f;
}

double coincidence_rate(const SpdcState& state, const FieldOperator& alice,
                        const FieldOperator& bob) {
    if (alice.wavenumber != bob.wavenumber)
        throw std::invalid_argument("coincidence_rate: wavenumber mismatch");
    const double na2 = std::norm(alice.weight_h) + std::norm(alice.weight_v);
    const double nb2 = std::norm(bob.weight_h) + std::norm(bob.weight_v);
    if (na2 == 0.0 || nb2 == 0.0)
        throw std::invalid_argument("coincidence_rate: field with no active mode");

    // Two annihilation paths to vacuum: (alice h, bob v) and (alice v, bob h).
    const Complex t_hv = state.path_amp_hv() * alice.weight_h * bob.weight_v;
    const Complex t_vh = state.path_amp_vh() * alice.weight_v * bob.weight_h;
    const double p_hv = std::norm(t_hv);
    const double p_vh = std::norm(t_vh);

    double cross = 0.0;
    if (p_hv > 0.0 && p_vh > 0.0) {
        // Common paths cancel between the two terms; only the per-mode path
        // difference enters. Keeping it as one subtraction preserves the
        // fringe phase to ~1 ulp even for kilometer-scale path constants.
        const double dpath = (alice.path_h - alice.path_v) + (bob.path_v - bob.path_h);
        const Complex interference =
            t_hv * std::conj(t_vh) * std::polar(1.0, alice.wavenumber * dpath);
        cross = 2.0 * interference.real();
    }
    return (p_hv + p_vh + cross) / na2;
}

std::string to_string(AliceSetting s) {
    switch (s) {
        case AliceSetting::focal: return "focal";
        case AliceSetting::offfocal_l: return "offfocal_l";
        case AliceSetting::offfocal_m: return "offfocal_m";
        case AliceSetting::offfocal_sum: return "offfocal_sum";
    }
    return "?";
}

AliceSetting alice_setting_from_string(const std::string& s) {
    if (s == "focal") return AliceSetting::focal;
    if (s == "offfocal_l") return AliceSetting::offfocal_l;
    if (s == "offfocal_m") return AliceSetting::offfocal_m;
    if (s == "offfocal_sum") return AliceSetting::offfocal_sum;
    throw std::invalid_argument("unknown alice setting '" + s + "'");
}

double Pattern::trapezoid_integral() const {
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
        t += 0.5 * (values[i] + values[i + 1]) * (positions[i + 1] - positions[i]);
    return t;
}

Pattern Pattern::unit_integral() const {
    const double t = trapezoid_integral();
    if (!(t > 0.0))
        throw std::invalid_argument("unit_integral: pattern has no area");
    Pattern out(*this);
    for (auto& v : out.values) v /= t;
    out.normalization = Norm::unit_integral;
    return out;
}

double sinc_envelope(const Geometry& geo, double z) {
    const double arg = std::numbers::pi * geo.slit_width * z /
                       (geo.wavelength * geo.slits_to_screen);
    if (arg == 0.0) return 1.0;
    const double s = std::sin(arg) / arg;
    return s * s;
}

Pattern sweep_pattern(const SpdcState& state, const Geometry& geo,
                      AliceSetting setting, const SweepOptions& opts) {
    geo.validate();
    Pattern p;
    p.positions = geo.bin_centers();
    p.values.resize(p.positions.size());

    const auto rate_at = [&](double z) {
        const FieldOperator fb = field_bob(geo, z);
        switch (setting) {
            case AliceSetting::focal:
                return coincidence_rate(state, field_alice_focal(geo), fb);
            case AliceSetting::offfocal_l:
                return coincidence_rate(
                    state, field_alice_offfocal(geo, OffFocalPoint::l), fb);
            case AliceSetting::offfocal_m:
                return coincidence_rate(
                    state, field_alice_offfocal(geo, OffFocalPoint::m), fb);
            case AliceSetting::offfocal_sum:
                return coincidence_rate(
                           state, field_alice_offfocal(geo, OffFocalPoint::l), fb) +
                       coincidence_rate(
                           state, field_alice_offfocal(geo, OffFocalPoint::m), fb);
        }
        throw std::logic_error("unreachable");
    };

    // Pure per-bin evaluation; order independent.
    for (std::size_t i = 0; i < p.positions.size(); ++i) {
        double v = rate_at(p.positions[i]);
        if (opts.sinc_envelope) v *= sinc_envelope(geo, p.positions[i]);
        p.values[i] = v;
    }
    return p;
}

namespace {

double arm_constant(const Geometry& geo, AliceArm arm) {
    return arm == AliceArm::focal ? geo.path_r_K : geo.path_r_L;
}

}  // namespace

StateVector phase_evolved_state(const Geometry& geo, AliceArm arm,
                                const std::vector<double>& z_grid) {
    if (z_grid.empty())
        throw std::invalid_argument("phase_evolved_state: empty z grid");
    const double k = geo.wavenumber();
    const double r_a = arm_constant(geo, arm);
    const double L = geo.slits_to_screen;
    const int nz = static_cast<int>(z_grid.size());

    std::vector<Complex> amps(2 * static_cast<std::size_t>(nz));
    std::vector<std::string> labels(amps.size());
    for (int i = 0; i < nz; ++i) {
        const auto [r1, r2] = path_lengths(geo, z_grid[i]);
        // Common on-axis path L subtracted: a global phase, removed so the
        // per-bin phases stay small and the fringe phase stays accurate.
        const double phase_h = k * (r_a + geo.path_r_D + (r2 - L));
        const double phase_v = k * (r_a + geo.path_r_D + (r1 - L));
        // |H z> partners the v photon (lower slit, r2) and vice versa. Both
        // terms enter with + under the folded-arm phase convention.
        amps[i] = std::polar(1.0, phase_h);
        amps[nz + i] = std::polar(1.0, phase_v);
        labels[i] = "Hz" + std::to_string(i);
        labels[nz + i] = "Vz" + std::to_string(i);
    }
    return StateVector(std::move(amps), std::move(labels)).normalized();
}

StateVector entangled_pair_state(const Geometry& geo, AliceArm arm) {
    const double k = geo.wavenumber();
    const double phase = k * (arm_constant(geo, arm) + geo.path_r_D);
    const Complex c = std::polar(1.0, phase);
    // (|HV> + |VH>)/sqrt(2) up to a global phase: the source pair with the
    // folded-arm phase convention applied, both of Alice's arm lengths equal.
    return StateVector({Complex{0.0, 0.0}, c, c, Complex{0.0, 0.0}},
                       {"HH", "HV", "VH", "VV"})
        .normalized();
}

}  // namespace eprsim
