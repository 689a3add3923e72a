#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eprsim/geometry.hpp"
#include "eprsim/hilbert.hpp"

namespace eprsim {

/// Down-conversion field state truncated at one pair, over the basis
/// {vac, hv, vh}: amplitudes (1, +eps, -eps), deliberately unnormalized
/// (eps is a small pump/nonlinearity parameter).
class SpdcState {
public:
    explicit SpdcState(double epsilon = 0.1);

    double epsilon() const { return epsilon_; }
    const StateVector& vec() const { return vec_; }

    Complex amp_vac() const { return vec_.amp(0); }
    Complex amp_hv() const { return vec_.amp(1); }
    Complex amp_vh() const { return vec_.amp(2); }

    // Pair amplitudes seen by the detection optics. The beam-splitter /
    // wave-plate folding stage fixes the relative phase of the two pair
    // terms; the sign flip on vh selects the bright fringe at z = 0 that
    // the detection rates assume.
    Complex path_amp_hv() const { return amp_hv(); }
    Complex path_amp_vh() const { return -amp_vh(); }

private:
    double epsilon_;
    StateVector vec_;
};

/// Positive-frequency detection-field operator over the two photon modes
/// (h, v): coefficient per mode = weight * exp(i k (common_path + path)).
/// Common and per-mode paths are kept separate so that only path
/// differences ever enter a rate.
struct FieldOperator {
    Complex weight_h{0.0, 0.0};
    Complex weight_v{0.0, 0.0};
    double path_h = 0.0;
    double path_v = 0.0;
    double common_path = 0.0;
    double wavenumber = 0.0;
    std::string description;

    Complex coeff_h() const;
    Complex coeff_v() const;
};

/// Slit-to-screen distances (r1 from the upper slit at +a/2, r2 from the
/// lower slit at -a/2). Exact model: r_i = sqrt(L^2 + (z -+ a/2)^2);
/// paraxial: r_i = L -+ z*a/(2L). Throws if |z| > screen_halfwidth.
std::pair<double, double> path_lengths(const Geometry& geo, double z);

FieldOperator field_bob(const Geometry& geo, double z);

enum class OffFocalPoint { l, m };

/// Off-focal detection at l annihilates only the v mode, at m only the h mode.
FieldOperator field_alice_offfocal(const Geometry& geo, OffFocalPoint which);

/// Focal-plane detection annihilates h and v with equal weight.
FieldOperator field_alice_focal(const Geometry& geo);

/// Coincidence rate |<vac| A B |state>|^2 with Alice's detection-mode
/// coefficient vector normalized to unit Euclidean norm (this fixes the
/// proportionality constant: each off-focal outcome rate is eps^2).
double coincidence_rate(const SpdcState& state, const FieldOperator& alice,
                        const FieldOperator& bob);

enum class AliceSetting { focal, offfocal_l, offfocal_m, offfocal_sum };

std::string to_string(AliceSetting s);
AliceSetting alice_setting_from_string(const std::string& s);

/// Binned rate or count pattern over screen positions.
struct Pattern {
    enum class Norm { raw, unit_integral };

    std::vector<double> positions;  // z values, meters
    std::vector<double> values;     // >= 0
    Norm normalization = Norm::raw;
    long n_events = 0;          // total events behind a counts pattern, 0 if analytic
    bool flagged_empty = false; // histogram of an empty event list

    double trapezoid_integral() const;

    /// Copy rescaled so the trapezoidal integral over positions is 1.
    Pattern unit_integral() const;
};

struct SweepOptions {
    /// Multiply rates by the single-slit sinc^2 envelope. Off by default:
    /// the plain rates carry no diffraction envelope.
    bool sinc_envelope = false;
};

/// Rate evaluated on the bin-center grid for the given Alice setting;
/// offfocal_sum adds the l and m rates (Bob's singles when Alice is off
/// the focal plane).
Pattern sweep_pattern(const SpdcState& state, const Geometry& geo,
                      AliceSetting setting, const SweepOptions& opts = {});

double sinc_envelope(const Geometry& geo, double z);

enum class AliceArm { focal, offfocal };

/// Bipartite state of Alice's polarization mode and Bob's screen position
/// after inserting the propagation phases, normalized. Basis is
/// {H, V} x {z bins}, A-major. The common on-axis path is removed from the
/// per-bin phases (global phase only).
StateVector phase_evolved_state(const Geometry& geo, AliceArm arm,
                                const std::vector<double>& z_grid);

/// Two-qubit polarization pair state with the propagation phases of the
/// given arm (global here since both of Alice's arm lengths are equal),
/// normalized. Basis {HH, HV, VH, VV}.
StateVector entangled_pair_state(const Geometry& geo, AliceArm arm);

}  // namespace eprsim
