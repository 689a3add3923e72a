#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eprsim/experiment.hpp"
#include "eprsim/hilbert.hpp"

namespace eprsim {

/// The three reduction semantics for Alice's measurement.
///  - von_neumann_offfocal: non-degenerate projection onto {|V>, |H>}
///    (detector at l or m).
///  - lueders_focal: degenerate outcome handled by the orthogonal-sum
///    projector P_l + P_m = I.
///  - coherent_focal: degenerate amplitudes superpose; the reduction acts
///    with (<H| + <V|), whose operator (|H>+|V>)(<H|+<V|) is not idempotent.
enum class MeasurementRule { von_neumann_offfocal, lueders_focal, coherent_focal };

std::string to_string(MeasurementRule r);
MeasurementRule rule_from_string(const std::string& s);

/// Measurement plane implied by the rule.
AliceArm arm_for(MeasurementRule r);

/// Family of measurement operators on Alice's 2-dim space with computed
/// (not asserted) structure flags; the coherent operator fails
/// idempotence with P^2 = 2P and its singleton family is not complete.
struct ProjectorFamily {
    std::vector<HermitianOperator> members;
    std::vector<std::string> labels;
    bool complete = false;    // sum of members == identity within 1e-12
    bool orthogonal = false;  // P_i P_j == delta_ij P_i within 1e-12
    std::vector<double> idempotent_scale;  // c per member with P^2 = c P
};

ProjectorFamily analyze_family(std::vector<HermitianOperator> members,
                               std::vector<std::string> labels);

ProjectorFamily build_family(MeasurementRule rule);

struct MeasurementOutcome {
    std::string label;
    double probability = 0.0;  // raw weights renormalized across the family
    double raw_weight = 0.0;   // squared norm of the unnormalized conditional
    // Normalized pure conditional state of B when one exists; empty for a
    // zero-weight outcome and for the Lueders rule (B stays correlated).
    std::optional<StateVector> bob_state;
    std::optional<DensityMatrix> bob_density;
};

/// Apply the rule to Alice's side of a normalized bipartite pure state
/// (dim_a must be 2).
std::vector<MeasurementOutcome> measure(MeasurementRule rule,
                                        const StateVector& psi,
                                        const BipartiteLayout& layout);

/// Generic degenerate-safe projective measurement: conditional joint state
/// (P_i x I)|psi>, raw weight its squared norm, B marginal by tracing A.
std::vector<MeasurementOutcome> apply_family(const ProjectorFamily& family,
                                             const StateVector& psi,
                                             const BipartiteLayout& layout);

/// <psi|(op_a x op_b)|psi>, real within 1e-10.
double joint_expectation(const HermitianOperator& op_a,
                         const HermitianOperator& op_b,
                         const StateVector& psi,
                         const BipartiteLayout& layout);

/// Probability-weighted mixture of B's conditional states across outcomes.
/// Equals the partial trace for the two standard rules; pure for the
/// coherent rule on a maximally entangled input.
DensityMatrix bob_marginal(MeasurementRule rule, const StateVector& psi,
                           const BipartiteLayout& layout);

struct SignalStrength {
    double trace_dist = 0.0;
    double helstrom_success = 0.0;  // (1 + trace_dist) / 2
};

/// Distinguishability of B's marginals under coherent_focal vs
/// von_neumann_offfocal on the same input state.
SignalStrength signal_strength(const StateVector& psi, const BipartiteLayout& layout);

}  // namespace eprsim
