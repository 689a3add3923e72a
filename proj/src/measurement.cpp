#include "eprsim/measurement.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace eprsim {

std::string to_string(MeasurementRule r) {
    switch (r) {
        case MeasurementRule::von_neumann_offfocal: return "von_neumann_offfocal";
        case MeasurementRule::lueders_focal: return "lueders_focal";
        case MeasurementRule::coherent_focal: return "coherent_focal";
    }
    return "?";
}

MeasurementRule rule_from_string(const std::string& s) {
    if (s == "von_neumann_offfocal") return MeasurementRule::von_neumann_offfocal;
    if (s == "lueders_focal") return MeasurementRule::lueders_focal;
    if (s == "coherent_focal") return MeasurementRule::coherent_focal;
    throw std::invalid_argument("unknown measurement rule '" + s + "'");
}

AliceArm arm_for(MeasurementRule r) {
    return r == MeasurementRule::von_neumann_offfocal ? AliceArm::offfocal
                                                      : AliceArm::focal;
}

namespace {

constexpr int kAliceH = 0;
constexpr int kAliceV = 1;

bool matrices_equal(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > kAlgebraTol) return false;
    return true;
}

bool matrix_is_zero(const std::vector<Complex>& a) {
    for (const auto& e : a)
        if (std::abs(e) > kAlgebraTol) return false;
    return true;
}

// Scale c with P^2 = c P, or NaN when no such scale exists. c is estimated
// from the traces and then verified entry-wise.
double idempotent_scale_of(const HermitianOperator& p) {
    double tr = 0.0;
    for (int i = 0; i < p.dim(); ++i) tr += p.at(i, i).real();
    const auto p2 = p.multiply(p);
    double tr2 = 0.0;
    for (int i = 0; i < p.dim(); ++i) tr2 += p2[i * p.dim() + i].real();
    if (std::abs(tr) < kAlgebraTol) return std::abs(tr2) < kAlgebraTol
                                               ? 1.0
                                               : std::numeric_limits<double>::quiet_NaN();
    const double c = tr2 / tr;
    std::vector<Complex> resid(p2);
    for (int i = 0; i < p.dim(); ++i)
        for (int j = 0; j < p.dim(); ++j)
            resid[i * p.dim() + j] -= c * p.at(i, j);
    return matrix_is_zero(resid) ? c : std::numeric_limits<double>::quiet_NaN();
}

void require_alice_qubit(const StateVector& psi, const BipartiteLayout& layout) {
    if (layout.dim_a != 2)
        throw std::invalid_argument("measure: Alice subsystem must be 2-dimensional");
    if (psi.dim() != layout.dim())
        throw std::invalid_argument("measure: layout inconsistent with psi.dim");
    if (std::abs(psi.squared_norm() - 1.0) > 1e-9)
        throw std::invalid_argument("measure: psi must be normalized");
}

// Conditional Bob vector (<bra_A| x I)|psi>.
std::vector<Complex> project_alice(const StateVector& psi,
                                   const BipartiteLayout& layout,
                                   const std::vector<Complex>& bra) {
    std::vector<Complex> b(layout.dim_b, Complex{0.0, 0.0});
    for (int a = 0; a < layout.dim_a; ++a) {
        const Complex w = std::conj(bra[a]);
        if (w == Complex{0.0, 0.0}) continue;
        for (int j = 0; j < layout.dim_b; ++j) b[j] += w * psi.amp(layout.index(a, j));
    }
    return b;
}

MeasurementOutcome outcome_from_vector(std::string label, std::vector<Complex> b) {
    MeasurementOutcome out;
    out.label = std::move(label);
    double w = 0.0;
    for (const auto& c : b) w += std::norm(c);
    out.raw_weight = w;
    if (w > 1e-300) {
        StateVector bob(std::move(b));
        out.bob_state = bob.normalized();
        out.bob_density = DensityMatrix::from_pure(*out.bob_state);
    }
    return out;
}

void assign_probabilities(std::vector<MeasurementOutcome>& outcomes) {
    double total = 0.0;
    for (const auto& o : outcomes) total += o.raw_weight;
    if (total <= 0.0) return;  // all zero-weight: probabilities stay 0
    for (auto& o : outcomes) o.probability = o.raw_weight / total;
}

}  // namespace

ProjectorFamily analyze_family(std::vector<HermitianOperator> members,
                               std::vector<std::string> labels) {
    if (members.empty()) throw std::invalid_argument("analyze_family: empty family");
    if (members.size() != labels.size())
        throw std::invalid_argument("analyze_family: member/label count mismatch");
    const int n = members.front().dim();
    for (const auto& m : members)
        if (m.dim() != n)
            throw std::invalid_argument("analyze_family: mixed dimensions");

    ProjectorFamily fam;
    fam.labels = std::move(labels);

    // Completeness: sum of members equals the identity.
    std::vector<Complex> sum(static_cast<std::size_t>(n) * n, Complex{0.0, 0.0});
    for (const auto& m : members)
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += m.entries()[i];
    fam.complete = matrices_equal(sum, HermitianOperator::identity(n).entries());

    // Orthogonality: P_i P_j = delta_ij P_i.
    fam.orthogonal = true;
    for (std::size_t i = 0; i < members.size() && fam.orthogonal; ++i) {
        for (std::size_t j = 0; j < members.size() && fam.orthogonal; ++j) {
            const auto prod = members[i].multiply(members[j]);
            if (i == j) {
                if (!matrices_equal(prod, members[i].entries())) fam.orthogonal = false;
            } else if (!matrix_is_zero(prod)) {
                fam.orthogonal = false;
            }
        }
    }

    fam.idempotent_scale.reserve(members.size());
    for (const auto& m : members) fam.idempotent_scale.push_back(idempotent_scale_of(m));
    fam.members = std::move(members);
    return fam;
}

ProjectorFamily build_family(MeasurementRule rule) {
    const StateVector h({Complex{1.0, 0.0}, Complex{0.0, 0.0}}, {"H", "V"});
    const StateVector v({Complex{0.0, 0.0}, Complex{1.0, 0.0}}, {"H", "V"});
    switch (rule) {
        case MeasurementRule::von_neumann_offfocal:
            return analyze_family(
                {HermitianOperator::outer(v), HermitianOperator::outer(h)}, {"l", "m"});
        case MeasurementRule::lueders_focal:
            return analyze_family(
                {HermitianOperator::outer(v) + HermitianOperator::outer(h)}, {"k"});
        case MeasurementRule::coherent_focal: {
            const StateVector plus({Complex{1.0, 0.0}, Complex{1.0, 0.0}}, {"H", "V"});
            return analyze_family({HermitianOperator::outer(plus)}, {"k"});
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<MeasurementOutcome> measure(MeasurementRule rule, const StateVector& psi,
                                        const BipartiteLayout& layout) {
    require_alice_qubit(psi, layout);
    std::vector<MeasurementOutcome> outcomes;

    switch (rule) {
        case MeasurementRule::von_neumann_offfocal: {
            // l registers the v photon, m the h photon.
            std::vector<Complex> bra_v{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
            std::vector<Complex> bra_h{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
            outcomes.push_back(
                outcome_from_vector("l", project_alice(psi, layout, bra_v)));
            outcomes.push_back(
                outcome_from_vector("m", project_alice(psi, layout, bra_h)));
            break;
        }
        case MeasurementRule::coherent_focal: {
            // Degenerate amplitudes superpose: act with the unnormalized
            // <H| + <V| and report the raw weight alongside the
            // renormalized probability.
            std::vector<Complex> bra_sum{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
            outcomes.push_back(
                outcome_from_vector("k", project_alice(psi, layout, bra_sum)));
            break;
        }
        case MeasurementRule::lueders_focal: {
            // P = I on Alice: the joint state is untouched; Bob's photon
            // stays correlated, so only his marginal is defined.
            MeasurementOutcome out;
            out.label = "k";
            out.raw_weight = psi.squared_norm();
            out.bob_density = trace_out_a(DensityMatrix::from_pure(psi), layout);
            outcomes.push_back(std::move(out));
            break;
        }
    }
    assign_probabilities(outcomes);
    return outcomes;
}

std::vector<MeasurementOutcome> apply_family(const ProjectorFamily& family,
                                             const StateVector& psi,
                                             const BipartiteLayout& layout) {
    if (psi.dim() != layout.dim())
        throw std::invalid_argument("apply_family: layout inconsistent with psi.dim");
    if (family.members.empty() || family.members.front().dim() != layout.dim_a)
        throw std::invalid_argument("apply_family: family does not act on A");

    std::vector<MeasurementOutcome> outcomes;
    outcomes.reserve(family.members.size());
    for (std::size_t i = 0; i < family.members.size(); ++i) {
        const auto& p = family.members[i];
        // (P x I)|psi>
        std::vector<Complex> joint(psi.dim(), Complex{0.0, 0.0});
        for (int a = 0; a < layout.dim_a; ++a)
            for (int ap = 0; ap < layout.dim_a; ++ap) {
                const Complex w = p.at(a, ap);
                if (w == Complex{0.0, 0.0}) continue;
                for (int b = 0; b < layout.dim_b; ++b)
                    joint[layout.index(a, b)] += w * psi.amp(layout.index(ap, b));
            }
        MeasurementOutcome out;
        out.label = family.labels[i];
        double w = 0.0;
        for (const auto& c : joint) w += std::norm(c);
        out.raw_weight = w;
        if (w > 1e-300) {
            out.bob_density =
                trace_out_a(DensityMatrix::from_pure(StateVector(std::move(joint))),
                            layout);
        }
        outcomes.push_back(std::move(out));
    }
    assign_probabilities(outcomes);
    return outcomes;
}

double joint_expectation(const HermitianOperator& op_a, const HermitianOperator& op_b,
                         const StateVector& psi, const BipartiteLayout& layout) {
    if (psi.dim() != layout.dim() || op_a.dim() != layout.dim_a ||
        op_b.dim() != layout.dim_b)
        throw std::invalid_argument("joint_expectation: dimension mismatch");
    const int da = layout.dim_a, db = layout.dim_b;

    // <psi|(A x B)|psi> = sum_{b,b'} G[b][b'] B[b][b'] with G = Psi^H (A Psi),
    // Psi the dA x dB reshape of psi.
    std::vector<Complex> apsi(static_cast<std::size_t>(da) * db, Complex{0.0, 0.0});
    for (int a = 0; a < da; ++a)
        for (int ap = 0; ap < da; ++ap) {
            const Complex w = op_a.at(a, ap);
            if (w == Complex{0.0, 0.0}) continue;
            for (int b = 0; b < db; ++b) apsi[a * db + b] += w * psi.amp(layout.index(ap, b));
        }
    Complex acc{0.0, 0.0};
    for (int b = 0; b < db; ++b) {
        for (int bp = 0; bp < db; ++bp) {
            const Complex opb = op_b.at(b, bp);
            if (opb == Complex{0.0, 0.0}) continue;
            Complex g{0.0, 0.0};
            for (int a = 0; a < da; ++a)
                g += std::conj(psi.amp(layout.index(a, b))) * apsi[a * db + bp];
            acc += g * opb;
        }
    }
    if (std::abs(acc.imag()) > 1e-8)
        throw std::runtime_error("joint_expectation: non-negligible imaginary part");
    return acc.real();
}

DensityMatrix bob_marginal(MeasurementRule rule, const StateVector& psi,
                           const BipartiteLayout& layout) {
    const auto outcomes = measure(rule, psi, layout);
    std::vector<std::pair<double, DensityMatrix>> parts;
    for (const auto& o : outcomes) {
        if (o.probability > 0.0 && o.bob_density)
            parts.emplace_back(o.probability, *o.bob_density);
    }
    if (parts.empty())
        throw std::runtime_error("bob_marginal: no outcome carries any weight");
    return DensityMatrix::mixture(parts);
}

SignalStrength signal_strength(const StateVector& psi, const BipartiteLayout& layout) {
    const auto rho_f = bob_marginal(MeasurementRule::coherent_focal, psi, layout);
    const auto rho_g = bob_marginal(MeasurementRule::von_neumann_offfocal, psi, layout);
    SignalStrength s;
    s.trace_dist = trace_distance(rho_f, rho_g);
    s.helstrom_success = 0.5 * (1.0 + s.trace_dist);
    return s;
}

}  // namespace eprsim
