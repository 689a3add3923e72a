#pragma once

#include <complex>
#include <string>
#include <vector>

namespace eprsim {

using Complex = std::complex<double>;

// Tolerances used throughout for algebraic identities and eigenvalue checks.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kEigenvalueTol = 1e-10;

/// Complex amplitude vector over a labeled basis. Immutable after
/// construction; safe to share across threads.
class StateVector {
public:
    StateVector(std::vector<Complex> amplitudes,
                std::vector<std::string> basis_labels);

    /// Labels default to "0", "1", ...
    explicit StateVector(std::vector<Complex> amplitudes);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const std::vector<Complex>& amplitudes() const { return amplitudes_; }
    const std::vector<std::string>& basis_labels() const { return labels_; }
    const Complex& amp(int i) const { return amplitudes_.at(i); }

    double squared_norm() const;

    /// Unit-norm copy, direction preserved. Throws on a zero vector.
    StateVector normalized() const;

    /// Inner product <this|rhs>.
    Complex inner(const StateVector& rhs) const;

private:
    std::vector<Complex> amplitudes_;
    std::vector<std::string> labels_;
};

/// Hermitian dim x dim operator, validated on construction.
class HermitianOperator {
public:
    HermitianOperator(int dim, std::vector<Complex> entries);

    static HermitianOperator identity(int dim);

    /// |v><v| (no normalization of v).
    static HermitianOperator outer(const StateVector& v);

    int dim() const { return dim_; }
    const Complex& at(int i, int j) const { return entries_[i * dim_ + j]; }
    const std::vector<Complex>& entries() const { return entries_; }

    HermitianOperator operator+(const HermitianOperator& rhs) const;

    /// Raw matrix product (generally not Hermitian).
    std::vector<Complex> multiply(const HermitianOperator& rhs) const;

    std::vector<double> eigenvalues() const;

private:
    int dim_;
    std::vector<Complex> entries_;  // row-major
};

/// Hermitian, unit-trace (for normalized states), positive semidefinite
/// operator. Hermiticity is validated on construction; trace/positivity are
/// checked by check_valid().
class DensityMatrix {
public:
    DensityMatrix(int dim, std::vector<Complex> entries);

    /// |v><v| / <v|v>. Throws on a zero vector.
    static DensityMatrix from_pure(const StateVector& v);

    static DensityMatrix maximally_mixed(int dim);

    /// Probability-weighted mixture sum(w_i rho_i). Weights must be >= 0.
    static DensityMatrix mixture(
        const std::vector<std::pair<double, DensityMatrix>>& parts);

    int dim() const { return dim_; }
    const Complex& at(int i, int j) const { return entries_[i * dim_ + j]; }
    const std::vector<Complex>& entries() const { return entries_; }

    double trace_real() const;

    /// Ascending eigenvalues (real; Hermitian input).
    std::vector<double> eigenvalues() const;

    /// Throws if trace differs from 1 beyond tol or an eigenvalue is below
    /// -kEigenvalueTol.
    void check_valid(double trace_tol = kAlgebraTol) const;

private:
    int dim_;
    std::vector<Complex> entries_;
};

/// Index convention for a bipartite system: A-major, index = a*dim_b + b.
struct BipartiteLayout {
    int dim_a = 0;
    int dim_b = 0;

    int dim() const { return dim_a * dim_b; }
    int index(int a, int b) const { return a * dim_b + b; }
};

/// Kronecker product; output index (i*dim_b + j), labels concatenated.
StateVector tensor_product(const StateVector& a, const StateVector& b);

/// Trace out subsystem A, returning B's marginal: out[i][j] = sum_a rho[a,i; a,j].
DensityMatrix trace_out_a(const DensityMatrix& rho, const BipartiteLayout& layout);

/// Trace out subsystem B, returning A's marginal.
DensityMatrix trace_out_b(const DensityMatrix& rho, const BipartiteLayout& layout);

/// (1/2) sum |eigenvalues(r1 - r2)|.
double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2);

/// <psi|op|psi>. psi need not be normalized. Throws if the imaginary residue
/// exceeds 1e-8 (non-Hermitian operator bug); residues below that are dropped.
double expectation(const HermitianOperator& op, const StateVector& psi);

StateVector normalize(const StateVector& psi);

/// Eigenvalues of a row-major complex Hermitian matrix, ascending.
/// Closed form for dim 2, cyclic Jacobi rotations above (intended for the
/// small dimensions used here, <= 8).
std::vector<double> hermitian_eigenvalues(const std::vector<Complex>& m, int dim);

}  // namespace eprsim
