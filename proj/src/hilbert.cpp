#include "eprsim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eprsim {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return labels;
}

double max_abs(const std::vector<Complex>& m) {
    double v = 0.0;
    for (const auto& e : m) v = std::max(v, std::abs(e));
    return v;
}

void require_hermitian(const std::vector<Complex>& m, int dim, const char* what) {
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            if (std::abs(m[i * dim + j] - std::conj(m[j * dim + i])) > kAlgebraTol) {
                throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
            }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(std::vector<Complex> amplitudes,
                         std::vector<std::string> basis_labels)
    : amplitudes_(std::move(amplitudes)), labels_(std::move(basis_labels)) {
    require(!amplitudes_.empty(), "StateVector: empty amplitude list");
    require(amplitudes_.size() == labels_.size(),
            "StateVector: amplitude/label length mismatch");
}

StateVector::StateVector(std::vector<Complex> amplitudes) {
    labels_ = default_labels(amplitudes.size());
    amplitudes_ = std::move(amplitudes);
    require(!amplitudes_.empty(), "StateVector: empty amplitude list");
}

double StateVector::squared_norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a);
    return s;
}

StateVector StateVector::normalized() const {
    const double n2 = squared_norm();
    if (n2 < 1e-300) throw std::invalid_argument("normalize: zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    std::vector<Complex> amps(amplitudes_);
    for (auto& a : amps) a *= inv;
    return StateVector(std::move(amps), labels_);
}

Complex StateVector::inner(const StateVector& rhs) const {
    require(dim() == rhs.dim(), "inner: dimension mismatch");
    Complex s{0.0, 0.0};
    for (int i = 0; i < dim(); ++i) s += std::conj(amplitudes_[i]) * rhs.amplitudes_[i];
    return s;
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(int dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    require(dim_ > 0, "HermitianOperator: dim must be positive");
    require(entries_.size() == static_cast<std::size_t>(dim_) * dim_,
            "HermitianOperator: entry count != dim*dim");
    require_hermitian(entries_, dim_, "HermitianOperator");
}

HermitianOperator HermitianOperator::identity(int dim) {
    std::vector<Complex> m(static_cast<std::size_t>(dim) * dim, Complex{0.0, 0.0});
    for (int i = 0; i < dim; ++i) m[i * dim + i] = Complex{1.0, 0.0};
    return HermitianOperator(dim, std::move(m));
}

HermitianOperator HermitianOperator::outer(const StateVector& v) {
    const int n = v.dim();
    std::vector<Complex> m(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = v.amp(i) * std::conj(v.amp(j));
    return HermitianOperator(n, std::move(m));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& rhs) const {
    require(dim_ == rhs.dim_, "operator+: dimension mismatch");
    std::vector<Complex> m(entries_);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += rhs.entries_[i];
    return HermitianOperator(dim_, std::move(m));
}

std::vector<Complex> HermitianOperator::multiply(const HermitianOperator& rhs) const {
    require(dim_ == rhs.dim_, "multiply: dimension mismatch");
    const int n = dim_;
    std::vector<Complex> out(static_cast<std::size_t>(n) * n, Complex{0.0, 0.0});
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Complex aik = entries_[i * n + k];
            if (aik == Complex{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) out[i * n + j] += aik * rhs.entries_[k * n + j];
        }
    return out;
}

std::vector<double> HermitianOperator::eigenvalues() const {
    return hermitian_eigenvalues(entries_, dim_);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(int dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
    require(dim_ > 0, "DensityMatrix: dim must be positive");
    require(entries_.size() == static_cast<std::size_t>(dim_) * dim_,
            "DensityMatrix: entry count != dim*dim");
    require_hermitian(entries_, dim_, "DensityMatrix");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& v) {
    const double n2 = v.squared_norm();
    if (n2 < 1e-300) throw std::invalid_argument("from_pure: zero vector");
    const int n = v.dim();
    std::vector<Complex> m(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = v.amp(i) * std::conj(v.amp(j)) / n2;
    return DensityMatrix(n, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    std::vector<Complex> m(static_cast<std::size_t>(dim) * dim, Complex{0.0, 0.0});
    for (int i = 0; i < dim; ++i) m[i * dim + i] = Complex{1.0 / dim, 0.0};
    return DensityMatrix(dim, std::move(m));
}

DensityMatrix DensityMatrix::mixture(
    const std::vector<std::pair<double, DensityMatrix>>& parts) {
    require(!parts.empty(), "mixture: no components");
    const int n = parts.front().second.dim();
    std::vector<Complex> m(static_cast<std::size_t>(n) * n, Complex{0.0, 0.0});
    for (const auto& [w, rho] : parts) {
        require(w >= 0.0, "mixture: negative weight");
        require(rho.dim() == n, "mixture: dimension mismatch");
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += w * rho.entries_[i];
    }
    return DensityMatrix(n, std::move(m));
}

double DensityMatrix::trace_real() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += entries_[i * dim_ + i].real();
    return t;
}

std::vector<double> DensityMatrix::eigenvalues() const {
    return hermitian_eigenvalues(entries_, dim_);
}

void DensityMatrix::check_valid(double trace_tol) const {
    if (std::abs(trace_real() - 1.0) > trace_tol)
        throw std::invalid_argument("DensityMatrix: trace differs from 1");
    for (double ev : eigenvalues()) {
        if (ev < -kEigenvalueTol)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
}

// ---------------------------------------------------------------------------
// Free operations

StateVector tensor_product(const StateVector& a, const StateVector& b) {
    const int na = a.dim(), nb = b.dim();
    std::vector<Complex> amps(static_cast<std::size_t>(na) * nb);
    std::vector<std::string> labels(static_cast<std::size_t>(na) * nb);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            amps[i * nb + j] = a.amp(i) * b.amp(j);
            labels[i * nb + j] = a.basis_labels()[i] + b.basis_labels()[j];
        }
    }
    return StateVector(std::move(amps), std::move(labels));
}

DensityMatrix trace_out_a(const DensityMatrix& rho, const BipartiteLayout& layout) {
    require(layout.dim_a > 0 && layout.dim_b > 0, "trace_out_a: bad layout");
    require(rho.dim() == layout.dim(), "trace_out_a: layout inconsistent with rho.dim");
    const int da = layout.dim_a, db = layout.dim_b;
    std::vector<Complex> out(static_cast<std::size_t>(db) * db, Complex{0.0, 0.0});
    for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j)
            for (int a = 0; a < da; ++a)
                out[i * db + j] += rho.at(layout.index(a, i), layout.index(a, j));
    return DensityMatrix(db, std::move(out));
}

DensityMatrix trace_out_b(const DensityMatrix& rho, const BipartiteLayout& layout) {
    require(layout.dim_a > 0 && layout.dim_b > 0, "trace_out_b: bad layout");
    require(rho.dim() == layout.dim(), "trace_out_b: layout inconsistent with rho.dim");
    const int da = layout.dim_a, db = layout.dim_b;
    std::vector<Complex> out(static_cast<std::size_t>(da) * da, Complex{0.0, 0.0});
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int b = 0; b < db; ++b)
                out[i * da + j] += rho.at(layout.index(i, b), layout.index(j, b));
    return DensityMatrix(da, std::move(out));
}

double trace_distance(const DensityMatrix& r1, const DensityMatrix& r2) {
    require(r1.dim() == r2.dim(), "trace_distance: dimension mismatch");
    const int n = r1.dim();
    std::vector<Complex> diff(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = r1.entries()[i] - r2.entries()[i];
    double s = 0.0;
    for (double ev : hermitian_eigenvalues(diff, n)) s += std::abs(ev);
    return 0.5 * s;
}

double expectation(const HermitianOperator& op, const StateVector& psi) {
    require(op.dim() == psi.dim(), "expectation: dimension mismatch");
    const int n = psi.dim();
    Complex acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        Complex row{0.0, 0.0};
        for (int j = 0; j < n; ++j) row += op.at(i, j) * psi.amp(j);
        acc += std::conj(psi.amp(i)) * row;
    }
    if (std::abs(acc.imag()) > 1e-8)
        throw std::runtime_error("expectation: non-negligible imaginary part");
    return acc.real();
}

StateVector normalize(const StateVector& psi) {
    return psi.normalized();
}

// ---------------------------------------------------------------------------
// Hermitian eigenvalues: closed form for 2x2, cyclic Jacobi above.

namespace {

std::vector<double> eigenvalues_2x2(const std::vector<Complex>& m) {
    const double a = m[0].real();
    const double d = m[3].real();
    const double half_diff = 0.5 * (a - d);
    const double r = std::sqrt(half_diff * half_diff + std::norm(m[1]));
    const double mid = 0.5 * (a + d);
    return {mid - r, mid + r};
}

double off_diagonal_norm(const std::vector<Complex>& m, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(m[i * n + j]);
    return std::sqrt(s);
}

// One two-sided rotation zeroing m[p][q]. The rotation is the complex
// Jacobi transform U = [[c, -s e^{i phi}], [s e^{-i phi}, c]] on the (p,q)
// plane with phi = arg(m[p][q]).
void jacobi_rotate(std::vector<Complex>& m, int n, int p, int q) {
    const Complex mpq = m[p * n + q];
    const double beta = std::abs(mpq);
    if (beta == 0.0) return;
    const Complex phase = mpq / beta;  // e^{i phi}

    const double app = m[p * n + p].real();
    const double aqq = m[q * n + q].real();
    const double tau = (aqq - app) / (2.0 * beta);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                     (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // Columns: B = A U.
    for (int r = 0; r < n; ++r) {
        const Complex arp = m[r * n + p];
        const Complex arq = m[r * n + q];
        m[r * n + p] = c * arp + s * std::conj(phase) * arq;
        m[r * n + q] = -s * phase * arp + c * arq;
    }
    // Rows: A' = U^H B.
    for (int r = 0; r < n; ++r) {
        const Complex apr = m[p * n + r];
        const Complex aqr = m[q * n + r];
        m[p * n + r] = c * apr + s * phase * aqr;
        m[q * n + r] = -s * std::conj(phase) * apr + c * aqr;
    }
    // Keep the diagonal real and the target exactly zero.
    m[p * n + p] = Complex{m[p * n + p].real(), 0.0};
    m[q * n + q] = Complex{m[q * n + q].real(), 0.0};
    m[p * n + q] = Complex{0.0, 0.0};
    m[q * n + p] = Complex{0.0, 0.0};
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const std::vector<Complex>& m, int dim) {
    require(dim > 0, "hermitian_eigenvalues: dim must be positive");
    require(m.size() == static_cast<std::size_t>(dim) * dim,
            "hermitian_eigenvalues: entry count != dim*dim");
    if (dim == 1) return {m[0].real()};
    if (dim == 2) {
        auto ev = eigenvalues_2x2(m);
        std::sort(ev.begin(), ev.end());
        return ev;
    }

    std::vector<Complex> a(m);
    const double scale = std::max(1.0, max_abs(a));
    const double threshold = 1e-14 * scale;
    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a, dim) <= threshold) break;
        for (int p = 0; p < dim - 1; ++p)
            for (int q = p + 1; q < dim; ++q)
                if (std::abs(a[p * dim + q]) > threshold * 1e-2)
                    jacobi_rotate(a, dim, p, q);
    }

    std::vector<double> ev(dim);
    for (int i = 0; i < dim; ++i) ev[i] = a[i * dim + i].real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace eprsim
