#pragma once

// Dense complex linear algebra for open-system dynamics: Hamiltonians and
// their eigensystems, Bohr-frequency tables, density matrices, and
// superoperators acting on column-major vectorized density matrices.
//
// Vectorization convention: vec stacks columns, so
//     vec(A rho B) = (B^T (x) A) vec(rho).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "nsme/errors.hpp"
#include "nsme/units.hpp"

namespace nsme {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_error(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ", expected square");
}

// ---------------------------------------------------------------------------
// Site Hamiltonian

/// How an input matrix that is not exactly Hermitian is made Hermitian.
enum class Symmetrization {
    average,        ///< (M + M^dagger) / 2
    upper_triangle  ///< keep the diagonal and upper triangle, mirror it below
};

/// System Hamiltonian in the site basis, stored in rad/ps and exactly
/// Hermitian. The asymmetry of the raw input is kept for reporting.
class SiteHamiltonian {
public:
    /// Build from a matrix in cm^-1.
    static SiteHamiltonian from_wavenumbers(const Matrix& cm,
                                            Symmetrization policy = Symmetrization::average) {
        auto h = symmetrize(cm, policy, "hamiltonian");
        return SiteHamiltonian(units::to_angular(1.0) * h.first, h.second);
    }

    static SiteHamiltonian from_wavenumbers(const RealMatrix& cm,
                                            Symmetrization policy = Symmetrization::average) {
        return from_wavenumbers(Matrix(cm.cast<cplx>()), policy);
    }

    /// Build from a matrix already in rad/ps.
    static SiteHamiltonian from_angular(const Matrix& w,
                                        Symmetrization policy = Symmetrization::average) {
        auto h = symmetrize(w, policy, "hamiltonian");
        return SiteHamiltonian(std::move(h.first), h.second);
    }

    Index dim() const { return matrix_.rows(); }
    const Matrix& matrix() const { return matrix_; }

    /// max |M - M^dagger| of the raw input, in the input's units.
    double max_asymmetry() const { return max_asymmetry_; }

private:
    SiteHamiltonian(Matrix m, double asym) : matrix_(std::move(m)), max_asymmetry_(asym) {}

    static std::pair<Matrix, double> symmetrize(const Matrix& m, Symmetrization policy,
                                                const char* what) {
        require_square(m, what);
        if (m.rows() < 2) throw DimensionError(std::string(what) + ": dimension must be >= 2");
        if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite entry");
        const double asym = hermiticity_error(m);
        Matrix h;
        if (policy == Symmetrization::average) {
            h = 0.5 * (m + m.adjoint());
        } else {
            h = m.triangularView<Eigen::Upper>();
            h.triangularView<Eigen::StrictlyLower>() = m.adjoint().triangularView<Eigen::StrictlyLower>();
            for (Index i = 0; i < h.rows(); ++i) h(i, i) = cplx(h(i, i).real(), 0.0);
        }
        // Kill rounding residue so the stored matrix is Hermitian bit-for-bit.
        h.triangularView<Eigen::StrictlyLower>() = h.adjoint().triangularView<Eigen::StrictlyLower>();
        return {std::move(h), asym};
    }

    Matrix matrix_;
    double max_asymmetry_;
};

// ---------------------------------------------------------------------------
// Eigensystem

inline double default_degeneracy_tolerance(const RealVector& energies) {
    const double scale = energies.size() == 0 ? 0.0 : energies.cwiseAbs().maxCoeff();
    return 1e-9 * std::max(1.0, scale);
}

struct EigenSystem {
    RealVector energies;  ///< ascending, rad/ps
    Matrix vectors;       ///< column n is eigenvector n
    std::vector<std::vector<Index>> degeneracy_groups;
    std::vector<std::size_t> group_of;  ///< level -> index into degeneracy_groups
    double tolerance = 0.0;

    Index dim() const { return energies.size(); }

    /// omega_m - omega_n
    double bohr(Index m, Index n) const { return energies(m) - energies(n); }

    /// Projector onto the eigenspace of degeneracy group g.
    Matrix group_projector(std::size_t g) const {
        Matrix p = Matrix::Zero(dim(), dim());
        for (Index n : degeneracy_groups.at(g)) p += vectors.col(n) * vectors.col(n).adjoint();
        return p;
    }

    Matrix to_eigen(const Matrix& site) const { return vectors.adjoint() * site * vectors; }
    Matrix to_site(const Matrix& eig) const { return vectors * eig * vectors.adjoint(); }
};

/// Diagonalize a Hermitian Hamiltonian. Eigenvalues ascend; each eigenvector
/// is phased so that its largest-magnitude component is real and positive.
inline EigenSystem eigendecompose(const SiteHamiltonian& h, std::optional<double> tol_deg = {}) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecompose: Hermitian eigensolver did not converge (dim " +
                             std::to_string(h.dim()) + ")");

    EigenSystem es;
    es.energies = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
    for (Index n = 0; n < es.vectors.cols(); ++n) {
        Index best = 0;
        es.vectors.col(n).cwiseAbs().maxCoeff(&best);
        const cplx c = es.vectors(best, n);
        es.vectors.col(n) *= std::conj(c) / std::abs(c);
        es.vectors(best, n) = cplx(es.vectors(best, n).real(), 0.0);
    }

    es.tolerance = tol_deg.value_or(default_degeneracy_tolerance(es.energies));
    es.group_of.resize(static_cast<std::size_t>(es.dim()));
    for (Index n = 0; n < es.dim(); ++n) {
        if (n == 0 || es.energies(n) - es.energies(n - 1) > es.tolerance)
            es.degeneracy_groups.emplace_back();
        es.degeneracy_groups.back().push_back(n);
        es.group_of[static_cast<std::size_t>(n)] = es.degeneracy_groups.size() - 1;
    }
    return es;
}

// ---------------------------------------------------------------------------
// Bohr frequencies

/// Distinct Bohr frequencies omega_m - omega_n, clustered with the
/// degeneracy tolerance. Clusters are sorted ascending and mirror-symmetric:
/// cluster c holds -omega of cluster size()-1-c, and the zero cluster sits in
/// the middle with a representative of exactly 0.
class BohrFrequencyTable {
public:
    explicit BohrFrequencyTable(const EigenSystem& es) : tol_(es.tolerance), dim_(es.dim()) {
        std::vector<double> positive;
        for (Index m = 0; m < dim_; ++m)
            for (Index n = 0; n < dim_; ++n)
                if (es.group_of[m] != es.group_of[n] && es.bohr(m, n) > 0) positive.push_back(es.bohr(m, n));
        std::sort(positive.begin(), positive.end());

        // Single-linkage clustering of the positive gaps; representative = mean.
        std::vector<std::pair<double, double>> bounds;  // [lo, hi] per positive cluster
        std::vector<double> reps;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= positive.size(); ++i) {
            if (i == positive.size() || (i > start && positive[i] - positive[i - 1] > tol_)) {
                if (i > start) {
                    double sum = 0.0;
                    for (std::size_t k = start; k < i; ++k) sum += positive[k];
                    reps.push_back(sum / static_cast<double>(i - start));
                    bounds.emplace_back(positive[start], positive[i - 1]);
                }
                start = i;
            }
        }

        const std::size_t p = reps.size();
        freqs_.resize(2 * p + 1);
        for (std::size_t k = 0; k < p; ++k) {
            freqs_[p + 1 + k] = reps[k];
            freqs_[p - 1 - k] = -reps[k];
        }
        freqs_[p] = 0.0;

        index_.assign(static_cast<std::size_t>(dim_ * dim_), p);
        for (Index m = 0; m < dim_; ++m) {
            for (Index n = 0; n < dim_; ++n) {
                if (es.group_of[m] == es.group_of[n]) continue;
                const double w = std::abs(es.bohr(m, n));
                std::size_t k = 0;
                while (k < p && !(w >= bounds[k].first && w <= bounds[k].second)) ++k;
                if (k == p)
                    throw NumericalError("BohrFrequencyTable: gap not assigned to a cluster");
                index_[flat(m, n)] = es.bohr(m, n) > 0 ? p + 1 + k : p - 1 - k;
            }
        }
    }

    std::size_t size() const { return freqs_.size(); }
    const std::vector<double>& frequencies() const { return freqs_; }
    double frequency(std::size_t c) const { return freqs_.at(c); }
    std::size_t zero_cluster() const { return freqs_.size() / 2; }
    std::size_t mirror(std::size_t c) const { return freqs_.size() - 1 - c; }
    double tolerance() const { return tol_; }
    Index dim() const { return dim_; }

    /// Cluster containing omega_m - omega_n.
    std::size_t cluster(Index m, Index n) const { return index_[flat(m, n)]; }

    /// Cluster whose representative lies within tolerance of omega.
    std::optional<std::size_t> find(double omega) const {
        for (std::size_t c = 0; c < freqs_.size(); ++c)
            if (std::abs(freqs_[c] - omega) <= tol_) return c;
        return std::nullopt;
    }

private:
    std::size_t flat(Index m, Index n) const { return static_cast<std::size_t>(m * dim_ + n); }

    double tol_;
    Index dim_;
    std::vector<double> freqs_;
    std::vector<std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Density matrices

inline constexpr double density_hermiticity_tol = 1e-10;
inline constexpr double density_trace_tol = 1e-10;
inline constexpr double density_psd_tol = 1e-12;

inline double min_eigenvalue(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

class DensityMatrix {
public:
    /// |i><i| in a space of dimension dim.
    static DensityMatrix basis_state(Index i, Index dim) {
        if (dim < 1 || i < 0 || i >= dim)
            throw DimensionError("basis_state: index " + std::to_string(i) + " outside [0, " +
                                 std::to_string(dim) + ")");
        Matrix m = Matrix::Zero(dim, dim);
        m(i, i) = 1.0;
        return DensityMatrix(std::move(m));
    }

    /// Validates Hermiticity, unit trace and, for initial states, positivity.
    static DensityMatrix from_matrix(Matrix m, bool require_positive = true) {
        require_square(m, "density matrix");
        const double herm = hermiticity_error(m);
        if (herm > density_hermiticity_tol)
            throw NumericalError("density matrix: not Hermitian (max |rho - rho^dagger| = " +
                                 std::to_string(herm) + ")");
        const double tr_err = std::abs(m.trace() - 1.0);
        if (tr_err > density_trace_tol)
            throw NumericalError("density matrix: trace differs from 1 by " + std::to_string(tr_err));
        if (require_positive) {
            const double lo = min_eigenvalue(m);
            if (lo < -density_psd_tol)
                throw NumericalError("density matrix: negative eigenvalue " + std::to_string(lo));
        }
        return DensityMatrix(std::move(m));
    }

    Index dim() const { return rho_.rows(); }
    const Matrix& matrix() const { return rho_; }

private:
    explicit DensityMatrix(Matrix m) : rho_(std::move(m)) {}
    Matrix rho_;
};

// ---------------------------------------------------------------------------
// Vectorization and superoperators

inline Matrix site_projector(Index alpha, Index dim) {
    if (alpha < 0 || alpha >= dim)
        throw DimensionError("site_projector: site " + std::to_string(alpha) + " outside [0, " +
                             std::to_string(dim) + ")");
    Matrix s = Matrix::Zero(dim, dim);
    s(alpha, alpha) = 1.0;
    return s;
}

inline Vector vectorize(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix devectorize(const Vector& v, Index dim) {
    if (dim * dim != v.size())
        throw DimensionError("devectorize: vector of length " + std::to_string(v.size()) +
                             " is not " + std::to_string(dim) + "^2");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

inline Matrix devectorize(const Vector& v) {
    const auto dim = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    return devectorize(v, dim);
}

/// Superoperator for rho -> A rho
inline Matrix left_multiplication(const Matrix& a) {
    return Eigen::kroneckerProduct(Matrix::Identity(a.rows(), a.rows()), a);
}

/// Superoperator for rho -> rho B
inline Matrix right_multiplication(const Matrix& b) {
    return Eigen::kroneckerProduct(b.transpose(), Matrix::Identity(b.rows(), b.rows()));
}

/// Superoperator for rho -> A rho B
inline Matrix sandwich(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(b.transpose(), a);
}

/// Superoperator for rho -> -i [H, rho]
inline Matrix commutator_generator(const Matrix& h) {
    return cplx(0.0, -1.0) * (left_multiplication(h) - right_multiplication(h));
}

enum class Basis { site, eigen };

inline const char* to_string(Basis b) { return b == Basis::site ? "site" : "eigen"; }

/// Linear map on vectorized dim x dim matrices.
struct Superoperator {
    Matrix matrix;
    Basis basis = Basis::site;

    Index dim() const {
        return static_cast<Index>(std::llround(std::sqrt(static_cast<double>(matrix.rows()))));
    }

    Matrix apply(const Matrix& rho) const {
        if (rho.rows() != dim() || rho.cols() != dim())
            throw DimensionError("Superoperator::apply: operand dimension mismatch");
        return devectorize(matrix * vectorize(rho), dim());
    }
};

/// Re-express L in the basis defined by the unitary U: the result acts on
/// rho' = U^dagger rho U as rho' -> U^dagger L(U rho' U^dagger) U.
inline Superoperator transform_superoperator(const Superoperator& l, const Matrix& u, Basis result) {
    require_square(u, "transform_superoperator");
    if (u.rows() != l.dim() || l.matrix.rows() != l.matrix.cols())
        throw DimensionError("transform_superoperator: unitary is " + std::to_string(u.rows()) +
                             "x" + std::to_string(u.cols()) + ", superoperator acts on dim " +
                             std::to_string(l.dim()));
    const Matrix w = Eigen::kroneckerProduct(u.conjugate(), u);
    return {w.adjoint() * l.matrix * w, result};
}

/// max |vec(I)^dagger L| / max |L|; zero for trace-preserving generators.
inline double trace_preservation_error(const Superoperator& l) {
    const Vector id = vectorize(Matrix::Identity(l.dim(), l.dim()));
    const double scale = max_abs(l.matrix);
    if (scale == 0.0) return 0.0;
    return (id.adjoint() * l.matrix).cwiseAbs().maxCoeff() / scale;
}

/// Largest anti-Hermitian part of L(X) over the Hermitian basis
/// {E_ii, E_ij + E_ji, i(E_ij - E_ji)}; zero iff L preserves Hermiticity.
inline double hermiticity_preservation_error(const Superoperator& l) {
    const Index d = l.dim();
    double worst = 0.0;
    auto check = [&](const Matrix& x) { worst = std::max(worst, hermiticity_error(l.apply(x))); };
    for (Index i = 0; i < d; ++i) {
        for (Index j = i; j < d; ++j) {
            Matrix x = Matrix::Zero(d, d);
            x(i, j) = 1.0;
            x(j, i) = 1.0;
            check(x);
            if (i != j) {
                x(i, j) = cplx(0.0, 1.0);
                x(j, i) = cplx(0.0, -1.0);
                check(x);
            }
        }
    }
    return worst;
}

}  // namespace nsme
