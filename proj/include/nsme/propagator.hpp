#pragma once

// Time evolution under a fixed generator. The default route diagonalizes the
// Liouvillian, rho(t) = devec(V exp(Lambda t) V^-1 vec(rho0)); classical RK4
// is kept as a fallback for defective or ill-conditioned generators and as an
// independent check of the spectral route.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nsme/errors.hpp"
#include "nsme/operators.hpp"

namespace nsme {

struct Trajectory {
    std::vector<double> times;  ///< ps
    std::vector<Matrix> states;
    std::string descriptor;
    std::string method;
    double step = 0.0;  ///< RK4 step in ps, 0 for spectral propagation

    std::size_t size() const { return times.size(); }

    double max_trace_error() const {
        double e = 0.0;
        for (const auto& r : states) e = std::max(e, std::abs(r.trace() - 1.0));
        return e;
    }
    double max_hermiticity_error() const {
        double e = 0.0;
        for (const auto& r : states) e = std::max(e, hermiticity_error(r));
        return e;
    }
    double min_eigenvalue() const {
        double e = std::numeric_limits<double>::infinity();
        for (const auto& r : states) e = std::min(e, nsme::min_eigenvalue(r));
        return e;
    }
    /// max over samples and elements of |this - other|
    double max_difference(const Trajectory& other) const {
        if (other.size() != size()) throw DimensionError("Trajectory::max_difference: sample counts differ");
        double e = 0.0;
        for (std::size_t k = 0; k < size(); ++k) e = std::max(e, max_abs(states[k] - other.states[k]));
        return e;
    }
};

/// n uniform samples on [0, t_final], both ends included.
inline std::vector<double> uniform_grid(double t_final, std::size_t samples) {
    if (!(t_final > 0.0) || samples < 2) throw std::invalid_argument("uniform_grid: need t_final > 0 and >= 2 samples");
    std::vector<double> t(samples);
    for (std::size_t k = 0; k < samples; ++k)
        t[k] = t_final * static_cast<double>(k) / static_cast<double>(samples - 1);
    return t;
}

inline void require_ascending(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("time grid is empty");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0) throw std::invalid_argument("time grid: negative or non-finite time");
        if (k > 0 && times[k] <= times[k - 1]) throw std::invalid_argument("time grid must be strictly ascending");
    }
}

inline constexpr double max_eigenvector_condition = 1e8;

/// Eigendecomposition L = V diag(lambda) V^-1 of a Liouvillian.
class LiouvillianSpectrum {
public:
    explicit LiouvillianSpectrum(const Superoperator& l) : dim_(l.dim()) {
        Eigen::ComplexEigenSolver<Matrix> solver(l.matrix);
        if (solver.info() != Eigen::Success) throw NumericalError("Liouvillian eigensolver did not converge");
        values_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
        const auto sv = Eigen::JacobiSVD<Matrix>(vectors_).singularValues();
        condition_ = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
        lu_.compute(vectors_);
    }

    const Vector& eigenvalues() const { return values_; }
    const Matrix& eigenvectors() const { return vectors_; }
    double condition() const { return condition_; }

    /// Expansion coefficients of rho in the eigenvector basis.
    Vector coefficients(const Matrix& rho) const { return lu_.solve(vectorize(rho)); }

    Matrix evolve(const Vector& coeffs, double t) const {
        const Vector phased = ((values_ * t).array().exp() * coeffs.array()).matrix();
        return devectorize(vectors_ * phased, dim_);
    }

private:
    Index dim_;
    Vector values_;
    Matrix vectors_;
    Eigen::PartialPivLU<Matrix> lu_;
    double condition_ = 0.0;
};

/// Spectral propagation on the given grid. Throws FallbackRequired when the
/// eigenvector matrix has condition number >= 1e8.
inline Trajectory propagate_exact(const Superoperator& l, const DensityMatrix& rho0, const std::vector<double>& times) {
    require_ascending(times);
    if (rho0.dim() != l.dim()) throw DimensionError("propagate_exact: state and generator dimensions differ");
    const LiouvillianSpectrum spec(l);
    if (!(spec.condition() < max_eigenvector_condition))
        throw FallbackRequired("propagate_exact: eigenvector condition number " + std::to_string(spec.condition()),
                               spec.condition());
    const Vector c = spec.coefficients(rho0.matrix());
    Trajectory tr;
    tr.method = "spectral";
    tr.times = times;
    tr.states.reserve(times.size());
    for (double t : times) tr.states.push_back(t == 0.0 ? rho0.matrix() : spec.evolve(c, t));
    return tr;
}

inline constexpr double rk4_trace_drift_limit = 1e-6;

/// Fixed-step RK4 reporting at the grid points; each interval is split into
/// the fewest equal steps no longer than max_step.
inline Trajectory propagate_rk4_on_grid(const Superoperator& l, const DensityMatrix& rho0,
                                        const std::vector<double>& times, double max_step) {
    require_ascending(times);
    if (!(max_step > 0.0)) throw std::invalid_argument("propagate_rk4: step must be > 0");
    if (rho0.dim() != l.dim()) throw DimensionError("propagate_rk4: state and generator dimensions differ");
    const Index d = l.dim();
    const Matrix& a = l.matrix;

    Trajectory tr;
    tr.method = "rk4";
    tr.step = max_step;
    tr.times = times;
    Vector v = vectorize(rho0.matrix());
    double t = 0.0;
    for (double target : times) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / max_step - 1e-9));
            const double h = span / static_cast<double>(steps);
            for (long k = 0; k < steps; ++k) {
                const Vector k1 = a * v;
                const Vector k2 = a * (v + 0.5 * h * k1);
                const Vector k3 = a * (v + 0.5 * h * k2);
                const Vector k4 = a * (v + h * k3);
                v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t = target;
        }
        Matrix rho = devectorize(v, d);
        const double drift = std::abs(rho.trace() - 1.0);
        if (!(drift <= rk4_trace_drift_limit))
            throw NumericalError("propagate_rk4: trace drift " + std::to_string(drift) + " at t=" +
                                 std::to_string(target) + " ps with step " + std::to_string(max_step) +
                                 " ps; reduce the step (|L|_max * dt = " +
                                 std::to_string(max_abs(a) * max_step) + ")");
        tr.states.push_back(std::move(rho));
    }
    return tr;
}

/// RK4 with step dt, recording every step from 0 to t_final.
inline Trajectory propagate_rk4(const Superoperator& l, const DensityMatrix& rho0, double t_final, double dt) {
    if (!(dt > 0.0) || !(t_final > 0.0)) throw std::invalid_argument("propagate_rk4: need dt > 0 and t_final > 0");
    const auto steps = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
    auto tr = propagate_rk4_on_grid(l, rho0, uniform_grid(t_final, steps + 1), t_final / static_cast<double>(steps));
    return tr;
}

/// Recommended RK4 step: dt * |L|_max = 0.1.
inline double recommended_rk4_step(const Superoperator& l) {
    const double n = max_abs(l.matrix);
    return n > 0.0 ? 0.1 / n : std::numeric_limits<double>::infinity();
}

/// Spectral propagation, rerouted to RK4 if the spectral route is refused.
inline Trajectory propagate(const Superoperator& l, const DensityMatrix& rho0, const std::vector<double>& times) {
    try {
        return propagate_exact(l, rho0, times);
    } catch (const FallbackRequired&) {
        double step = recommended_rk4_step(l);
        if (!std::isfinite(step)) step = times.back() > 0.0 ? times.back() : 1.0;
        return propagate_rk4_on_grid(l, rho0, times, step);
    }
}

// ---------------------------------------------------------------------------

struct StationaryState {
    std::size_t null_dimension = 0;
    std::optional<Matrix> state;  ///< present iff the null space is one-dimensional
    double residual = 0.0;        ///< max |L vec(rho_ss)| / max |L|
};

/// Null vector of L as a unit-trace Hermitian density matrix.
inline StationaryState stationary_state(const Superoperator& l) {
    const Eigen::JacobiSVD<Matrix> svd(l.matrix, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-9 * sv(0);
    StationaryState out;
    for (Index k = 0; k < sv.size(); ++k)
        if (sv(k) <= tol) ++out.null_dimension;
    if (sv(0) == 0.0) out.null_dimension = static_cast<std::size_t>(sv.size());
    if (out.null_dimension != 1) return out;

    Matrix rho = devectorize(svd.matrixV().col(sv.size() - 1), l.dim());
    rho /= rho.trace();
    rho = 0.5 * (rho + rho.adjoint());
    const double scale = max_abs(l.matrix);
    out.residual = (l.matrix * vectorize(rho)).cwiseAbs().maxCoeff() / scale;
    out.state = std::move(rho);
    return out;
}

struct SpectralSummary {
    Vector eigenvalues;
    double gap = 0.0;  ///< min |Re lambda| over decaying modes; 0 if none
    std::optional<Matrix> stationary;
};

inline double decay_threshold(const Superoperator& l) { return 1e-9 * max_abs(l.matrix); }

inline SpectralSummary spectral_summary(const Superoperator& l) {
    Eigen::ComplexEigenSolver<Matrix> solver(l.matrix, false);
    if (solver.info() != Eigen::Success) throw NumericalError("Liouvillian eigensolver did not converge");
    SpectralSummary s;
    s.eigenvalues = solver.eigenvalues();
    const double thr = decay_threshold(l);
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& lam : s.eigenvalues)
        if (lam.real() < -thr) gap = std::min(gap, -lam.real());
    s.gap = std::isfinite(gap) ? gap : 0.0;
    s.stationary = stationary_state(l).state;
    return s;
}

/// 1 / (slowest decay rate), in ps when L is in rad/ps.
inline double relaxation_timescale(const Superoperator& l) {
    Eigen::ComplexEigenSolver<Matrix> solver(l.matrix, false);
    if (solver.info() != Eigen::Success) throw NumericalError("Liouvillian eigensolver did not converge");
    const double thr = decay_threshold(l);
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& lam : solver.eigenvalues())
        if (lam.real() < -thr) gap = std::min(gap, -lam.real());
    if (!std::isfinite(gap)) throw NumericalError("relaxation_timescale: generator has no decaying mode");
    return 1.0 / gap;
}

}  // namespace nsme
