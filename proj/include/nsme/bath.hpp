#pragma once

// Drude bath and the spectral correlation tensor
//     Gamma(w) = int_0^inf ds e^{i w s} W(s),   W(s) = nu(s) - i mu(s),
// in two flavours:
//   gamma1 - the delta-function (real) approximation, pi J(|w|) x occupation;
//   gamma2 - the complex closed form D + i f - i kappa + gammabar, where
//            D, f come from the symmetrized correlation nu (with a truncated
//            Matsubara sum) and kappa, gammabar from the response mu.
//
// All frequencies are rad/ps. Each site couples to an identical, independent
// bath, so the tensor is diagonal in the site index.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nsme/errors.hpp"
#include "nsme/operators.hpp"
#include "nsme/units.hpp"

namespace nsme {

enum class TensorVariant { gamma1, gamma2 };

inline const char* to_string(TensorVariant v) { return v == TensorVariant::gamma1 ? "gamma1" : "gamma2"; }

/// Drude bath parameters in user units. eta and the cutoff are wavenumbers;
/// J(w) carries the units of eta.
struct BathSpec {
    double eta_cm = 0.125;
    double cutoff_cm = 100.0;
    double temperature_K = 300.0;
    int matsubara_N = 100;
    TensorVariant variant = TensorVariant::gamma2;

    double eta() const { return units::to_angular(eta_cm); }
    double cutoff() const { return units::to_angular(cutoff_cm); }
    double kT() const { return units::thermal_energy(temperature_K); }

    /// eta = 0 is accepted and describes a closed system.
    void validate() const {
        if (!(eta_cm >= 0.0) || !std::isfinite(eta_cm)) throw ConfigError("bath.eta", "must be >= 0");
        if (!(cutoff_cm > 0.0) || !std::isfinite(cutoff_cm))
            throw ConfigError("bath.cutoff_cm", "must be > 0");
        if (!(temperature_K > 0.0) || !std::isfinite(temperature_K))
            throw ConfigError("bath.temperature_K", "must be > 0");
        if (matsubara_N < 1) throw ConfigError("bath.matsubara_N", "must be >= 1");
    }
};

inline constexpr double pi = std::numbers::pi;

/// J(w) = eta Omega w / (w^2 + Omega^2), w >= 0.
inline double drude_J(double w, const BathSpec& spec) {
    if (w < 0.0) throw std::domain_error("drude_J: frequency must be >= 0");
    const double om = spec.cutoff();
    return spec.eta() * om * w / (w * w + om * om);
}

/// Bose-Einstein occupation 1 / (e^{w/kT} - 1).
inline double bose_N(double w, double kT) {
    if (w == 0.0) throw std::domain_error("bose_N: occupation diverges at w = 0");
    return 1.0 / std::expm1(w / kT);
}

/// Delta-function approximation of Gamma: pi J(w)(1 + N(w)) for w > 0,
/// pi J(-w) N(-w) for w < 0, and the limit pi eta kT / Omega at w = 0.
inline double gamma1(double delta, const BathSpec& spec) {
    if (delta > 0.0) return pi * drude_J(delta, spec) * (1.0 + bose_N(delta, spec.kT()));
    if (delta < 0.0) return pi * drude_J(-delta, spec) * bose_N(-delta, spec.kT());
    return pi * spec.eta() * spec.kT() / spec.cutoff();
}

/// j-th bosonic Matsubara frequency 2 pi j kT.
inline double matsubara_freq(int j, const BathSpec& spec) {
    if (j < 1) throw std::domain_error("matsubara_freq: j must be >= 1");
    return 2.0 * pi * j * spec.kT();
}

inline constexpr double resonance_tolerance = 1e-6;

/// k such that the cutoff coincides with the k-th Matsubara frequency.
inline std::optional<int> is_resonant(const BathSpec& spec) {
    const double base = matsubara_freq(1, spec);
    const double k = std::round(spec.cutoff() / base);
    if (k < 1.0) return std::nullopt;
    if (std::abs(k * base - spec.cutoff()) / spec.cutoff() < resonance_tolerance)
        return static_cast<int>(k);
    return std::nullopt;
}

namespace detail {

inline double cot(double x) { return std::cos(x) / std::sin(x); }

// sum_{j=1..N, j != skip} term(j, wj)
template <typename F>
double matsubara_sum(const BathSpec& spec, std::optional<int> skip, F&& term) {
    const double base = matsubara_freq(1, spec);
    double sum = 0.0;
    for (int j = 1; j <= spec.matsubara_N; ++j) {
        if (skip && *skip == j) continue;
        sum += term(j, base * j);
    }
    return sum;
}

}  // namespace detail

/// int_0^inf nu(t) cos(w t) dt
inline double dbar(double w, const BathSpec& spec) {
    const double kT = spec.kT();
    if (w != 0.0) {
        const double a = std::abs(w);
        return 0.5 * pi * drude_J(a, spec) / std::tanh(a / (2.0 * kT));
    }
    const double eta = spec.eta();
    const double om = spec.cutoff();
    const auto k = is_resonant(spec);
    const double sum = detail::matsubara_sum(spec, k, [&](int, double wj) {
        return 2.0 * pi * eta * om * kT / (wj * wj - om * om);
    });
    if (k) return -kT * eta * pi / (2.0 * om) + sum;
    return 0.5 * pi * eta * detail::cot(om / (2.0 * kT)) + sum;
}

/// int_0^inf nu(t) sin(w t) dt
inline double fbar(double w, const BathSpec& spec) {
    const double kT = spec.kT();
    const double eta = spec.eta();
    const double om = spec.cutoff();
    const auto k = is_resonant(spec);
    const double sum = detail::matsubara_sum(spec, k, [&](int j, double wj) {
        return eta * om * wj * wj * w / (j * (wj * wj - om * om) * (wj * wj + w * w));
    });
    if (k) {
        const double d = w * w + om * om;
        return 0.5 * eta * pi * kT * (w * w * w - 3.0 * w * om * om) / (d * d) + sum;
    }
    return pi * eta * om * w / (2.0 * (om * om + w * w)) * detail::cot(om / (2.0 * kT)) + sum;
}

/// int_0^inf mu(t) cos(w t) dt
inline double kappabar(double w, const BathSpec& spec) {
    const double om = spec.cutoff();
    return spec.eta() * pi * om * om / (2.0 * (om * om + w * w));
}

/// int_0^inf mu(t) sin(w t) dt
inline double gammabar(double w, const BathSpec& spec) {
    if (w == 0.0) return 0.0;
    const double half = 0.5 * pi * drude_J(std::abs(w), spec);
    return w > 0.0 ? half : -half;
}

/// The four contributions to the complex tensor.
struct Gamma2Terms {
    double dbar = 0.0;
    double fbar = 0.0;
    double kappabar = 0.0;
    double gammabar = 0.0;

    cplx value() const { return {dbar + gammabar, fbar - kappabar}; }
};

inline Gamma2Terms gamma2_terms(double delta, const BathSpec& spec) {
    return {dbar(delta, spec), fbar(delta, spec), kappabar(delta, spec), gammabar(delta, spec)};
}

inline cplx gamma2(double delta, const BathSpec& spec) { return gamma2_terms(delta, spec).value(); }

/// Gamma(delta) for the variant selected in spec.
inline cplx spectral_value(double delta, const BathSpec& spec) {
    return spec.variant == TensorVariant::gamma1 ? cplx(gamma1(delta, spec), 0.0) : gamma2(delta, spec);
}

// ---------------------------------------------------------------------------

/// Gamma_{alpha alpha}(omega_c) for every site and Bohr-frequency cluster.
/// Off-diagonal site entries are identically zero.
class SpectralTensor {
public:
    SpectralTensor(std::size_t sites, std::vector<double> frequencies, std::vector<cplx> values,
                   TensorVariant variant)
        : sites_(sites), freqs_(std::move(frequencies)), values_(std::move(values)), variant_(variant) {
        if (values_.size() != freqs_.size())
            throw DimensionError("SpectralTensor: one value per frequency required");
    }

    std::size_t sites() const { return sites_; }
    std::size_t clusters() const { return freqs_.size(); }
    const std::vector<double>& frequencies() const { return freqs_; }
    TensorVariant variant() const { return variant_; }

    cplx value(std::size_t alpha, std::size_t beta, std::size_t c) const {
        check(alpha, c);
        check(beta, c);
        return alpha == beta ? values_[c] : cplx(0.0);
    }
    cplx value(std::size_t alpha, std::size_t c) const { return value(alpha, alpha, c); }

    /// gamma = 2 Re Gamma
    double rate(std::size_t alpha, std::size_t c) const { return 2.0 * value(alpha, c).real(); }
    /// T = Im Gamma
    double shift(std::size_t alpha, std::size_t c) const { return value(alpha, c).imag(); }

    SpectralTensor scaled(double factor) const {
        auto v = values_;
        for (auto& x : v) x *= factor;
        return {sites_, freqs_, std::move(v), variant_};
    }

private:
    void check(std::size_t alpha, std::size_t c) const {
        if (alpha >= sites_) throw DimensionError("SpectralTensor: site index out of range");
        if (c >= freqs_.size())
            throw ConfigError("spectral_tensor", "no value for frequency cluster " + std::to_string(c));
    }

    std::size_t sites_;
    std::vector<double> freqs_;
    std::vector<cplx> values_;
    TensorVariant variant_;
};

inline SpectralTensor build_spectral_tensor(const BohrFrequencyTable& table, const BathSpec& spec) {
    std::vector<cplx> values;
    values.reserve(table.size());
    for (double w : table.frequencies()) values.push_back(spectral_value(w, spec));
    return {static_cast<std::size_t>(table.dim()), table.frequencies(), std::move(values), spec.variant};
}

// ---------------------------------------------------------------------------

struct MatsubaraConvergence {
    double max_change_dbar = 0.0;  ///< max relative change over the grid, N -> 2N
    double max_change_fbar = 0.0;
    double worst_dbar_at = 0.0;    ///< grid point of the largest change (rad/ps)
    double worst_fbar_at = 0.0;
    int n_from = 0;
    int n_to = 0;

    double max_change() const { return std::max(max_change_dbar, max_change_fbar); }
    bool converged(double threshold = 1e-10) const { return max_change() <= threshold; }
};

namespace detail {
inline double relative_change(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}
}  // namespace detail

/// Relative change of dbar and fbar on the grid when N is doubled.
inline MatsubaraConvergence matsubara_convergence(const BathSpec& spec, const std::vector<double>& grid) {
    BathSpec doubled = spec;
    doubled.matsubara_N = 2 * spec.matsubara_N;
    MatsubaraConvergence r;
    r.n_from = spec.matsubara_N;
    r.n_to = doubled.matsubara_N;
    for (double w : grid) {
        const double cd = detail::relative_change(dbar(w, spec), dbar(w, doubled));
        const double cf = detail::relative_change(fbar(w, spec), fbar(w, doubled));
        if (cd > r.max_change_dbar) { r.max_change_dbar = cd; r.worst_dbar_at = w; }
        if (cf > r.max_change_fbar) { r.max_change_fbar = cf; r.worst_fbar_at = w; }
    }
    return r;
}

/// 25 points on [-3 Omega, 3 Omega] spaced Omega/4; the midpoint, which
/// would sit at zero, is moved to Omega/50 so that |w| >= Omega/100 holds.
inline std::vector<double> standard_frequency_grid(const BathSpec& spec) {
    const double om = spec.cutoff();
    std::vector<double> grid;
    for (int k = 0; k < 25; ++k) grid.push_back(k == 12 ? om / 50.0 : -3.0 * om + 0.25 * om * k);
    return grid;
}

}  // namespace nsme
