#pragma once

// Independent numerical evaluation of the spectral correlation tensor.
//
// With a damping e^{-eps s} the time integral is elementary and
//     Gamma_eps(D) = int_0^inf dw J(w) [ (1+N(w)) L(D - w) + N(w) L(D + w) ],
//     L(x) = (eps + i x) / (eps^2 + x^2).
// Splitting 1+N = (coth+1)/2 and N = (coth-1)/2 separates the four
// contributions (dbar, fbar from the coth part; gammabar, kappabar from the
// rest). Gamma_eps is analytic in eps, so a Richardson table over a halving
// ladder of eps extrapolates to eps -> 0+.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nsme/bath.hpp"

namespace nsme {

struct OracleOptions {
    double first_damping = 0.1;  ///< eps_0 as a fraction of the cutoff
    int levels = 4;              ///< eps_k = eps_0 / 2^k, k < levels
    double quadrature_tol = 1e-10;
    double upper_limit_factor = 50.0;
    unsigned max_depth = 15;  // bisection is exponential in depth
};

struct OracleResult {
    Gamma2Terms terms;
    double extrapolation_error = 0.0;  ///< |last two Richardson diagonals| / |Gamma|
    double quadrature_error = 0.0;     ///< summed Gauss-Kronrod estimates, worst level

    cplx value() const { return terms.value(); }
};

namespace detail {

struct DampedTerms {
    std::array<double, 4> v{};  // dbar, fbar, gammabar, kappabar
    double error = 0.0;
};

inline DampedTerms damped_terms(double delta, double eps, const BathSpec& spec, const OracleOptions& opt) {
    using boost::math::quadrature::gauss_kronrod;
    const double kT = spec.kT();
    const double om = spec.cutoff();
    const double a = std::abs(delta);

    // J coth(w / 2kT) / 2 with its finite w -> 0 limit.
    auto half_coth_J = [&](double w) {
        if (w < 1e-10 * kT) return spec.eta() * kT / om;
        return 0.5 * drude_J(w, spec) / std::tanh(w / (2.0 * kT));
    };
    auto half_J = [&](double w) { return 0.5 * drude_J(w, spec); };
    auto lorentz_re = [&](double x) { return eps / (eps * eps + x * x); };
    auto lorentz_im = [&](double x) { return x / (eps * eps + x * x); };

    const std::array<std::function<double(double)>, 4> integrands = {
        [&](double w) { return half_coth_J(w) * (lorentz_re(delta - w) + lorentz_re(delta + w)); },
        [&](double w) { return half_coth_J(w) * (lorentz_im(delta - w) + lorentz_im(delta + w)); },
        [&](double w) { return half_J(w) * (lorentz_re(delta - w) - lorentz_re(delta + w)); },
        [&](double w) { return half_J(w) * (lorentz_im(delta + w) - lorentz_im(delta - w)); },
    };

    const double upper = opt.upper_limit_factor * std::max({om, kT, a});
    std::vector<double> cuts = {0.0, upper};
    for (double off : {-10.0 * eps, -eps, 0.0, eps, 10.0 * eps}) {
        const double x = a + off;
        if (x > 0.0 && x < upper) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    DampedTerms out;
    for (std::size_t t = 0; t < integrands.size(); ++t) {
        double total = 0.0;
        double l1_total = 0.0;
        double err_total = 0.0;
        auto integrate = [&](double lo, double hi) {
            double err = 0.0;
            double l1 = 0.0;
            total += gauss_kronrod<double, 61>::integrate(integrands[t], lo, hi, opt.max_depth,
                                                          opt.quadrature_tol, &err, &l1);
            err_total += err;
            l1_total += l1;
        };
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) integrate(cuts[k], cuts[k + 1]);
        integrate(upper, std::numeric_limits<double>::infinity());

        const double rel = l1_total > 0.0 ? err_total / l1_total : err_total;
        if (!std::isfinite(total) || rel > 1e-8)
            throw NumericalError("gamma_quadrature_oracle: quadrature did not converge at delta=" +
                                 std::to_string(delta) + ", eps=" + std::to_string(eps) +
                                 " (achieved relative error bound " + std::to_string(rel) + ")");
        out.v[t] = total;
        out.error = std::max(out.error, rel);
    }
    return out;
}

}  // namespace detail

/// Gamma(delta) by quadrature and eps -> 0+ extrapolation.
inline OracleResult gamma_quadrature_oracle(double delta, const BathSpec& spec, const OracleOptions& opt = {}) {
    if (!std::isfinite(delta)) throw std::domain_error("gamma_quadrature_oracle: non-finite frequency");
    if (opt.levels < 2) throw std::invalid_argument("gamma_quadrature_oracle: need at least two levels");

    const auto n = static_cast<std::size_t>(opt.levels);
    // table[i][j] per term
    std::vector<std::vector<std::array<double, 4>>> table(n, std::vector<std::array<double, 4>>(n));
    OracleResult result;
    double eps = opt.first_damping * spec.cutoff();
    for (std::size_t i = 0; i < n; ++i, eps *= 0.5) {
        const auto level = detail::damped_terms(delta, eps, spec, opt);
        result.quadrature_error = std::max(result.quadrature_error, level.error);
        table[i][0] = level.v;
        for (std::size_t j = 1; j <= i; ++j) {
            const double p = std::ldexp(1.0, static_cast<int>(j));
            for (std::size_t t = 0; t < 4; ++t)
                table[i][j][t] = (p * table[i][j - 1][t] - table[i - 1][j - 1][t]) / (p - 1.0);
        }
    }

    const auto& best = table[n - 1][n - 1];
    const auto& prev = table[n - 1][n - 2];
    result.terms = {best[0], best[1], best[3], best[2]};
    const Gamma2Terms prev_terms{prev[0], prev[1], prev[3], prev[2]};
    const double scale = std::abs(result.value());
    const double diff = std::abs(result.value() - prev_terms.value());
    result.extrapolation_error = scale > 0.0 ? diff / scale : diff;
    return result;
}

}  // namespace nsme
