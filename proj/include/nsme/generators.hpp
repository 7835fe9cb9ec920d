#pragma once

// Master-equation generators built from an eigensystem and a spectral tensor.
//
// Lindblad form (non-secular):
//     d rho/dt = -i [H_s + H_ls, rho]
//                + sum_a sum_{w,w'} chi_a(w,w') ( F_a(w') rho F_a(w)^dag
//                                                 - 1/2 { F_a(w)^dag F_a(w'), rho } )
//     H_ls = i/2 sum_a sum_{w,w'} Theta_a(w,w') F_a(w)^dag F_a(w')
// with chi(w,w') = Gamma*(w) + Gamma(w') and Theta(w,w') = Gamma*(w) - Gamma(w').
// The secular form keeps only w' = w.
//
// Redfield form, eigenbasis elements:
//     d rho_{s's}/dt = -i w_{s's} rho_{s's} - sum_{mn} R_{s's,mn} rho_{mn}
//
// Both non-secular forms are exact rewrites of the same Born-Markov equation,
// so their superoperators must coincide; the tests rely on that.

#include <cstddef>
#include <string>
#include <vector>

#include "nsme/bath.hpp"
#include "nsme/operators.hpp"

namespace nsme {

/// F_a(w) = sum over level pairs with w_m - w_n in cluster w of
/// Pi(w_n) S_a Pi(w_m), for every site projector S_a. Stored in the site basis.
struct JumpOperatorSet {
    std::vector<std::vector<Matrix>> ops;  ///< [site][cluster]
    std::vector<double> frequencies;       ///< cluster representatives

    std::size_t sites() const { return ops.size(); }
    std::size_t clusters() const { return frequencies.size(); }
    const Matrix& at(std::size_t alpha, std::size_t c) const { return ops.at(alpha).at(c); }
};

inline JumpOperatorSet build_jump_operators(const EigenSystem& eig, const BohrFrequencyTable& table) {
    const Index d = eig.dim();
    JumpOperatorSet set;
    set.frequencies = table.frequencies();
    set.ops.resize(static_cast<std::size_t>(d));
    for (Index alpha = 0; alpha < d; ++alpha) {
        const Matrix s_eig = eig.to_eigen(site_projector(alpha, d));
        std::vector<Matrix> per_cluster(table.size(), Matrix::Zero(d, d));
        // Element (n, m) of S in the eigenbasis oscillates at w_m - w_n.
        for (Index n = 0; n < d; ++n)
            for (Index m = 0; m < d; ++m) per_cluster[table.cluster(m, n)](n, m) = s_eig(n, m);
        for (auto& f : per_cluster) f = eig.to_site(f);
        set.ops[static_cast<std::size_t>(alpha)] = std::move(per_cluster);
    }
    return set;
}

/// chi_a(w,w') and Theta_a(w,w') per site; each is clusters x clusters,
/// row index w, column index w'.
struct CoefficientTables {
    std::vector<Matrix> chi;
    std::vector<Matrix> theta;

    std::size_t sites() const { return chi.size(); }
};

inline CoefficientTables build_coefficients(const SpectralTensor& tensor, std::size_t clusters) {
    if (tensor.clusters() < clusters)
        throw ConfigError("spectral_tensor", "covers " + std::to_string(tensor.clusters()) +
                                                 " frequencies, " + std::to_string(clusters) + " required");
    CoefficientTables t;
    const auto c_count = static_cast<Index>(clusters);
    for (std::size_t a = 0; a < tensor.sites(); ++a) {
        Matrix chi(c_count, c_count);
        Matrix theta(c_count, c_count);
        for (Index w = 0; w < c_count; ++w) {
            const cplx gw = tensor.value(a, static_cast<std::size_t>(w));
            for (Index wp = 0; wp < c_count; ++wp) {
                const cplx gwp = tensor.value(a, static_cast<std::size_t>(wp));
                chi(w, wp) = std::conj(gw) + gwp;
                theta(w, wp) = std::conj(gw) - gwp;
            }
        }
        t.chi.push_back(std::move(chi));
        t.theta.push_back(std::move(theta));
    }
    return t;
}

namespace detail {

// sum_{w'} coeff(w, w') F(w'), or coeff(w, w) F(w) in secular mode.
inline Matrix weighted_jump(const std::vector<Matrix>& f, const Matrix& coeff, std::size_t w, bool secular) {
    const auto wi = static_cast<Index>(w);
    if (secular) return coeff(wi, wi) * f[w];
    Matrix g = Matrix::Zero(f[w].rows(), f[w].cols());
    for (std::size_t wp = 0; wp < f.size(); ++wp) {
        const cplx c = coeff(wi, static_cast<Index>(wp));
        if (c != cplx(0.0)) g += c * f[wp];
    }
    return g;
}

inline void require_matching(const JumpOperatorSet& f, const CoefficientTables& k) {
    if (f.sites() != k.sites())
        throw DimensionError("generator: jump operators and coefficients disagree on site count");
    for (const auto& m : k.chi)
        if (static_cast<std::size_t>(m.rows()) != f.clusters())
            throw DimensionError("generator: coefficient table size differs from cluster count");
}

}  // namespace detail

inline constexpr double lamb_shift_hermiticity_tol = 1e-10;

/// Lamb-shift Hamiltonian. Hermiticity is checked, not imposed.
inline Matrix build_lamb_shift(const JumpOperatorSet& f, const CoefficientTables& coeffs, bool secular) {
    detail::require_matching(f, coeffs);
    const Index d = f.sites() == 0 ? 0 : f.at(0, 0).rows();
    Matrix h = Matrix::Zero(d, d);
    for (std::size_t a = 0; a < f.sites(); ++a)
        for (std::size_t w = 0; w < f.clusters(); ++w)
            h += f.at(a, w).adjoint() * detail::weighted_jump(f.ops[a], coeffs.theta[a], w, secular);
    h *= cplx(0.0, 0.5);
    const double err = hermiticity_error(h);
    if (err > lamb_shift_hermiticity_tol * std::max(1.0, max_abs(h)))
        throw NumericalError("build_lamb_shift: result not Hermitian (error " + std::to_string(err) +
                             "); coefficient tables are inconsistent");
    return h;
}

/// Lindblad generator from explicit parts; h_system in the site basis.
inline Superoperator assemble_lindblad(const Matrix& h_system, const JumpOperatorSet& f,
                                       const CoefficientTables& coeffs, bool secular) {
    detail::require_matching(f, coeffs);
    const Index d = h_system.rows();
    const Matrix h_ls = build_lamb_shift(f, coeffs, secular);

    Matrix l = commutator_generator(h_system + h_ls);
    Matrix anti = Matrix::Zero(d, d);
    for (std::size_t a = 0; a < f.sites(); ++a) {
        for (std::size_t w = 0; w < f.clusters(); ++w) {
            const Matrix& fw = f.at(a, w);
            if (fw.isZero(0.0)) continue;
            const Matrix g = detail::weighted_jump(f.ops[a], coeffs.chi[a], w, secular);
            l += Eigen::kroneckerProduct(fw.conjugate(), g);  // g rho F(w)^dag
            anti += fw.adjoint() * g;
        }
    }
    l -= 0.5 * (left_multiplication(anti) + right_multiplication(anti));
    return {std::move(l), Basis::site};
}

inline void require_tensor_covers(const SpectralTensor& tensor, const BohrFrequencyTable& table) {
    if (tensor.clusters() != table.size())
        throw ConfigError("spectral_tensor", "built for " + std::to_string(tensor.clusters()) +
                                                 " frequencies, system has " + std::to_string(table.size()));
}

/// Lindblad generator in the site basis.
inline Superoperator build_lindblad(const EigenSystem& eig, const SpectralTensor& tensor, bool secular) {
    const BohrFrequencyTable table(eig);
    require_tensor_covers(tensor, table);
    const auto f = build_jump_operators(eig, table);
    const auto coeffs = build_coefficients(tensor, table.size());
    const Matrix h = eig.to_site(eig.energies.cast<cplx>().asDiagonal());
    return assemble_lindblad(h, f, coeffs, secular);
}

// ---------------------------------------------------------------------------

/// R_{s's,mn} in the eigenbasis.
class RedfieldTensor {
public:
    explicit RedfieldTensor(Index dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim * dim)) {}

    Index dim() const { return dim_; }
    cplx& operator()(Index sp, Index s, Index m, Index n) { return data_[flat(sp, s, m, n)]; }
    cplx operator()(Index sp, Index s, Index m, Index n) const { return data_[flat(sp, s, m, n)]; }

    double max_abs() const {
        double r = 0.0;
        for (const auto& x : data_) r = std::max(r, std::abs(x));
        return r;
    }

private:
    std::size_t flat(Index sp, Index s, Index m, Index n) const {
        return static_cast<std::size_t>(((sp * dim_ + s) * dim_ + m) * dim_ + n);
    }

    Index dim_;
    std::vector<cplx> data_;
};

/// Non-secular or secular Redfield tensor. With G(x, y) = Gamma(w_x - w_y)
/// and S the site projector in the eigenbasis,
///   R_{s's,mn} = sum_a [ delta_{sn} sum_k S_{s'k} S_{km} G(m,k)
///                        - S_{ns} S_{s'm} G(m,s')
///                        - S_{s'm} S_{ns} G*(n,s)
///                        + delta_{s'm} sum_k S_{ks} S_{nk} G*(n,k) ].
/// Secular mode drops entries with |w_{s's} - w_{mn}| above the degeneracy
/// tolerance.
inline RedfieldTensor build_redfield(const EigenSystem& eig, const SpectralTensor& tensor, bool secular) {
    const BohrFrequencyTable table(eig);
    require_tensor_covers(tensor, table);
    const Index d = eig.dim();
    RedfieldTensor r(d);

    for (Index alpha = 0; alpha < d; ++alpha) {
        const auto a = static_cast<std::size_t>(alpha);
        const Matrix s = eig.to_eigen(site_projector(alpha, d));
        Matrix g(d, d);
        for (Index x = 0; x < d; ++x)
            for (Index y = 0; y < d; ++y) g(x, y) = tensor.value(a, table.cluster(x, y));

        // Contracted terms: left(s', m) and right(n, s).
        Matrix left = Matrix::Zero(d, d);
        Matrix right = Matrix::Zero(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j)
                for (Index k = 0; k < d; ++k) {
                    left(i, j) += s(i, k) * s(k, j) * g(j, k);
                    right(i, j) += s(k, j) * s(i, k) * std::conj(g(i, k));
                }

        for (Index sp = 0; sp < d; ++sp)
            for (Index ss = 0; ss < d; ++ss)
                for (Index m = 0; m < d; ++m)
                    for (Index n = 0; n < d; ++n) {
                        cplx v = -s(n, ss) * s(sp, m) * (g(m, sp) + std::conj(g(n, ss)));
                        if (ss == n) v += left(sp, m);
                        if (sp == m) v += right(n, ss);
                        r(sp, ss, m, n) += v;
                    }
    }

    if (secular) {
        for (Index sp = 0; sp < d; ++sp)
            for (Index ss = 0; ss < d; ++ss)
                for (Index m = 0; m < d; ++m)
                    for (Index n = 0; n < d; ++n)
                        if (std::abs(eig.bohr(sp, ss) - eig.bohr(m, n)) > eig.tolerance)
                            r(sp, ss, m, n) = 0.0;
    }
    return r;
}

/// Eigenbasis superoperator of the Redfield equation, coherent part included.
inline Superoperator redfield_to_superoperator(const RedfieldTensor& r, const EigenSystem& eig) {
    const Index d = eig.dim();
    if (r.dim() != d) throw DimensionError("redfield_to_superoperator: tensor and eigensystem differ in dimension");
    Matrix l = Matrix::Zero(d * d, d * d);
    for (Index sp = 0; sp < d; ++sp)
        for (Index ss = 0; ss < d; ++ss) {
            const Index row = sp + d * ss;
            l(row, row) += cplx(0.0, -eig.bohr(sp, ss));
            for (Index m = 0; m < d; ++m)
                for (Index n = 0; n < d; ++n) l(row, m + d * n) -= r(sp, ss, m, n);
        }
    return {std::move(l), Basis::eigen};
}

// ---------------------------------------------------------------------------

enum class Form { lindblad, redfield };

inline const char* to_string(Form f) { return f == Form::lindblad ? "lindblad" : "redfield"; }

struct GeneratorKind {
    Form form = Form::lindblad;
    bool secular = false;
    TensorVariant variant = TensorVariant::gamma2;

    std::string describe() const {
        return std::string(secular ? "secular" : "non-secular") + " " + to_string(form) + " " +
               to_string(variant);
    }
};

/// Site-basis generator of the requested form.
inline Superoperator build_generator(const EigenSystem& eig, const SpectralTensor& tensor, Form form, bool secular) {
    if (form == Form::lindblad) return build_lindblad(eig, tensor, secular);
    const auto l = redfield_to_superoperator(build_redfield(eig, tensor, secular), eig);
    return transform_superoperator(l, eig.vectors.adjoint(), Basis::site);
}

}  // namespace nsme
