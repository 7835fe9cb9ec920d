// Populations of the three-level model under the non-secular Lindblad
// equation, with the exact and the delta-function bath tensors side by side.

#include <cstdio>

#include "nsme/nsme.hpp"

int main() {
    using namespace nsme;
    const auto model = models::three_level();
    const auto eig = eigendecompose(model.hamiltonian());
    const BohrFrequencyTable table(eig);

    auto bath = model.bath;
    const auto l2 = build_lindblad(eig, build_spectral_tensor(table, bath), false);
    bath.variant = TensorVariant::gamma1;
    const auto l1 = build_lindblad(eig, build_spectral_tensor(table, bath), false);

    const auto rho0 = DensityMatrix::basis_state(model.initial_site, eig.dim());
    const auto times = uniform_grid(model.default_t_final_ps, 11);
    const auto a = propagate(l2, rho0, times);
    const auto c = propagate(l1, rho0, times);

    std::printf("%8s  %-30s  %-30s\n", "t/ps", "rho_11 rho_22 rho_33 (gamma2)", "rho_11 rho_22 rho_33 (gamma1)");
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::printf("%8.3f ", times[k]);
        for (const auto* tr : {&a, &c})
            for (Index i = 0; i < 3; ++i) std::printf(" %9.6f", tr->states[k](i, i).real());
        std::printf("\n");
    }
    std::printf("relaxation timescale: %.3f ps (gamma2), %.3f ps (gamma1)\n", relaxation_timescale(l2),
                relaxation_timescale(l1));
}
