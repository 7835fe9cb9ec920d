#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace nsme;

namespace {

// Reference values below were computed in 30-digit arithmetic for the
// three-level bath (eta 0.125, cutoff 100 cm^-1, 300 K) and are in cm^-1.
constexpr double cm = units::angular_per_wavenumber;

BathSpec three_level_bath() { return models::three_level().bath; }

double om(const BathSpec& s) { return s.cutoff(); }

}  // namespace

TEST(Bath, DrudeSpectralDensity) {
    const auto b = three_level_bath();
    EXPECT_NEAR(drude_J(om(b), b), 0.5 * b.eta(), 1e-15);
    EXPECT_EQ(drude_J(0.0, b), 0.0);
    EXPECT_THROW(drude_J(-1.0, b), std::domain_error);
}

TEST(Bath, BoseOccupation) {
    const auto b = three_level_bath();
    EXPECT_NEAR(bose_N(b.kT(), b.kT()), 0.581976706869326, 1e-14);
    EXPECT_THROW(bose_N(0.0, b.kT()), std::domain_error);
    // detailed balance: 1 + N(w) = e^{w/kT} N(w)
    const double w = 0.7 * b.kT();
    EXPECT_NEAR(1.0 + bose_N(w, b.kT()), std::exp(w / b.kT()) * bose_N(w, b.kT()), 1e-13);
}

TEST(Bath, Gamma1FrozenValues) {
    const auto b = three_level_bath();
    EXPECT_NEAR(gamma1(om(b), b), 0.515401454107923 * cm, 1e-13);
    EXPECT_NEAR(gamma1(-om(b), b), 0.319051913258561 * cm, 1e-13);
    EXPECT_NEAR(gamma1(0.0, b), 0.818818583698675 * cm, 1e-13);
    // Detailed balance between the two branches.
    EXPECT_NEAR(gamma1(om(b), b) / gamma1(-om(b), b), std::exp(om(b) / b.kT()), 1e-12);
}

TEST(Bath, Gamma1ZeroLimitIsContinuous) {
    const auto b = three_level_bath();
    const double g0 = gamma1(0.0, b);
    EXPECT_NEAR(gamma1(1e-6 * om(b), b), g0, 1e-5 * g0);
    EXPECT_NEAR(gamma1(-1e-6 * om(b), b), g0, 1e-5 * g0);
}

TEST(Bath, Gamma2FrozenValues) {
    const auto b = three_level_bath();
    EXPECT_NEAR(dbar(0.0, b), 0.818723647294505 * cm, 1e-13);
    EXPECT_NEAR(fbar(om(b), b), 0.402407148498368 * cm, 1e-13);
    EXPECT_NEAR(kappabar(om(b), b), 0.0981747704246810 * cm, 1e-14);
    // Independent principal-value integral for Im Gamma(Omega); the only
    // difference is the Matsubara truncation at N = 100.
    EXPECT_NEAR(gamma2(om(b), b).imag(), 0.304232414125059 * cm, 2e-5 * cm);
}

TEST(Bath, RealPartOfGamma2IsGamma1AwayFromZero) {
    for (const auto& b : {models::three_level().bath, models::pe545().bath}) {
        for (double w : standard_frequency_grid(b)) {
            const double g1 = gamma1(w, b);
            EXPECT_LE(std::abs(gamma2(w, b).real() - g1), 1e-12 * std::max(1.0, std::abs(g1))) << w;
        }
    }
}

TEST(Bath, DbarAtZeroConvergesToGamma1Limit) {
    auto b = three_level_bath();
    b.matsubara_N = 1000000;
    const double g0 = gamma1(0.0, b);
    EXPECT_NEAR(dbar(0.0, b), g0, 1e-6 * g0);
}

TEST(Bath, ResonantCutoffBranchIsContinuous) {
    auto b = three_level_bath();
    b.cutoff_cm = 1310.10973391788;  // first Matsubara frequency at 300 K
    ASSERT_EQ(is_resonant(b), 1);
    const double d = 0.3 * b.cutoff();
    const double d0 = dbar(0.0, b);
    const double f0 = fbar(d, b);
    for (double rel : {1e-4, -1e-4}) {
        auto near = b;
        near.cutoff_cm *= 1.0 + rel;
        ASSERT_FALSE(is_resonant(near).has_value());
        EXPECT_NEAR(dbar(0.0, near), d0, 1e-3 * std::abs(d0));
        EXPECT_NEAR(fbar(d, near), f0, 1e-3 * std::abs(f0));
    }
}

TEST(Bath, OddAndEvenParts) {
    const auto b = three_level_bath();
    for (double w : {0.3, 7.0, 40.0}) {
        EXPECT_NEAR(fbar(-w, b), -fbar(w, b), 1e-14);
        EXPECT_NEAR(gammabar(-w, b), -gammabar(w, b), 1e-14);
        EXPECT_NEAR(kappabar(-w, b), kappabar(w, b), 1e-14);
    }
    EXPECT_EQ(fbar(0.0, b), 0.0);
}

TEST(Bath, Validation) {
    BathSpec b;
    EXPECT_NO_THROW(b.validate());
    auto bad = b;
    bad.cutoff_cm = 0.0;
    try {
        bad.validate();
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "bath.cutoff_cm");
    }
    bad = b;
    bad.eta_cm = -1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = b;
    bad.matsubara_N = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = b;
    bad.temperature_K = -3.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = b;
    bad.eta_cm = 0.0;
    EXPECT_NO_THROW(bad.validate());
}

TEST(Bath, StandardGrid) {
    const auto b = three_level_bath();
    const auto g = standard_frequency_grid(b);
    ASSERT_EQ(g.size(), 25u);
    EXPECT_NEAR(g.front(), -3.0 * om(b), 1e-12);
    EXPECT_NEAR(g.back(), 3.0 * om(b), 1e-12);
    for (double w : g) EXPECT_GE(std::abs(w), om(b) / 100.0);
}

TEST(Bath, MatsubaraConvergenceReport) {
    auto b = three_level_bath();
    std::vector<double> grid = standard_frequency_grid(b);
    grid.push_back(0.0);
    const auto r = matsubara_convergence(b, grid);
    EXPECT_EQ(r.n_from, 100);
    EXPECT_EQ(r.n_to, 200);
    // dbar(0) carries the whole 1/N tail of the sum.
    EXPECT_EQ(r.worst_dbar_at, 0.0);
    EXPECT_GT(r.max_change_dbar, 1e-5);
    EXPECT_LT(r.max_change_dbar, 1e-4);
    EXPECT_LT(r.max_change_fbar, 1e-6);

    b.matsubara_N = 1;
    const auto coarse = matsubara_convergence(b, grid);
    EXPECT_GT(coarse.max_change(), 1e-3);
}

TEST(SpectralTensor, BuildAndAccess) {
    const auto model = models::three_level();
    const auto es = eigendecompose(model.hamiltonian());
    const BohrFrequencyTable t(es);
    const auto tensor = build_spectral_tensor(t, model.bath);
    EXPECT_EQ(tensor.sites(), 3u);
    EXPECT_EQ(tensor.clusters(), t.size());
    const auto c = t.cluster(2, 0);
    EXPECT_EQ(tensor.value(1, c), gamma2(es.bohr(2, 0), model.bath));
    EXPECT_EQ(tensor.value(0, 1, c), cplx(0.0));
    EXPECT_DOUBLE_EQ(tensor.rate(0, c), 2.0 * tensor.value(0, c).real());
    EXPECT_THROW(tensor.value(0, t.size()), ConfigError);
    EXPECT_THROW(tensor.value(3, 0), DimensionError);
    EXPECT_EQ(tensor.scaled(2.0).value(0, c), 2.0 * tensor.value(0, c));
}
