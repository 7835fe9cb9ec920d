#pragma once

// Built-in benchmark systems: an open three-level system and the eight-site
// PE545 light-harvesting complex, each with its reference bath.

#include <string>
#include <string_view>

#include "nsme/bath.hpp"
#include "nsme/operators.hpp"

namespace nsme::models {

struct Model {
    std::string name;
    RealMatrix hamiltonian_cm;  ///< as tabulated, before symmetrization
    Symmetrization policy;
    BathSpec bath;
    Eigen::Index initial_site;  ///< 0-based
    double default_t_final_ps;

    SiteHamiltonian hamiltonian() const { return SiteHamiltonian::from_wavenumbers(hamiltonian_cm, policy); }
};

inline Model three_level() {
    RealMatrix h(3, 3);
    // clang-format off
    h <<  0.0,  0.67,  0.0,
          0.67, -2.67, 0.67,
          0.0,  0.67, -3.67;
    // clang-format on
    BathSpec bath;
    bath.eta_cm = 0.125;
    bath.cutoff_cm = 100.0;
    bath.temperature_K = 300.0;
    bath.matsubara_N = 100;
    return {"three_level", h, Symmetrization::average, bath, 0, 5.0};
}

/// The tabulated PE545 matrix is not exactly symmetric: (2,5) reads -35.9
/// and (5,2) reads -35.4. The upper triangle is taken as authoritative.
inline Model pe545() {
    RealMatrix h(8, 8);
    // clang-format off
    h << 18008.0,  -4.1,  -31.9,    2.8,    2.1,  -37.1,  -10.5,   45.9,
           -4.1, 17973.0,  -2.9,   30.9,  -35.9,    2.5,  -45.5,   11.0,
          -31.9,   -2.9, 18711.0,  -5.6,  -19.6,  -16.1,    6.7,    6.8,
            2.8,   30.9,   -5.6, 18960.0,  11.5,   25.5,    5.1,    7.4,
            2.1,  -35.4,  -19.6,   11.5, 18532.0, 101.5,   36.3,   16.0,
          -37.1,    2.5,  -16.1,   25.5,  101.5, 19574.0,  17.6,  -38.6,
          -10.5,  -45.5,    6.7,    5.1,   36.3,   17.6, 18040.0,   2.6,
           45.9,   11.0,    6.8,    7.4,   16.0,  -38.6,    2.6, 19050.0;
    // clang-format on
    BathSpec bath;
    bath.eta_cm = 12.5;
    bath.cutoff_cm = 1000.0;
    bath.temperature_K = 300.0;
    bath.matsubara_N = 10000;
    return {"pe545", h, Symmetrization::upper_triangle, bath, 0, 2.0};
}

inline Model by_name(std::string_view name) {
    if (name == "three_level") return three_level();
    if (name == "pe545") return pe545();
    throw ConfigError("model", "unknown built-in model '" + std::string(name) + "' (expected three_level or pe545)");
}

}  // namespace nsme::models
