#pragma once

// Run configuration for the nsme command-line tool.
//
// YAML schema (all sections optional except where noted):
//   model:            three_level | pe545 | {name: custom, hamiltonian_cm: [[...], ...]}
//   bath:             {eta, cutoff_cm, temperature_K, matsubara_N}
//   method:           {form: lindblad|redfield, secular: bool, variant: gamma1|gamma2}
//   initial_state:    1-based site index, or a matrix (entries real or [re, im])
//   time:             {t_final_ps, samples}
//   output:           {path, elements: all | [[i, j], ...]}   (1-based, i <= j)
//   tensor:           {grid_cm: [...]}
// Missing bath keys fall back to the model's reference bath.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "nsme/nsme.hpp"

namespace nsme::cli {

struct Overrides {
    std::optional<std::string> model;
    std::optional<std::string> variant;
    std::optional<std::string> form;
    std::optional<std::string> secular;
};

struct SimConfig {
    std::string model = "three_level";  ///< three_level, pe545 or custom
    Matrix hamiltonian_cm;              ///< as given, before symmetrization
    Symmetrization policy = Symmetrization::average;
    BathSpec bath;
    Form form = Form::lindblad;
    bool secular = false;
    std::optional<Index> initial_site = 0;  ///< 0-based; empty when a matrix is given
    Matrix initial_matrix;
    double t_final_ps = 5.0;
    std::size_t samples = 500;
    std::string output_path = "trajectory.csv";
    std::vector<std::pair<Index, Index>> elements;  ///< 0-based, i <= j; empty means all
    std::vector<double> tensor_grid_cm;             ///< empty means the standard grid

    Index dim() const { return hamiltonian_cm.rows(); }
    SiteHamiltonian hamiltonian() const { return SiteHamiltonian::from_wavenumbers(hamiltonian_cm, policy); }
    DensityMatrix initial_state() const;
    GeneratorKind kind() const { return {form, secular, bath.variant}; }
    /// Selected upper-triangle elements, resolving "all".
    std::vector<std::pair<Index, Index>> output_elements() const;
};

bool operator==(const SimConfig& a, const SimConfig& b);

/// Parse a YAML tree after applying command-line overrides. Throws
/// ConfigError naming the offending key.
SimConfig parse_config(YAML::Node root, const Overrides& overrides = {});
SimConfig load_config(const std::optional<std::string>& path, const Overrides& overrides = {});

/// Fully resolved config as YAML; reparses to an equal SimConfig.
std::string to_yaml(const SimConfig& cfg);

}  // namespace nsme::cli
