#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace nsme::cli {

enum ExitCode { exit_ok = 0, exit_failure = 1, exit_config = 2 };

/// Generator of the given kind for the configured system, site basis.
Superoperator make_generator(const SimConfig& cfg, GeneratorKind kind);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr,
                          const std::vector<std::pair<Index, Index>>& elements);

struct Panel {
    char label;
    GeneratorKind kind;
};

/// Figure panel order: a/c non-secular Lindblad (gamma2/gamma1), b/d
/// non-secular Redfield, e/g secular Lindblad, f/h secular Redfield.
std::vector<Panel> figure_panels();

struct Check {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    enum class Status { pass, fail, skip } status = Status::pass;
    std::string detail;
};

std::vector<Check> validation_checks(const SimConfig& cfg);

int run_simulate(const SimConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int run_compare(const SimConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int run_tensor(const SimConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int run_validate(const SimConfig& cfg, std::ostream& log);
int run_dump_generator(const SimConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace nsme::cli
