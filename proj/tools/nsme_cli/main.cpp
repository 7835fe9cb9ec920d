#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace nsme;

int main(int argc, char** argv) {
    CLI::App app{"Secular and non-secular Lindblad/Redfield dynamics with a Drude bath", "nsme"};
    app.require_subcommand(0, 1);

    std::optional<std::string> config_path;
    std::string out_dir = ".";
    cli::Overrides ov;
    bool print_config = false;
    std::vector<double> grid_cm;

    app.add_option("--config", config_path, "YAML config file");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--model", ov.model, "three_level | pe545 (replaces the config's model)");
    app.add_option("--variant", ov.variant, "gamma1 | gamma2");
    app.add_option("--form", ov.form, "lindblad | redfield");
    app.add_option("--secular", ov.secular, "true | false");
    app.add_flag("--print-config", print_config, "print the resolved config and exit");

    auto* simulate = app.add_subcommand("simulate", "propagate one master equation, write a trajectory CSV");
    auto* compare = app.add_subcommand("compare", "run all eight panels, write panel CSVs and manifest.json");
    auto* tensor = app.add_subcommand("tensor", "tabulate gamma1, gamma2 and the quadrature oracle");
    auto* validate = app.add_subcommand("validate", "run the bath and generator consistency checks");
    auto* dump = app.add_subcommand("dump-generator", "write the site-basis superoperator as CSV");
    tensor->add_option("--grid", grid_cm, "frequencies in cm^-1 (overrides tensor.grid_cm)")->delimiter(',');
    for (auto* s : {simulate, compare, tensor, validate, dump}) s->fallthrough();

    CLI11_PARSE(app, argc, argv);

    cli::SimConfig cfg;
    try {
        cfg = cli::load_config(config_path, ov);
        if (!grid_cm.empty()) {
            for (double x : grid_cm)
                if (!std::isfinite(x)) throw ConfigError("--grid", "non-finite frequency");
            cfg.tensor_grid_cm = grid_cm;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::exit_config;
    }
    if (print_config) {
        std::cout << cli::to_yaml(cfg);
        return cli::exit_ok;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return cli::exit_config;
    }

    try {
        if (*simulate) return cli::run_simulate(cfg, out_dir, std::cout);
        if (*compare) return cli::run_compare(cfg, out_dir, std::cout);
        if (*tensor) return cli::run_tensor(cfg, out_dir, std::cout);
        if (*validate) return cli::run_validate(cfg, std::cout);
        if (*dump) return cli::run_dump_generator(cfg, out_dir, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_failure;
    }
    return cli::exit_ok;
}
