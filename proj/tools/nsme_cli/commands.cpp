#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

namespace nsme::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

std::string short_fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

fs::path resolve(const fs::path& out_dir, const std::string& file) {
    const fs::path p(file);
    return p.is_absolute() ? p : out_dir / p;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    return out;
}

SpectralTensor tensor_for(const SimConfig& cfg, const EigenSystem& es, TensorVariant v) {
    auto bath = cfg.bath;
    bath.variant = v;
    return build_spectral_tensor(BohrFrequencyTable(es), bath);
}

std::vector<double> bath_grid(const SimConfig& cfg) {
    if (cfg.tensor_grid_cm.empty()) return standard_frequency_grid(cfg.bath);
    std::vector<double> g;
    for (double x : cfg.tensor_grid_cm) g.push_back(units::to_angular(x));
    return g;
}

double rel_err(double oracle, double value) {
    const double d = std::abs(oracle - value);
    if (d == 0.0) return 0.0;
    return d / std::abs(oracle);
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

Superoperator make_generator(const SimConfig& cfg, GeneratorKind kind) {
    const auto es = eigendecompose(cfg.hamiltonian());
    return build_generator(es, tensor_for(cfg, es, kind.variant), kind.form, kind.secular);
}

void write_trajectory_csv(const fs::path& path, const Trajectory& tr,
                          const std::vector<std::pair<Index, Index>>& elements) {
    auto out = open_output(path);
    out << "time_ps";
    for (const auto& [i, j] : elements)
        out << ",rho_" << i + 1 << "_" << j + 1 << "_re,rho_" << i + 1 << "_" << j + 1 << "_im";
    out << "\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        out << fmt(tr.times[k]);
        for (const auto& [i, j] : elements) {
            const cplx v = tr.states[k](i, j);
            out << "," << fmt(v.real()) << "," << fmt(v.imag());
        }
        out << "\n";
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<Panel> figure_panels() {
    using TV = TensorVariant;
    return {
        {'a', {Form::lindblad, false, TV::gamma2}}, {'b', {Form::redfield, false, TV::gamma2}},
        {'c', {Form::lindblad, false, TV::gamma1}}, {'d', {Form::redfield, false, TV::gamma1}},
        {'e', {Form::lindblad, true, TV::gamma2}},  {'f', {Form::redfield, true, TV::gamma2}},
        {'g', {Form::lindblad, true, TV::gamma1}},  {'h', {Form::redfield, true, TV::gamma1}},
    };
}

// ---------------------------------------------------------------------------

int run_simulate(const SimConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const auto l = make_generator(cfg, cfg.kind());
    const auto tr = propagate(l, cfg.initial_state(), uniform_grid(cfg.t_final_ps, cfg.samples));
    const auto path = resolve(out_dir, cfg.output_path);
    write_trajectory_csv(path, tr, cfg.output_elements());
    log << cfg.kind().describe() << ": " << tr.size() << " samples (" << tr.method << ") -> " << path.string() << "\n";
    return exit_ok;
}

int run_compare(const SimConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const auto times = uniform_grid(cfg.t_final_ps, cfg.samples);
    const auto rho0 = cfg.initial_state();
    const auto es = eigendecompose(cfg.hamiltonian());

    nlohmann::json panels = nlohmann::json::array();
    std::map<char, double> timescale;
    bool all_ok = true;
    for (const auto& p : figure_panels()) {
        nlohmann::json entry = {{"label", std::string(1, p.label)},
                                {"form", to_string(p.kind.form)},
                                {"secular", p.kind.secular},
                                {"variant", to_string(p.kind.variant)},
                                {"description", p.kind.describe()}};
        const std::string file = std::string("panel_") + p.label + ".csv";
        try {
            const auto l = build_generator(es, tensor_for(cfg, es, p.kind.variant), p.kind.form, p.kind.secular);
            try {
                const double ts = relaxation_timescale(l);
                timescale[p.label] = ts;
                entry["timescale_ps"] = ts;
            } catch (const NumericalError& e) {
                entry["timescale_ps"] = nullptr;
                entry["timescale_error"] = e.what();
            }
            const auto tr = propagate(l, rho0, times);
            write_trajectory_csv(out_dir / file, tr, cfg.output_elements());
            entry["file"] = file;
            entry["method"] = tr.method;
            entry["status"] = "ok";
            log << "panel " << p.label << " (" << p.kind.describe() << "): ok\n";
        } catch (const std::exception& e) {
            all_ok = false;
            entry["file"] = nullptr;
            entry["status"] = "failed";
            entry["error"] = e.what();
            log << "panel " << p.label << " (" << p.kind.describe() << "): FAILED: " << e.what() << "\n";
        }
        panels.push_back(entry);
    }

    auto ratio = [&](char num, char den) -> nlohmann::json {
        if (!timescale.count(num) || !timescale.count(den)) return nullptr;
        return finite_or_null(timescale[num] / timescale[den]);
    };
    nlohmann::json manifest = {
        {"model", cfg.model},
        {"dimension", cfg.dim()},
        {"max_asymmetry_cm", cfg.hamiltonian().max_asymmetry()},
        {"bath",
         {{"eta", cfg.bath.eta_cm},
          {"cutoff_cm", cfg.bath.cutoff_cm},
          {"temperature_K", cfg.bath.temperature_K},
          {"matsubara_N", cfg.bath.matsubara_N}}},
        {"time", {{"t_final_ps", cfg.t_final_ps}, {"samples", cfg.samples}}},
        {"panels", panels},
        {"ratios",
         {{"secular_over_nonsecular_gamma2", {{"value", ratio('e', 'a')}, {"panels", {"e", "a"}}}},
          {"gamma2_over_gamma1_nonsecular", {{"value", ratio('a', 'c')}, {"panels", {"a", "c"}}}}}},
    };
    auto out = open_output(out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
    log << "manifest -> " << (out_dir / "manifest.json").string() << "\n";
    return all_ok ? exit_ok : exit_failure;
}

int run_tensor(const SimConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const double c = units::angular_per_wavenumber;
    const auto path = out_dir / "tensor.csv";
    auto out = open_output(path);
    out << "delta_cm,gamma1,gamma2_re,gamma2_im,oracle_re,oracle_im,rel_err_re,rel_err_im\n";
    double worst = 0.0;
    const auto grid = bath_grid(cfg);
    for (double w : grid) {
        const double g1 = gamma1(w, cfg.bath);
        const cplx g2 = gamma2(w, cfg.bath);
        const cplx o = gamma_quadrature_oracle(w, cfg.bath).value();
        const double er = rel_err(o.real(), g2.real());
        const double ei = rel_err(o.imag(), g2.imag());
        worst = std::max({worst, er, ei});
        out << fmt(w / c) << "," << fmt(g1 / c) << "," << fmt(g2.real() / c) << "," << fmt(g2.imag() / c) << ","
            << fmt(o.real() / c) << "," << fmt(o.imag() / c) << "," << fmt(er) << "," << fmt(ei) << "\n";
    }
    log << grid.size() << " frequencies, worst relative error vs quadrature " << short_fmt(worst) << " -> "
        << path.string() << "\n";
    return exit_ok;
}

int run_dump_generator(const SimConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    const auto l = make_generator(cfg, cfg.kind());
    const auto path = out_dir / "generator.csv";
    auto out = open_output(path);
    out << "row,col,re,im\n";
    for (Index j = 0; j < l.matrix.cols(); ++j)
        for (Index i = 0; i < l.matrix.rows(); ++i)
            out << i + 1 << "," << j + 1 << "," << fmt(l.matrix(i, j).real()) << "," << fmt(l.matrix(i, j).imag())
                << "\n";
    log << cfg.kind().describe() << ": " << l.matrix.rows() << "x" << l.matrix.cols()
        << " site-basis superoperator (rad/ps, column-major vec) -> " << path.string() << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------

std::vector<Check> validation_checks(const SimConfig& cfg) {
    std::vector<Check> checks;
    auto add = [&](std::string name, double measured, double tol, std::string detail = {}) {
        Check c{std::move(name), measured, tol, measured <= tol ? Check::Status::pass : Check::Status::fail,
                std::move(detail)};
        checks.push_back(std::move(c));
    };
    auto skip = [&](std::string name, double tol, std::string why) {
        checks.push_back({std::move(name), std::numeric_limits<double>::quiet_NaN(), tol, Check::Status::skip, std::move(why)});
    };

    const double cm = units::angular_per_wavenumber;
    const bool dissipative = cfg.bath.eta_cm > 0.0;
    const auto grid = standard_frequency_grid(cfg.bath);

    if (dissipative) {
        double identity = 0.0;
        for (double w : grid) {
            const double g1 = gamma1(w, cfg.bath) / cm;
            identity = std::max(identity, std::abs(gamma2(w, cfg.bath).real() / cm - g1) / std::max(1.0, std::abs(g1)));
        }
        add("tensor.re_gamma2_equals_gamma1", identity, 1e-8);

        double worst_re = 0.0, worst_im = 0.0;
        std::string where;
        for (double w : grid) {
            const auto o = gamma_quadrature_oracle(w, cfg.bath);
            const auto t = gamma2_terms(w, cfg.bath);
            const double er = rel_err(o.value().real(), t.value().real());
            const double ei = rel_err(o.value().imag(), t.value().imag());
            if (std::max(er, ei) > std::max(worst_re, worst_im)) {
                const double s = std::abs(o.value());
                where = "worst at delta=" + short_fmt(w / cm) + " cm^-1; per-term |diff|/|Gamma|: dbar " +
                        short_fmt(std::abs(o.terms.dbar - t.dbar) / s) + ", fbar " +
                        short_fmt(std::abs(o.terms.fbar - t.fbar) / s) + ", kappabar " +
                        short_fmt(std::abs(o.terms.kappabar - t.kappabar) / s) + ", gammabar " +
                        short_fmt(std::abs(o.terms.gammabar - t.gammabar) / s);
            }
            worst_re = std::max(worst_re, er);
            worst_im = std::max(worst_im, ei);
        }
        add("tensor.closed_form_vs_quadrature.re", worst_re, 1e-3, where);
        add("tensor.closed_form_vs_quadrature.im", worst_im, 1e-3, where);

        auto with_zero = grid;
        with_zero.push_back(0.0);
        const auto mc = matsubara_convergence(cfg.bath, with_zero);
        add("bath.matsubara_convergence", mc.max_change(), 1e-6,
            "N=" + std::to_string(mc.n_from) + "->" + std::to_string(mc.n_to) + ": dbar " +
                short_fmt(mc.max_change_dbar) + " (at " + short_fmt(mc.worst_dbar_at / cm) + " cm^-1), fbar " +
                short_fmt(mc.max_change_fbar) + " (at " + short_fmt(mc.worst_fbar_at / cm) + " cm^-1)");
    } else {
        const std::string why = "eta = 0: no bath";
        skip("tensor.re_gamma2_equals_gamma1", 1e-8, why);
        skip("tensor.closed_form_vs_quadrature.re", 1e-3, why);
        skip("tensor.closed_form_vs_quadrature.im", 1e-3, why);
        skip("bath.matsubara_convergence", 1e-6, why);
    }

    const auto es = eigendecompose(cfg.hamiltonian());
    for (auto v : {TensorVariant::gamma1, TensorVariant::gamma2}) {
        const auto tensor = tensor_for(cfg, es, v);
        const auto lin = build_generator(es, tensor, Form::lindblad, false);
        const auto red = build_generator(es, tensor, Form::redfield, false);
        const auto slin = build_generator(es, tensor, Form::lindblad, true);
        const auto sred = build_generator(es, tensor, Form::redfield, true);
        auto rel = [](const Matrix& a, const Matrix& b) {
            const double s = std::max(max_abs(a), max_abs(b));
            return s == 0.0 ? 0.0 : max_abs(a - b) / s;
        };
        const std::string tag = to_string(v);
        add("generator.nonsecular_lindblad_vs_redfield." + tag, rel(lin.matrix, red.matrix), 1e-10);
        add("generator.secular_lindblad_vs_redfield." + tag, rel(slin.matrix, sred.matrix), 1e-10);
        double trace = 0.0, herm = 0.0;
        for (const auto* l : {&lin, &red, &slin, &sred}) {
            trace = std::max(trace, trace_preservation_error(*l));
            herm = std::max(herm, hermiticity_preservation_error(*l) / std::max(1.0, max_abs(l->matrix)));
        }
        add("generator.trace_preservation." + tag, trace, 1e-12);
        add("generator.hermiticity_preservation." + tag, herm, 1e-12);
    }

    const auto l = make_generator(cfg, cfg.kind());
    const auto tr = propagate(l, cfg.initial_state(), uniform_grid(cfg.t_final_ps, cfg.samples));
    add("trajectory.trace_error", tr.max_trace_error(), 1e-8, cfg.kind().describe());
    add("trajectory.hermiticity_error", tr.max_hermiticity_error(), 1e-10, cfg.kind().describe());
    if (cfg.secular && cfg.form == Form::lindblad)
        add("trajectory.negative_eigenvalue", std::max(0.0, -tr.min_eigenvalue()), 1e-8, cfg.kind().describe());
    return checks;
}

int run_validate(const SimConfig& cfg, std::ostream& log) {
    const auto checks = validation_checks(cfg);
    bool ok = true;
    for (const auto& c : checks) {
        const char* tag = c.status == Check::Status::pass ? "PASS" : c.status == Check::Status::fail ? "FAIL" : "SKIP";
        if (c.status == Check::Status::fail) ok = false;
        log << tag << "  " << c.name << "  measured=" << (c.status == Check::Status::skip ? "-" : short_fmt(c.measured))
            << "  tol=" << short_fmt(c.tolerance);
        if (!c.detail.empty()) log << "  (" << c.detail << ")";
        log << "\n";
    }
    log << (ok ? "all checks passed" : "validation FAILED") << "\n";
    return ok ? exit_ok : exit_failure;
}

}  // namespace nsme::cli
