#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "test_support.hpp"

using namespace nsme;
namespace fs = std::filesystem;

namespace {

cli::SimConfig parse(const std::string& yaml, const cli::Overrides& o = {}) {
    return cli::parse_config(YAML::Load(yaml), o);
}

std::string error_key(const std::string& yaml) {
    try {
        parse(yaml);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

class CliBinary : public ::testing::Test {
protected:
    void SetUp() override {
        const char* exe = std::getenv("NSME_CLI");
        if (!exe) GTEST_SKIP() << "NSME_CLI not set";
        exe_ = exe;
        dir_ = fs::temp_directory_path() /
               ("nsme_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        if (!dir_.empty()) fs::remove_all(dir_);
    }

    int run(const std::string& args) const {
        const std::string cmd = "cd '" + dir_.string() + "' && '" + exe_ + "' " + args + " > log.txt 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

    static std::vector<std::vector<std::string>> csv(const std::string& text) {
        std::vector<std::vector<std::string>> rows;
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            std::vector<std::string> cells;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            rows.push_back(cells);
        }
        return rows;
    }

    std::string exe_;
    fs::path dir_;
};

}  // namespace

TEST(Config, DefaultsAreTheThreeLevelModel) {
    const auto c = parse("{}");
    EXPECT_EQ(c.model, "three_level");
    EXPECT_EQ(c.dim(), 3);
    EXPECT_EQ(c.bath.matsubara_N, 100);
    EXPECT_EQ(c.bath.variant, TensorVariant::gamma2);
    EXPECT_EQ(c.form, Form::lindblad);
    EXPECT_FALSE(c.secular);
    EXPECT_EQ(c.initial_site, 0);
    EXPECT_EQ(c.t_final_ps, 5.0);
    EXPECT_EQ(c.samples, 500u);
    EXPECT_EQ(c.output_elements().size(), 6u);
}

TEST(Config, Pe545DefaultsAndOverrides) {
    cli::Overrides o;
    o.model = "pe545";
    o.variant = "gamma1";
    o.form = "redfield";
    o.secular = "1";
    const auto c = parse("model: three_level\n", o);
    EXPECT_EQ(c.dim(), 8);
    EXPECT_EQ(c.bath.matsubara_N, 10000);
    EXPECT_EQ(c.bath.eta_cm, 12.5);
    EXPECT_EQ(c.t_final_ps, 2.0);
    EXPECT_EQ(c.policy, Symmetrization::upper_triangle);
    EXPECT_EQ(c.bath.variant, TensorVariant::gamma1);
    EXPECT_EQ(c.form, Form::redfield);
    EXPECT_TRUE(c.secular);
}

TEST(Config, CustomModelWithCommentsAndInlineMatrices) {
    const auto c = parse(R"(
# a two-level dimer
model:
  name: custom
  hamiltonian_cm: [[100, 20], [20, 0]]   # cm^-1
bath: {eta: 1.0, cutoff_cm: 50}
initial_state: [[0.5, [0.1, 0.2]], [[0.1, -0.2], 0.5]]
output: {path: dimer.csv, elements: [[1, 2]]}
tensor: {grid_cm: [0, 10]}
)");
    EXPECT_EQ(c.model, "custom");
    EXPECT_EQ(c.dim(), 2);
    EXPECT_EQ(c.bath.matsubara_N, 100);
    EXPECT_EQ(c.bath.temperature_K, 300.0);
    EXPECT_FALSE(c.initial_site.has_value());
    EXPECT_EQ(c.initial_matrix(0, 1), cplx(0.1, 0.2));
    ASSERT_EQ(c.output_elements().size(), 1u);
    EXPECT_EQ(c.output_elements()[0], std::make_pair(Index{0}, Index{1}));
    EXPECT_EQ(c.tensor_grid_cm, (std::vector<double>{0.0, 10.0}));
}

TEST(Config, PrintedConfigReparsesToTheSameRun) {
    for (const std::string& yaml :
         {std::string("{}"), std::string("model: pe545\nmethod: {secular: true, variant: gamma1}\n"),
          std::string("model: {hamiltonian_cm: [[1.1, [0.3, 0.7]], [[0.3, -0.7], -2.25]]}\n"
                      "initial_state: [[0.25, 0], [0, 0.75]]\n"
                      "output: {elements: [[1, 1], [1, 2]]}\ntensor: {grid_cm: [-3.5, 0.1]}\n"
                      "time: {t_final_ps: 0.3333333333333333, samples: 7}\n")}) {
        const auto a = parse(yaml);
        const auto b = parse(cli::to_yaml(a));
        EXPECT_TRUE(a == b) << cli::to_yaml(a);
    }
}

TEST(Config, ErrorsNameTheOffendingKey) {
    EXPECT_EQ(error_key("bath: {cutoff_cm: -1}"), "bath.cutoff_cm");
    EXPECT_EQ(error_key("bath: {etta: 1}"), "bath.etta");
    EXPECT_EQ(error_key("bath: {eta: abc}"), "bath.eta");
    EXPECT_EQ(error_key("bath: {temperature_K: 0}"), "bath.temperature_K");
    EXPECT_EQ(error_key("bath: {matsubara_N: 0}"), "bath.matsubara_N");
    EXPECT_EQ(error_key("method: {form: bloch}"), "method.form");
    EXPECT_EQ(error_key("method: {variant: gamma3}"), "method.variant");
    EXPECT_EQ(error_key("method: {secular: maybe}"), "method.secular");
    EXPECT_EQ(error_key("model: fmo"), "model");
    EXPECT_EQ(error_key("model: {name: custom}"), "model.hamiltonian_cm");
    EXPECT_EQ(error_key("model: {hamiltonian_cm: [[1, 2], [3]]}"), "model.hamiltonian_cm");
    EXPECT_EQ(error_key("initial_state: 4"), "initial_state");
    EXPECT_EQ(error_key("initial_state: [[1, 0], [0, 0]]"), "initial_state");
    EXPECT_EQ(error_key("initial_state: [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]]"), "initial_state");
    EXPECT_EQ(error_key("time: {samples: 1}"), "time.samples");
    EXPECT_EQ(error_key("time: {t_final_ps: 0}"), "time.t_final_ps");
    EXPECT_EQ(error_key("output: {elements: [[2, 1]]}"), "output.elements");
    EXPECT_EQ(error_key("tensor: {grid_cm: [.nan]}"), "tensor.grid_cm");
    EXPECT_EQ(error_key("simulation: {}"), "simulation");
}

TEST(Panels, FigureOrder) {
    const auto p = cli::figure_panels();
    ASSERT_EQ(p.size(), 8u);
    EXPECT_EQ(p[0].kind.describe(), "non-secular lindblad gamma2");
    EXPECT_EQ(p[1].kind.describe(), "non-secular redfield gamma2");
    EXPECT_EQ(p[2].kind.describe(), "non-secular lindblad gamma1");
    EXPECT_EQ(p[3].kind.describe(), "non-secular redfield gamma1");
    EXPECT_EQ(p[4].kind.describe(), "secular lindblad gamma2");
    EXPECT_EQ(p[5].kind.describe(), "secular redfield gamma2");
    EXPECT_EQ(p[6].kind.describe(), "secular lindblad gamma1");
    EXPECT_EQ(p[7].kind.describe(), "secular redfield gamma1");
}

TEST_F(CliBinary, SimulateWritesDeterministicCsv) {
    ASSERT_EQ(run("simulate --out a"), 0);
    ASSERT_EQ(run("simulate --out b"), 0);
    const auto text = read("a/trajectory.csv");
    EXPECT_EQ(text, read("b/trajectory.csv"));
    const auto rows = csv(text);
    ASSERT_EQ(rows.size(), 501u);
    ASSERT_EQ(rows[0].size(), 13u);
    EXPECT_EQ(rows[0][0], "time_ps");
    EXPECT_EQ(rows[0][1], "rho_1_1_re");
    EXPECT_EQ(rows[0][12], "rho_3_3_im");
    EXPECT_EQ(rows[1][1], "1.000000000000e+00");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double tr = std::stod(rows[k][1]) + std::stod(rows[k][7]) + std::stod(rows[k][11]);
        EXPECT_NEAR(tr, 1.0, 1e-8) << k;
    }
    for (std::size_t k = 2; k < 12; ++k) EXPECT_LT(std::stod(rows[k][1]), std::stod(rows[k - 1][1]));
}

TEST_F(CliBinary, VariantChangesOnlyTheStateColumns) {
    ASSERT_EQ(run("simulate --variant gamma1 --out g1"), 0);
    ASSERT_EQ(run("simulate --variant gamma2 --out g2"), 0);
    const auto a = csv(read("g1/trajectory.csv"));
    const auto b = csv(read("g2/trajectory.csv"));
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(a[0], b[0]);
    bool differ = false;
    for (std::size_t k = 1; k < a.size(); ++k) {
        EXPECT_EQ(a[k][0], b[k][0]);
        differ = differ || a[k] != b[k];
    }
    EXPECT_TRUE(differ);
}

TEST_F(CliBinary, ConfigErrorsExitWithTwo) {
    write("bad.yaml", "bath: {cutoff_cm: -5}\n");
    EXPECT_EQ(run("simulate --config bad.yaml"), 2);
    EXPECT_NE(read("log.txt").find("bath.cutoff_cm"), std::string::npos);
    EXPECT_EQ(run("simulate --config missing.yaml"), 2);
    EXPECT_EQ(run("simulate --form bloch"), 2);
    write("syntax.yaml", "bath: [unclosed\n");
    EXPECT_EQ(run("validate --config syntax.yaml"), 2);
}

TEST_F(CliBinary, PrintConfigRoundTrip) {
    write("in.yaml", "model: pe545 # built in\nmethod: {form: redfield}\ntime: {samples: 11}\n");
    ASSERT_EQ(run("--config in.yaml --secular true --print-config"), 0);
    const auto printed = read("log.txt");
    const auto a = cli::parse_config(YAML::Load(printed));
    cli::Overrides o;
    o.secular = "true";
    const auto b = cli::load_config((dir_ / "in.yaml").string(), o);
    EXPECT_TRUE(a == b);
    EXPECT_TRUE(a.secular);
}

TEST_F(CliBinary, CompareProducesEightPanelsAndManifest) {
    ASSERT_EQ(run("compare --out fig"), 0);
    const auto m = nlohmann::json::parse(read("fig/manifest.json"));
    ASSERT_EQ(m["panels"].size(), 8u);
    for (const auto& p : m["panels"]) {
        EXPECT_EQ(p["status"], "ok");
        EXPECT_TRUE(fs::exists(dir_ / "fig" / p["file"].get<std::string>()));
        EXPECT_GT(p["timescale_ps"].get<double>(), 0.0);
    }
    EXPECT_EQ(m["panels"][0]["label"], "a");
    EXPECT_EQ(m["panels"][0]["description"], "non-secular lindblad gamma2");
    const auto a = csv(read("fig/panel_a.csv"));
    const auto b = csv(read("fig/panel_b.csv"));
    double diff = 0.0;
    for (std::size_t k = 1; k < a.size(); ++k)
        for (std::size_t j = 1; j < a[k].size(); ++j) diff = std::max(diff, std::abs(std::stod(a[k][j]) - std::stod(b[k][j])));
    EXPECT_LE(diff, 1e-6);
}

TEST_F(CliBinary, Pe545ManifestRatiosAreFinite) {
    ASSERT_EQ(run("compare --model pe545 --out pe"), 0);
    const auto m = nlohmann::json::parse(read("pe/manifest.json"));
    EXPECT_EQ(m["dimension"], 8);
    EXPECT_DOUBLE_EQ(m["max_asymmetry_cm"].get<double>(), 0.5);
    for (const char* r : {"secular_over_nonsecular_gamma2", "gamma2_over_gamma1_nonsecular"}) {
        ASSERT_TRUE(m["ratios"][r]["value"].is_number()) << r;
        EXPECT_TRUE(std::isfinite(m["ratios"][r]["value"].get<double>()));
    }
}

TEST_F(CliBinary, TensorTable) {
    ASSERT_EQ(run("tensor --grid 0,50,-150"), 0);
    const auto rows = csv(read("tensor.csv"));
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) EXPECT_EQ(r.size(), 8u);
    EXPECT_EQ(rows[0][0], "delta_cm");
    // pi eta kT / Omega for the three-level bath, cm^-1
    EXPECT_NEAR(std::stod(rows[1][1]), 0.818818583698675, 1e-12);
    for (std::size_t k = 2; k < rows.size(); ++k) {
        EXPECT_EQ(rows[k][1], rows[k][2]);
        EXPECT_LT(std::stod(rows[k][6]), 1e-3);
        EXPECT_LT(std::stod(rows[k][7]), 1e-3);
    }
}

TEST_F(CliBinary, ValidateReportsEachCheck) {
    // N = 100 leaves a 1/N tail in dbar(0) of ~6e-5, above the 1e-6 bar;
    // every other check passes.
    EXPECT_EQ(run("validate"), 1);
    const auto log = read("log.txt");
    EXPECT_NE(log.find("FAIL  bath.matsubara_convergence"), std::string::npos);
    EXPECT_NE(log.find("PASS  generator.nonsecular_lindblad_vs_redfield.gamma2"), std::string::npos);
    EXPECT_NE(log.find("PASS  tensor.closed_form_vs_quadrature.im"), std::string::npos);
    std::size_t fails = 0;
    for (std::size_t pos = 0; (pos = log.find("FAIL  ", pos)) != std::string::npos; ++pos) ++fails;
    EXPECT_EQ(fails, 1u);

    write("n1.yaml", "bath: {matsubara_N: 1}\n");
    EXPECT_EQ(run("validate --config n1.yaml"), 1);
    EXPECT_NE(read("log.txt").find("FAIL  bath.matsubara_convergence"), std::string::npos);
}

TEST_F(CliBinary, ValidateClosedSystemSkipsBathChecks) {
    write("closed.yaml", "bath: {eta: 0}\n");
    EXPECT_EQ(run("validate --config closed.yaml"), 0);
    const auto log = read("log.txt");
    EXPECT_NE(log.find("SKIP  bath.matsubara_convergence"), std::string::npos);
    EXPECT_NE(log.find("SKIP  tensor.re_gamma2_equals_gamma1"), std::string::npos);
    EXPECT_NE(log.find("PASS  trajectory.trace_error"), std::string::npos);
    EXPECT_EQ(log.find("FAIL"), std::string::npos);
}

TEST_F(CliBinary, DumpGenerator) {
    ASSERT_EQ(run("dump-generator --form redfield"), 0);
    const auto rows = csv(read("generator.csv"));
    ASSERT_EQ(rows.size(), 82u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"row", "col", "re", "im"}));
    const auto cfg = cli::parse_config(YAML::Load("method: {form: redfield}"));
    const auto l = cli::make_generator(cfg, cfg.kind());
    EXPECT_NEAR(std::stod(rows[5][2]), l.matrix(std::stoi(rows[5][0]) - 1, std::stoi(rows[5][1]) - 1).real(), 1e-12);
}

TEST(Config, SampleConfigsParse) {
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(NSME_SAMPLE_CONFIGS)) {
        if (entry.path().extension() != ".yaml") continue;
        EXPECT_NO_THROW(cli::load_config(entry.path().string())) << entry.path();
        ++n;
    }
    EXPECT_GE(n, 3u);
}
