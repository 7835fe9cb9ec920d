#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace nsme::cli {

namespace {

std::string join(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

void reject_unknown(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
    if (!node.IsMap()) throw ConfigError(section, "expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(join(section, key), "unknown key");
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key, const char* what) {
    if (!node.IsScalar()) throw ConfigError(key, std::string("expected ") + what);
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(key, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
    }
}

double finite_number(const YAML::Node& node, const std::string& key) {
    const double v = scalar<double>(node, key, "a number");
    if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
    return v;
}

bool boolean(const YAML::Node& node, const std::string& key) {
    if (node.IsScalar()) {
        std::string s = node.Scalar();
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "1") return true;
        if (s == "0") return false;
    }
    return scalar<bool>(node, key, "true or false");
}

cplx complex_entry(const YAML::Node& node, const std::string& key) {
    if (node.IsSequence()) {
        if (node.size() != 2) throw ConfigError(key, "complex entries are written [re, im]");
        return {finite_number(node[0], key), finite_number(node[1], key)};
    }
    return {finite_number(node, key), 0.0};
}

Matrix matrix(const YAML::Node& node, const std::string& key) {
    if (!node.IsSequence() || node.size() == 0) throw ConfigError(key, "expected a non-empty list of rows");
    const auto n = static_cast<Index>(node.size());
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto row = node[static_cast<std::size_t>(i)];
        if (!row.IsSequence() || static_cast<Index>(row.size()) != n)
            throw ConfigError(key, "row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " entries");
        for (Index j = 0; j < n; ++j) m(i, j) = complex_entry(row[static_cast<std::size_t>(j)], key);
    }
    return m;
}

Form parse_form(const std::string& s, const std::string& key) {
    if (s == "lindblad") return Form::lindblad;
    if (s == "redfield") return Form::redfield;
    throw ConfigError(key, "expected lindblad or redfield, got '" + s + "'");
}

TensorVariant parse_variant(const std::string& s, const std::string& key) {
    if (s == "gamma1") return TensorVariant::gamma1;
    if (s == "gamma2") return TensorVariant::gamma2;
    throw ConfigError(key, "expected gamma1 or gamma2, got '" + s + "'");
}

void apply_overrides(YAML::Node& root, const Overrides& o) {
    if (o.model) root["model"] = *o.model;
    if (o.form) root["method"]["form"] = *o.form;
    if (o.secular) root["method"]["secular"] = *o.secular;
    if (o.variant) root["method"]["variant"] = *o.variant;
}

void parse_model(const YAML::Node& node, SimConfig& cfg) {
    std::string name = "three_level";
    std::optional<YAML::Node> h;
    std::string sym = "average";
    if (node) {
        if (node.IsScalar()) {
            name = node.Scalar();
        } else {
            reject_unknown(node, "model", {"name", "hamiltonian_cm", "symmetrization"});
            if (node["hamiltonian_cm"]) h = node["hamiltonian_cm"];
            name = node["name"] ? scalar<std::string>(node["name"], "model.name", "a model name")
                                : (h ? "custom" : "three_level");
            if (node["symmetrization"]) sym = scalar<std::string>(node["symmetrization"], "model.symmetrization", "a policy");
        }
    }
    cfg.model = name;
    if (name == "custom") {
        if (!h) throw ConfigError("model.hamiltonian_cm", "required for a custom model");
        cfg.hamiltonian_cm = matrix(*h, "model.hamiltonian_cm");
        if (cfg.hamiltonian_cm.rows() < 2) throw ConfigError("model.hamiltonian_cm", "dimension must be >= 2");
        if (sym == "average") cfg.policy = Symmetrization::average;
        else if (sym == "upper_triangle") cfg.policy = Symmetrization::upper_triangle;
        else throw ConfigError("model.symmetrization", "expected average or upper_triangle");
        cfg.bath = BathSpec{};
        cfg.bath.matsubara_N = cfg.dim() <= 4 ? 100 : 10000;
        cfg.t_final_ps = 5.0;
        cfg.initial_site = 0;
        return;
    }
    if (h) throw ConfigError("model.hamiltonian_cm", "only allowed with name: custom");
    if (name != "three_level" && name != "pe545")
        throw ConfigError("model", "unknown model '" + name + "' (expected three_level, pe545 or custom)");
    const auto m = models::by_name(name);
    cfg.hamiltonian_cm = m.hamiltonian_cm.cast<cplx>();
    cfg.policy = m.policy;
    cfg.bath = m.bath;
    cfg.t_final_ps = m.default_t_final_ps;
    cfg.initial_site = m.initial_site;
}

void parse_bath(const YAML::Node& node, SimConfig& cfg) {
    if (!node) return;
    reject_unknown(node, "bath", {"eta", "cutoff_cm", "temperature_K", "matsubara_N"});
    if (node["eta"]) cfg.bath.eta_cm = finite_number(node["eta"], "bath.eta");
    if (node["cutoff_cm"]) cfg.bath.cutoff_cm = finite_number(node["cutoff_cm"], "bath.cutoff_cm");
    if (node["temperature_K"]) cfg.bath.temperature_K = finite_number(node["temperature_K"], "bath.temperature_K");
    if (node["matsubara_N"]) cfg.bath.matsubara_N = scalar<int>(node["matsubara_N"], "bath.matsubara_N", "an integer");
}

void parse_method(const YAML::Node& node, SimConfig& cfg) {
    if (!node) return;
    reject_unknown(node, "method", {"form", "secular", "variant"});
    if (node["form"]) cfg.form = parse_form(scalar<std::string>(node["form"], "method.form", "a form"), "method.form");
    if (node["secular"]) cfg.secular = boolean(node["secular"], "method.secular");
    if (node["variant"])
        cfg.bath.variant = parse_variant(scalar<std::string>(node["variant"], "method.variant", "a variant"),
                                         "method.variant");
}

void parse_initial_state(const YAML::Node& node, SimConfig& cfg) {
    if (!node) return;
    if (node.IsScalar()) {
        const int i = scalar<int>(node, "initial_state", "a 1-based site index or a matrix");
        if (i < 1 || i > cfg.dim())
            throw ConfigError("initial_state", "site index " + std::to_string(i) + " outside 1.." + std::to_string(cfg.dim()));
        cfg.initial_site = i - 1;
        return;
    }
    cfg.initial_matrix = matrix(node, "initial_state");
    cfg.initial_site.reset();
    if (cfg.initial_matrix.rows() != cfg.dim())
        throw ConfigError("initial_state", "matrix is " + std::to_string(cfg.initial_matrix.rows()) +
                                               "x" + std::to_string(cfg.initial_matrix.rows()) + ", model has dimension " +
                                               std::to_string(cfg.dim()));
    try {
        (void)DensityMatrix::from_matrix(cfg.initial_matrix);
    } catch (const NumericalError& e) {
        throw ConfigError("initial_state", e.what());
    }
}

void parse_time(const YAML::Node& node, SimConfig& cfg) {
    if (!node) return;
    reject_unknown(node, "time", {"t_final_ps", "samples"});
    if (node["t_final_ps"]) cfg.t_final_ps = finite_number(node["t_final_ps"], "time.t_final_ps");
    if (node["samples"]) {
        const long s = scalar<long>(node["samples"], "time.samples", "an integer");
        if (s < 2) throw ConfigError("time.samples", "must be >= 2");
        cfg.samples = static_cast<std::size_t>(s);
    }
    if (!(cfg.t_final_ps > 0.0)) throw ConfigError("time.t_final_ps", "must be > 0");
}

void parse_output(const YAML::Node& node, SimConfig& cfg) {
    if (!node) return;
    reject_unknown(node, "output", {"path", "elements"});
    if (node["path"]) cfg.output_path = scalar<std::string>(node["path"], "output.path", "a path");
    if (cfg.output_path.empty()) throw ConfigError("output.path", "must not be empty");
    const auto e = node["elements"];
    if (!e || (e.IsScalar() && e.Scalar() == "all")) return;
    if (!e.IsSequence()) throw ConfigError("output.elements", "expected 'all' or a list of [i, j] pairs");
    for (const auto& p : e) {
        if (!p.IsSequence() || p.size() != 2) throw ConfigError("output.elements", "each entry must be [i, j]");
        const int i = scalar<int>(p[0], "output.elements", "an integer");
        const int j = scalar<int>(p[1], "output.elements", "an integer");
        if (i < 1 || j < i || j > cfg.dim())
            throw ConfigError("output.elements", "pair [" + std::to_string(i) + ", " + std::to_string(j) +
                                                     "] must satisfy 1 <= i <= j <= " + std::to_string(cfg.dim()));
        cfg.elements.emplace_back(i - 1, j - 1);
    }
}

void parse_tensor(const YAML::Node& node, SimConfig& cfg) {
    if (!node) return;
    reject_unknown(node, "tensor", {"grid_cm"});
    const auto g = node["grid_cm"];
    if (!g) return;
    if (!g.IsSequence() || g.size() == 0) throw ConfigError("tensor.grid_cm", "expected a non-empty list of numbers");
    for (const auto& x : g) cfg.tensor_grid_cm.push_back(finite_number(x, "tensor.grid_cm"));
}

void emit_matrix(YAML::Emitter& out, const Matrix& m) {
    out << YAML::BeginSeq;
    for (Index i = 0; i < m.rows(); ++i) {
        out << YAML::Flow << YAML::BeginSeq;
        for (Index j = 0; j < m.cols(); ++j) {
            if (m(i, j).imag() == 0.0) {
                out << m(i, j).real();
            } else {
                out << YAML::Flow << YAML::BeginSeq << m(i, j).real() << m(i, j).imag() << YAML::EndSeq;
            }
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
}

}  // namespace

DensityMatrix SimConfig::initial_state() const {
    if (initial_site) return DensityMatrix::basis_state(*initial_site, dim());
    return DensityMatrix::from_matrix(initial_matrix);
}

std::vector<std::pair<Index, Index>> SimConfig::output_elements() const {
    if (!elements.empty()) return elements;
    std::vector<std::pair<Index, Index>> all;
    for (Index i = 0; i < dim(); ++i)
        for (Index j = i; j < dim(); ++j) all.emplace_back(i, j);
    return all;
}

bool operator==(const SimConfig& a, const SimConfig& b) {
    auto same_matrix = [](const Matrix& x, const Matrix& y) {
        return x.rows() == y.rows() && x.cols() == y.cols() && (x.size() == 0 || x == y);
    };
    return a.model == b.model && same_matrix(a.hamiltonian_cm, b.hamiltonian_cm) && a.policy == b.policy &&
           a.bath.eta_cm == b.bath.eta_cm && a.bath.cutoff_cm == b.bath.cutoff_cm &&
           a.bath.temperature_K == b.bath.temperature_K && a.bath.matsubara_N == b.bath.matsubara_N &&
           a.bath.variant == b.bath.variant && a.form == b.form && a.secular == b.secular &&
           a.initial_site == b.initial_site && same_matrix(a.initial_matrix, b.initial_matrix) &&
           a.t_final_ps == b.t_final_ps && a.samples == b.samples && a.output_path == b.output_path &&
           a.elements == b.elements && a.tensor_grid_cm == b.tensor_grid_cm;
}

SimConfig parse_config(YAML::Node root_in, const Overrides& overrides) {
    YAML::Node root = root_in ? YAML::Clone(root_in) : YAML::Node(YAML::NodeType::Map);
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) throw ConfigError("<root>", "config must be a mapping");
    apply_overrides(root, overrides);
    reject_unknown(root, "", {"model", "bath", "method", "initial_state", "time", "output", "tensor"});

    const YAML::Node& r = root;
    SimConfig cfg;
    parse_model(r["model"], cfg);
    parse_bath(r["bath"], cfg);
    parse_method(r["method"], cfg);
    parse_initial_state(r["initial_state"], cfg);
    parse_time(r["time"], cfg);
    parse_output(r["output"], cfg);
    parse_tensor(r["tensor"], cfg);
    cfg.bath.validate();
    return cfg;
}

SimConfig load_config(const std::optional<std::string>& path, const Overrides& overrides) {
    if (!path) return parse_config(YAML::Node(), overrides);
    std::ifstream in(*path);
    if (!in) throw ConfigError("--config", "cannot open '" + *path + "'");
    YAML::Node root;
    try {
        root = YAML::Load(in);
    } catch (const YAML::Exception& e) {
        throw ConfigError("--config", "YAML syntax error in '" + *path + "': " + e.what());
    }
    return parse_config(root, overrides);
}

std::string to_yaml(const SimConfig& cfg) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    if (cfg.model == "custom") {
        out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << "custom";
        out << YAML::Key << "symmetrization" << YAML::Value
            << (cfg.policy == Symmetrization::average ? "average" : "upper_triangle");
        out << YAML::Key << "hamiltonian_cm" << YAML::Value;
        emit_matrix(out, cfg.hamiltonian_cm);
        out << YAML::EndMap;
    } else {
        out << YAML::Key << "model" << YAML::Value << cfg.model;
    }
    out << YAML::Key << "bath" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "eta" << YAML::Value << cfg.bath.eta_cm;
    out << YAML::Key << "cutoff_cm" << YAML::Value << cfg.bath.cutoff_cm;
    out << YAML::Key << "temperature_K" << YAML::Value << cfg.bath.temperature_K;
    out << YAML::Key << "matsubara_N" << YAML::Value << cfg.bath.matsubara_N;
    out << YAML::EndMap;
    out << YAML::Key << "method" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "form" << YAML::Value << to_string(cfg.form);
    out << YAML::Key << "secular" << YAML::Value << cfg.secular;
    out << YAML::Key << "variant" << YAML::Value << to_string(cfg.bath.variant);
    out << YAML::EndMap;
    out << YAML::Key << "initial_state" << YAML::Value;
    if (cfg.initial_site) {
        out << *cfg.initial_site + 1;
    } else {
        emit_matrix(out, cfg.initial_matrix);
    }
    out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "t_final_ps" << YAML::Value << cfg.t_final_ps;
    out << YAML::Key << "samples" << YAML::Value << cfg.samples;
    out << YAML::EndMap;
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "path" << YAML::Value << cfg.output_path;
    out << YAML::Key << "elements" << YAML::Value;
    if (cfg.elements.empty()) {
        out << "all";
    } else {
        out << YAML::BeginSeq;
        for (const auto& [i, j] : cfg.elements) out << YAML::Flow << YAML::BeginSeq << i + 1 << j + 1 << YAML::EndSeq;
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    if (!cfg.tensor_grid_cm.empty()) {
        out << YAML::Key << "tensor" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "grid_cm" << YAML::Value << YAML::Flow << cfg.tensor_grid_cm;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace nsme::cli
