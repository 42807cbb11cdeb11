#include "ethlab/config.hpp"

#include "ethlab/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ethlab {

using nlohmann::json;

namespace {

constexpr std::string_view kExperimentNames[] = {"eth_scaling", "transpose_scaling", "single_g", "two_g",
                                                 "variance",    "renorm",            "rigidity"};

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

const json& require(const json& object, const char* key, std::string_view where) {
    const auto it = object.find(key);
    if (it == object.end()) throw ConfigError("missing key '" + std::string(key) + "' in " + std::string(where));
    return *it;
}

template <typename T>
T get_as(const json& value, std::string_view what) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("wrong type for " + std::string(what));
    }
}

double get_number(const json& value, std::string_view what) {
    if (!value.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return value.get<double>();
}

EnsembleSpec parse_ensemble(const json& j) {
    if (j.is_string()) return builtin(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("ensemble must be a builtin name or an object");
    if (j.contains("builtin")) {
        reject_unknown(j, {"builtin"}, "ensemble");
        return builtin(get_as<std::string>(j["builtin"], "ensemble.builtin"));
    }
    reject_unknown(j, {"symmetry", "entry_law", "sigma", "w2", "label"}, "ensemble");
    EnsembleSpec spec;
    spec.symmetry = symmetry_from_string(get_as<std::string>(require(j, "symmetry", "ensemble"), "symmetry"));
    if (j.contains("entry_law")) spec.entry_law = entry_law_from_string(get_as<std::string>(j["entry_law"], "entry_law"));
    spec.sigma = get_number(require(j, "sigma", "ensemble"), "ensemble.sigma");
    spec.w2 = get_number(require(j, "w2", "ensemble"), "ensemble.w2");
    if (j.contains("label")) spec.label = get_as<std::string>(j["label"], "ensemble.label");
    return spec;
}

ZSpec parse_z(const json& j) {
    if (!j.is_object()) throw ConfigError("z_grid entries must be objects");
    if (j.contains("re") || j.contains("im")) {
        reject_unknown(j, {"re", "im"}, "z_grid entry");
        return ZSpec::direct({get_number(require(j, "re", "z_grid entry"), "re"),
                              get_number(require(j, "im", "z_grid entry"), "im")});
    }
    if (j.contains("J_exponent")) {
        reject_unknown(j, {"E", "J_exponent"}, "z_grid entry");
        return ZSpec::exponent(get_number(require(j, "E", "z_grid entry"), "E"), get_number(j["J_exponent"], "J_exponent"));
    }
    reject_unknown(j, {"E", "J"}, "z_grid entry");
    return ZSpec::level(get_number(require(j, "E", "z_grid entry"), "E"),
                        get_number(require(j, "J", "z_grid entry"), "J"));
}

json z_to_json(const ZSpec& z) {
    switch (z.mode) {
    case ZSpec::Mode::direct:
        return {{"re", z.z.real()}, {"im", z.z.imag()}};
    case ZSpec::Mode::energy_level:
        return {{"E", z.energy}, {"J", z.j}};
    case ZSpec::Mode::energy_exponent:
        return {{"E", z.energy}, {"J_exponent", z.j_exponent}};
    }
    return {};
}

} // namespace

std::string_view to_string(Experiment e) { return kExperimentNames[static_cast<int>(e)]; }

Experiment experiment_from_string(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kExperimentNames); ++i) {
        if (kExperimentNames[i] == name) return static_cast<Experiment>(i);
    }
    throw InvalidArgument("unknown experiment '" + std::string(name) + "'");
}

Observable ObservableConfig::build(long n) const {
    if (kind == "traceless_signs") return observables::traceless_signs(n);
    if (kind == "traceless_projector") return observables::traceless_projector(n, k > 0 ? k : n / 2);
    if (kind == "random_traceless") return observables::random_traceless(n, seed);
    if (kind == "identity") return observables::identity(n);
    throw InvalidArgument("unknown observable kind '" + kind + "'");
}

ZSpec ZSpec::direct(cdouble z) {
    ZSpec s;
    s.mode = Mode::direct;
    s.z = z;
    return s;
}

ZSpec ZSpec::level(double energy, double j) {
    ZSpec s;
    s.mode = Mode::energy_level;
    s.energy = energy;
    s.j = j;
    return s;
}

ZSpec ZSpec::exponent(double energy, double j_exponent) {
    ZSpec s;
    s.mode = Mode::energy_exponent;
    s.energy = energy;
    s.j_exponent = j_exponent;
    return s;
}

cdouble ZSpec::resolve(long n) const {
    switch (mode) {
    case Mode::direct:
        return z;
    case Mode::energy_level:
        return {energy, semicircle::solve_eta(energy, j, n)};
    case Mode::energy_exponent:
        return {energy, semicircle::solve_eta(energy, std::pow(static_cast<double>(n), j_exponent), n)};
    }
    return z;
}

void ExperimentConfig::validate() const {
    try {
        ensemble.with_dimension(1).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("ensemble: ") + e.what());
    }
    if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw ConfigError("n_grid entries must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly ascending");
    }
    if (trials_per_n < 1) throw ConfigError("trials_per_n must be >= 1");
    if (experiment == Experiment::variance && trials_per_n < 500) {
        throw ConfigError("variance needs trials_per_n >= 500");
    }
    if (window < 0) throw ConfigError("window must be >= 0");
    const bool needs_z = experiment == Experiment::single_g || experiment == Experiment::two_g ||
                         experiment == Experiment::variance || experiment == Experiment::renorm;
    if (needs_z && z_grid.empty()) throw ConfigError("z_grid must not be empty for " + std::string(to_string(experiment)));
    for (const ZSpec& z : z_grid) {
        if (z.mode == ZSpec::Mode::direct && z.z.imag() == 0.0) throw ConfigError("z_grid: Im z must be nonzero");
        if (z.mode == ZSpec::Mode::energy_level && !(z.j > 0.0)) throw ConfigError("z_grid: J must be positive");
    }
    for (double s : sigma_grid) {
        if (!(std::abs(s) <= 0.95)) throw ConfigError("sigma_grid entries must lie in [-0.95, 0.95]");
    }
    const std::set<std::string> kinds{"traceless_signs", "traceless_projector", "random_traceless", "identity"};
    if (!kinds.contains(observable.kind)) throw ConfigError("unknown observable kind '" + observable.kind + "'");
    if (observable.k < 0) throw ConfigError("observable.k must be >= 0");
    if (output_path.empty()) throw ConfigError("output.path must not be empty");
}

ExperimentConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, {"experiment", "ensemble", "n_grid", "trials_per_n", "base_seed", "observable", "z_grid",
                         "sigma_grid", "window", "output"},
                   "config");

    ExperimentConfig c;
    try {
        c.experiment = experiment_from_string(get_as<std::string>(require(doc, "experiment", "config"), "experiment"));
        c.ensemble = parse_ensemble(require(doc, "ensemble", "config"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const json& grid = require(doc, "n_grid", "config");
    if (!grid.is_array()) throw ConfigError("n_grid must be an array");
    for (const auto& v : grid) {
        if (!v.is_number_integer()) throw ConfigError("n_grid entries must be integers");
        c.n_grid.push_back(v.get<long>());
    }
    if (doc.contains("trials_per_n")) {
        if (!doc["trials_per_n"].is_number_integer()) throw ConfigError("trials_per_n must be an integer");
        c.trials_per_n = doc["trials_per_n"].get<long>();
    }
    if (doc.contains("base_seed")) {
        const json& s = doc["base_seed"];
        if (s.is_number_unsigned()) {
            c.base_seed = s.get<std::uint64_t>();
        } else if (s.is_string()) {
            try {
                c.base_seed = std::stoull(s.get<std::string>(), nullptr, 0);
            } catch (const std::exception&) {
                throw ConfigError("base_seed string is not an integer");
            }
        } else {
            throw ConfigError("base_seed must be a non-negative integer");
        }
    }
    if (doc.contains("observable")) {
        const json& o = doc["observable"];
        if (!o.is_object()) throw ConfigError("observable must be an object");
        reject_unknown(o, {"kind", "k", "seed"}, "observable");
        c.observable.kind = get_as<std::string>(require(o, "kind", "observable"), "observable.kind");
        if (o.contains("k")) c.observable.k = get_as<long>(o["k"], "observable.k");
        if (o.contains("seed")) c.observable.seed = get_as<std::uint64_t>(o["seed"], "observable.seed");
    }
    if (doc.contains("z_grid")) {
        if (!doc["z_grid"].is_array()) throw ConfigError("z_grid must be an array");
        for (const auto& z : doc["z_grid"]) c.z_grid.push_back(parse_z(z));
    }
    if (doc.contains("sigma_grid")) {
        if (!doc["sigma_grid"].is_array()) throw ConfigError("sigma_grid must be an array");
        for (const auto& s : doc["sigma_grid"]) c.sigma_grid.push_back(get_number(s, "sigma_grid entry"));
    }
    if (doc.contains("window")) c.window = get_as<long>(doc["window"], "window");
    if (doc.contains("output")) {
        const json& o = doc["output"];
        if (!o.is_object()) throw ConfigError("output must be an object");
        reject_unknown(o, {"path", "format"}, "output");
        if (o.contains("path")) c.output_path = get_as<std::string>(o["path"], "output.path");
        if (o.contains("format")) {
            try {
                c.format = output_format_from_string(get_as<std::string>(o["format"], "output.format"));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string to_json(const ExperimentConfig& c) {
    json doc;
    doc["experiment"] = std::string(to_string(c.experiment));
    doc["ensemble"] = {{"symmetry", std::string(to_string(c.ensemble.symmetry))},
                       {"entry_law", std::string(to_string(c.ensemble.entry_law))},
                       {"sigma", c.ensemble.sigma},
                       {"w2", c.ensemble.w2},
                       {"label", c.ensemble.label}};
    doc["n_grid"] = c.n_grid;
    doc["trials_per_n"] = c.trials_per_n;
    doc["base_seed"] = c.base_seed;
    doc["observable"] = {{"kind", c.observable.kind}, {"k", c.observable.k}, {"seed", c.observable.seed}};
    doc["z_grid"] = json::array();
    for (const ZSpec& z : c.z_grid) doc["z_grid"].push_back(z_to_json(z));
    doc["sigma_grid"] = c.sigma_grid;
    doc["window"] = c.window;
    doc["output"] = {{"path", c.output_path}, {"format", std::string(to_string(c.format))}};
    return doc.dump(2);
}

ExperimentConfig default_config(Experiment experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.ensemble = builtin("gue");
    c.trials_per_n = 20;
    c.base_seed = 0x5eed;
    switch (experiment) {
    case Experiment::eth_scaling:
    case Experiment::transpose_scaling:
        c.n_grid = {128, 256, 512, 1024};
        break;
    case Experiment::single_g:
        c.n_grid = {512};
        for (int k = 0; k < 10; ++k) c.z_grid.push_back(ZSpec::exponent(-1.5 + 3.0 * k / 9.0, 0.3));
        break;
    case Experiment::two_g:
        c.n_grid = {512};
        c.z_grid = {ZSpec::direct({0.0, 2.0}), ZSpec::direct({0.0, 1.0}), ZSpec::direct({0.0, 0.2}),
                    ZSpec::direct({1.0, 0.1})};
        c.sigma_grid = {-0.9, -0.5, 0.0, 0.5, 0.9};
        break;
    case Experiment::variance:
        c.n_grid = {512};
        c.trials_per_n = 2000;
        c.z_grid = {ZSpec::direct({0.0, 0.1})};
        break;
    case Experiment::renorm:
        c.n_grid = {256};
        c.z_grid = {ZSpec::direct({0.0, 0.1})};
        break;
    case Experiment::rigidity:
        c.n_grid = {512};
        break;
    }
    return c;
}

} // namespace ethlab
