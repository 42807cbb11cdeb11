// ethlab: command-line front end to the experiment harness.
//
//   ethlab eth --threads 4 --out eth.csv
//   ethlab locallaw --law two_g --n 256 --trials 5
//   ethlab run --config experiment.json
//   ethlab predict --z 0,1 --kind GG_plain

#include "ethlab/ethlab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <iostream>
#include <optional>

namespace {

using namespace ethlab;

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
    std::string format;
};

struct ExperimentOptions {
    std::string ensemble;
    std::vector<long> n_grid;
    std::optional<long> trials;
    std::string observable;
    std::string law = "single_g";
};

cdouble parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("complex", "expected re,im but got '" + text + "'");
    double re = 0.0, im = 0.0;
    const auto a = std::from_chars(text.data(), text.data() + comma, re);
    const auto b = std::from_chars(text.data() + comma + 1, text.data() + text.size(), im);
    if (a.ec != std::errc() || b.ec != std::errc() || b.ptr != text.data() + text.size()) {
        throw CLI::ValidationError("complex", "cannot parse '" + text + "'");
    }
    return {re, im};
}

ExperimentConfig build_config(const GlobalOptions& g, const ExperimentOptions& o, std::optional<Experiment> expected) {
    ExperimentConfig cfg;
    if (!g.config.empty()) {
        cfg = load_config(g.config);
        if (expected && cfg.experiment != *expected) {
            throw ConfigError("config describes experiment '" + std::string(to_string(cfg.experiment)) +
                              "' but the subcommand runs '" + std::string(to_string(*expected)) + "'");
        }
    } else if (expected) {
        cfg = default_config(*expected);
    } else {
        throw ConfigError("run needs --config");
    }
    try {
        if (!o.ensemble.empty()) cfg.ensemble = builtin(o.ensemble);
        if (!o.observable.empty()) cfg.observable.kind = o.observable;
        if (!g.format.empty()) cfg.format = output_format_from_string(g.format);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!o.n_grid.empty()) cfg.n_grid = o.n_grid;
    if (o.trials) cfg.trials_per_n = *o.trials;
    if (g.seed) cfg.base_seed = *g.seed;
    if (!g.out.empty()) cfg.output_path = g.out;
    cfg.validate();
    return cfg;
}

int run_experiment(const ExperimentConfig& cfg, std::optional<int> threads) {
    const Table table = run(cfg, resolve_workers(threads));
    emit(table, cfg.format, cfg.output_path);
    const std::vector<Check> checks = assess(cfg, table);
    for (const Check& c : checks) {
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    return all_passed(checks) ? 0 : 1;
}

nlohmann::json complex_json(cdouble z) { return {{"re", z.real()}, {"im", z.imag()}}; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wigner-matrix eigenvector thermalization and local-law laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Base seed, overrides the config");
    app.add_option("--threads", g.threads, "Worker threads (default: ETHLAB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output path, '-' for stdout");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    ExperimentOptions o;
    std::optional<Experiment> chosen;
    auto experiment_command = [&](const char* name, const char* help, Experiment e) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--ensemble", o.ensemble, "Builtin ensemble, e.g. gue, goe, complex_sigma(0.5)");
        sub->add_option("--n", o.n_grid, "Dimensions (ascending)");
        sub->add_option("--trials", o.trials, "Trials per N");
        sub->add_option("--observable", o.observable, "Observable kind");
        sub->callback([&chosen, e] { chosen = e; });
        return sub;
    };
    experiment_command("eth", "ETH overlap scaling and Lambda/Pi functionals", Experiment::eth_scaling);
    experiment_command("transpose", "Overlaps with the conjugate eigenbasis", Experiment::transpose_scaling);
    CLI::App* locallaw = experiment_command("locallaw", "Single- and two-resolvent local laws", Experiment::single_g);
    locallaw->add_option("--law", o.law, "Which family")->check(CLI::IsMember({"single_g", "two_g"}));
    experiment_command("variance", "Monte Carlo variance of <Im G A>", Experiment::variance);
    experiment_command("renorm", "Renormalized products and exact identities", Experiment::renorm);
    experiment_command("rigidity", "Eigenvalue rigidity", Experiment::rigidity);
    CLI::App* run_cmd = app.add_subcommand("run", "Run whatever experiment --config describes");

    CLI::App* predict = app.add_subcommand("predict", "Deterministic semicircle quantities");
    std::string z1_text = "0,1", z2_text, kind_text;
    double sigma = 0.0, pairing = 1.0;
    long n = 0, quantile_index = 0;
    std::optional<double> eta_energy, eta_level;
    predict->add_option("--z", z1_text, "Spectral parameter re,im");
    predict->add_option("--z2", z2_text, "Second spectral parameter (default: --z)");
    predict->add_option("--kind", kind_text, "Prediction / error scale kind");
    predict->add_option("--sigma", sigma, "E chi_od^2 for the transpose laws");
    predict->add_option("--pairing", pairing, "<A A'> for observable laws");
    predict->add_option("--n", n, "Dimension for error scales, quantiles and eta");
    predict->add_option("--quantile", quantile_index, "Classical location gamma_i (needs --n)");
    predict->add_option("--eta-energy", eta_energy, "E for the eta(E, J) solver (needs --n, --eta-level)");
    predict->add_option("--eta-level", eta_level, "J for the eta(E, J) solver");

    CLI::App* audit = app.add_subcommand("audit", "Entry-moment audit of an ensemble");
    std::string audit_ensemble = "gue";
    long audit_samples = 100000;
    audit->add_option("--ensemble", audit_ensemble, "Builtin ensemble");
    audit->add_option("--samples", audit_samples, "Scalar draws");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed()) return run_experiment(build_config(g, o, std::nullopt), g.threads);
        if (chosen) {
            Experiment e = *chosen;
            if (e == Experiment::single_g && o.law == "two_g") e = Experiment::two_g;
            return run_experiment(build_config(g, o, e), g.threads);
        }
        if (predict->parsed()) {
            const cdouble z1 = parse_complex(z1_text);
            const cdouble z2 = z2_text.empty() ? z1 : parse_complex(z2_text);
            nlohmann::json out;
            const SpectralPoint p = semicircle::point(z1);
            out["z"] = complex_json(z1);
            out["m"] = complex_json(p.m);
            out["rho"] = p.rho;
            out["dm_dz"] = complex_json(semicircle::stieltjes_derivative(z1));
            if (!kind_text.empty()) {
                const ErrorScaleKind kind = error_scale_kind_from_string(kind_text);
                out["kind"] = kind_text;
                out["z2"] = complex_json(z2);
                out["prediction"] = complex_json(semicircle::predict(kind, z1, z2, sigma, pairing));
                if (n > 0) {
                    semicircle::ScaleFactors f;
                    f.pairing = pairing;
                    out["error_scale"] = semicircle::error_scale(kind, z1, z2, n, f);
                }
            }
            if (quantile_index > 0) out["quantile"] = semicircle::quantile(quantile_index, n);
            if (eta_energy || eta_level) {
                if (!eta_energy || !eta_level) throw InvalidArgument("--eta-energy and --eta-level go together");
                out["eta"] = semicircle::solve_eta(*eta_energy, *eta_level, n);
            }
            std::cout << out.dump(2) << '\n';
            return 0;
        }
        if (audit->parsed()) {
            const MomentAudit a = moment_audit(builtin(audit_ensemble), audit_samples, g.seed.value_or(0));
            auto est = [](const MomentEstimate& m) {
                return nlohmann::json{{"mean", complex_json(m.mean)},
                                      {"std_error", m.std_error},
                                      {"population", m.population},
                                      {"flagged", m.flagged}};
            };
            nlohmann::json out{{"ensemble", audit_ensemble},
                               {"n_samples", a.n_samples},
                               {"mean_od", est(a.mean_od)},
                               {"abs2_od", est(a.abs2_od)},
                               {"square_od", est(a.square_od)},
                               {"square_d", est(a.square_d)},
                               {"abs_moments_od", a.abs_moments_od},
                               {"max_abs_moment", a.max_abs_moment}};
            std::cout << out.dump(2) << '\n';
            return a.any_flagged() ? 1 : 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
