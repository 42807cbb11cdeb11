#include "ethlab/harness.hpp"

#include "ethlab/error.hpp"
#include "ethlab/eth_stats.hpp"
#include "ethlab/locallaw.hpp"
#include "ethlab/parallel.hpp"
#include "ethlab/rng.hpp"
#include "ethlab/scaling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <tuple>
#include <set>
#include <thread>

namespace ethlab {

namespace {

const std::vector<Column>& common_columns() {
    static const std::vector<Column> cols{
        {"experiment", ColumnType::text},   {"kind", ColumnType::text},
        {"N", ColumnType::integer},         {"trial", ColumnType::integer},
        {"seed", ColumnType::integer},      {"z1_re", ColumnType::real},
        {"z1_im", ColumnType::real},        {"z2_re", ColumnType::real},
        {"z2_im", ColumnType::real},        {"empirical_re", ColumnType::real},
        {"empirical_im", ColumnType::real}, {"prediction_re", ColumnType::real},
        {"prediction_im", ColumnType::real}, {"abs_error", ColumnType::real},
        {"bound", ColumnType::real},        {"ratio", ColumnType::real},
        {"admissible", ColumnType::boolean}, {"threshold", ColumnType::real},
        {"pass", ColumnType::boolean},
    };
    return cols;
}

struct Task {
    const ExperimentConfig& config;
    EnsembleSpec spec;
    long n;
    long trial;
    std::uint64_t seed;
};

Table::RowBuilder base_row(const Table& table, const Task& task, std::string_view kind) {
    auto row = table.row();
    row.set("experiment", std::string(to_string(task.config.experiment)))
        .set("kind", std::string(kind))
        .set("N", task.n)
        .set("trial", task.trial)
        .set("seed", task.seed);
    return row;
}

void set_z(Table::RowBuilder& row, cdouble z1, cdouble z2) {
    row.set("z1_re", z1.real()).set("z1_im", z1.imag()).set("z2_re", z2.real()).set("z2_im", z2.imag());
}

// Fills the comparison columns; pass is left blank when there is no threshold.
void set_comparison(Table::RowBuilder& row, cdouble empirical, cdouble prediction, double abs_error, double bound,
                    double ratio, bool admissible, std::optional<double> threshold) {
    row.set("empirical_re", empirical.real())
        .set("empirical_im", empirical.imag())
        .set("prediction_re", prediction.real())
        .set("prediction_im", prediction.imag())
        .set("abs_error", abs_error)
        .set("bound", bound)
        .set("ratio", ratio)
        .set("admissible", admissible);
    if (threshold) row.set("threshold", *threshold).set("pass", ratio <= *threshold);
}

Table::RowBuilder law_row(const Table& table, const Task& task, const LawReport& r) {
    auto row = base_row(table, task, to_string(r.kind));
    set_z(row, r.z1, r.z2);
    set_comparison(row, r.empirical, r.prediction, r.abs_error, r.bound, r.ratio, r.regime.admissible, slack(task.n));
    return row;
}

// Exact identities checked to a fixed absolute tolerance.
Table::RowBuilder identity_row(const Table& table, const Task& task, std::string_view kind, cdouble z1, cdouble z2,
                               double residual, double tolerance) {
    auto row = base_row(table, task, kind);
    set_z(row, z1, z2);
    set_comparison(row, residual, 0.0, residual, 1.0, residual, true, tolerance);
    return row;
}

void invalid_z_row(Table& table, const Task& task, const ZSpec& z) {
    auto row = base_row(table, task, "invalid_z");
    const cdouble shown = z.mode == ZSpec::Mode::direct ? z.z : cdouble(z.energy, std::nan(""));
    set_z(row, shown, shown);
    row.set("admissible", false);
    table.push(std::move(row));
}

std::optional<cdouble> try_resolve(const ZSpec& z, long n) {
    try {
        return z.resolve(n);
    } catch (const std::domain_error&) {
        return std::nullopt;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

long window_for(const ExperimentConfig& config, long n) {
    return std::clamp(config.window > 0 ? config.window : default_window(n), 1L, n);
}

void run_eth(Table& table, const Task& task) {
    const WignerSample w = sample(task.spec, task.seed);
    const SpectralData s = diagonalize(w);
    const Observable a = task.config.observable.build(task.n);
    const long j = window_for(task.config, task.n);
    const EthSummary sum = summarize(s, a, j);
    const double max_total = std::max(sum.max_diag_dev, sum.max_offdiag);
    const double bound = 1.0 / std::sqrt(static_cast<double>(task.n));

    auto row = base_row(table, task, "eth_overlap");
    set_comparison(row, max_total, 0.0, max_total, bound, max_total / bound, true, std::nullopt);
    row.set("j", j)
        .set("max_diag_dev", sum.max_diag_dev)
        .set("max_offdiag", sum.max_offdiag)
        .set("max_conj_dev", sum.max_conj_dev)
        .set("xi_j", sum.xi_j)
        .set("xi_bar_j", sum.xi_bar_j)
        .set("lambda_j", sum.lambda_j)
        .set("pi_j", sum.pi_j);
    table.push(std::move(row));
}

void run_transpose(Table& table, const Task& task) {
    const WignerSample w = sample(task.spec, task.seed);
    const SpectralData s = diagonalize(w);
    const OverlapMatrix t = transpose_overlap(s);
    const long n = task.n;
    const long j = window_for(task.config, n);
    const Eigen::MatrixXd mod = t.entries.cwiseAbs();
    double diag_dev = 0.0, anti_dev = 0.0, antisym = 0.0;
    const Eigen::VectorXd& ev = s.eigenvalues();
    for (long i = 0; i < n; ++i) {
        diag_dev = std::max(diag_dev, std::abs(mod(i, i) - 1.0));
        anti_dev = std::max(anti_dev, std::abs(mod(i, n - 1 - i) - 1.0));
        antisym = std::max(antisym, std::abs(ev(i) + ev(n - 1 - i)));
    }
    const double max_abs = mod.maxCoeff();
    const double bound = 1.0 / std::sqrt(static_cast<double>(n));

    auto row = base_row(table, task, "transpose_overlap");
    set_comparison(row, max_abs, 0.0, max_abs, bound, max_abs / bound, true, std::nullopt);
    row.set("j", j)
        .set("pi_j", xi_window(t, j))
        .set("diag_unit_dev", diag_dev)
        .set("antidiag_unit_dev", anti_dev)
        .set("eigen_antisymmetry", antisym);
    table.push(std::move(row));
}

void run_single_g(Table& table, const Task& task) {
    const SpectralData s = diagonalize(sample(task.spec, task.seed));
    ChainEvaluator eval(s);
    const Observable a = task.config.observable.build(task.n);
    const Observable id = observables::identity(task.n);
    const Eigen::VectorXcd e1 = observables::unit_coordinate(task.n, 0);
    const Eigen::VectorXcd flat = observables::flat_vector(task.n);
    for (const ZSpec& zs : task.config.z_grid) {
        const auto z = try_resolve(zs, task.n);
        if (!z) {
            invalid_z_row(table, task, zs);
            continue;
        }
        table.push(law_row(table, task, check_single_g(eval, *z, a)));
        if (!a.is_identity()) table.push(law_row(table, task, check_single_g(eval, *z, id)));
        table.push(law_row(table, task, check_iso_single_g(eval, *z, e1, e1)));
        table.push(law_row(table, task, check_iso_single_g(eval, *z, flat, flat)));

        // Ward identity G G* = Im G / Im z, relative error.
        ChainSpec gg = ChainSpec::trace({{*z}, {*z, ResolventVariant::adjoint}});
        ChainSpec im = ChainSpec::trace({{*z, ResolventVariant::imaginary_part}});
        const cdouble lhs = eval.value(gg);
        const cdouble rhs = eval.value(im) / z->imag();
        const double err = std::abs(lhs - rhs);
        auto row = base_row(table, task, "ward_identity");
        set_z(row, *z, *z);
        set_comparison(row, lhs, rhs, err, std::abs(rhs), err / std::abs(rhs), true, 1e-12);
        table.push(std::move(row));
    }
}

void run_two_g(Table& table, const Task& task) {
    const SpectralData s = diagonalize(sample(task.spec, task.seed));
    ChainEvaluator eval(s);
    const Observable a = task.config.observable.build(task.n);
    const Eigen::VectorXcd e1 = observables::unit_coordinate(task.n, 0);
    const double sigma = task.spec.sigma;
    const bool transpose_ok = std::abs(sigma) <= 0.95;

    std::vector<cdouble> zs;
    for (const ZSpec& spec : task.config.z_grid) {
        const auto z = try_resolve(spec, task.n);
        if (!z) {
            invalid_z_row(table, task, spec);
            continue;
        }
        zs.push_back(*z);
    }

    auto push = [&](const LawReport& r, double sig, double lp) {
        auto row = law_row(table, task, r);
        row.set("sigma", sig);
        if (!std::isnan(lp)) row.set("lambda_plus", lp);
        table.push(std::move(row));
    };
    const double none = std::nan("");
    for (const cdouble z : zs) {
        TwoGOptions opts;
        opts.sigma = sigma;
        push(check_two_g(eval, ErrorScaleKind::GAGA, z, z, a, a, opts), sigma, none);
        push(check_two_g(eval, ErrorScaleKind::ImAImA, z, z, a, a, opts), sigma, none);
        push(check_two_g(eval, ErrorScaleKind::GG_plain, z, z, a, a, opts), sigma, none);
        if (transpose_ok) {
            push(check_two_g(eval, ErrorScaleKind::GGt_sigma, z, z, a, a, opts), sigma, none);
            push(check_two_g(eval, ErrorScaleKind::ImImT, z, z, a, a, opts), sigma, none);
        }
        if (a.traceless()) {
            const double lp = lambda_plus(s, a, regime(z, z, task.n).big_l);
            for (const LawReport& r : check_bounds_two_g(eval, z, z, a, lp)) push(r, sigma, lp);
            push(check_iso_two_g(eval, z, z, a, e1, e1, lp), sigma, lp);
        }
    }

    // Transpose laws on companion complex_sigma ensembles of the same dimension.
    for (std::size_t k = 0; k < task.config.sigma_grid.size(); ++k) {
        const double sk = task.config.sigma_grid[k];
        EnsembleSpec companion = task.spec;
        companion.symmetry = Symmetry::complex_hermitian;
        companion.sigma = sk;
        companion.w2 = 1.0 + sk;
        companion.label = "complex_sigma";
        const SpectralData sc = diagonalize(sample(companion, mix_keys({task.seed, k + 1})));
        ChainEvaluator ec(sc);
        TwoGOptions opts;
        opts.sigma = sk;
        for (const cdouble z : zs) {
            push(check_two_g(ec, ErrorScaleKind::GGt_sigma, z, z, a, a, opts), sk, none);
            push(check_two_g(ec, ErrorScaleKind::ImImT, z, z, a, a, opts), sk, none);
        }
    }
}

void run_renorm(Table& table, const Task& task) {
    const WignerSample w = sample(task.spec, task.seed);
    const SpectralData s = diagonalize(w);
    Renormalizer ren(w, s);
    const Observable a = task.config.observable.build(task.n);
    const Observable id = observables::identity(task.n);
    for (const ZSpec& spec : task.config.z_grid) {
        const auto zo = try_resolve(spec, task.n);
        if (!zo) {
            invalid_z_row(table, task, spec);
            continue;
        }
        const cdouble z = *zo;
        const ErrorScaleKind single = a.is_identity() ? ErrorScaleKind::renorm_WG : ErrorScaleKind::renorm_WGA;
        table.push(law_row(table, task,
                           make_report(single, task.n, z, z, ren.wg(z, a), 0.0,
                                       semicircle::error_scale(single, z, z, task.n))));
        if (!a.is_identity()) {
            table.push(law_row(table, task,
                               make_report(ErrorScaleKind::renorm_WG, task.n, z, z, ren.wg(z, id), 0.0,
                                           semicircle::error_scale(ErrorScaleKind::renorm_WG, z, z, task.n))));
        }
        if (a.traceless()) {
            const double lp = lambda_plus(s, a, regime(z, z, task.n).big_l);
            semicircle::ScaleFactors f;
            f.lambda_a = lp;
            f.lambda_b = lp;
            auto row = law_row(table, task,
                               make_report(ErrorScaleKind::renorm_WGAGA, task.n, z, z, ren.wg1g2(z, z, a, a), 0.0,
                                           semicircle::error_scale(ErrorScaleKind::renorm_WGAGA, z, z, task.n, f)));
            row.set("lambda_plus", lp);
            table.push(std::move(row));
        }
        table.push(identity_row(table, task, "recomposition", z, z, ren.recomposition_residual(z), 1e-10));
        table.push(identity_row(table, task, "two_g_expansion", z, z,
                                ren.two_g_expansion_residual(z, z, a.matrix(), a.matrix()), 1e-10));
    }
}

void run_rigidity(Table& table, const Task& task) {
    const SpectralData s = diagonalize(sample(task.spec, task.seed));
    const RigidityProfile p = rigidity_profile(s);
    auto row = base_row(table, task, "rigidity");
    set_comparison(row, p.max, 0.0, p.max, 1.0, p.max, true, slack(task.n));
    row.set("argmax", p.argmax);
    table.push(std::move(row));
}

void run_variance(Table& table, const ExperimentConfig& config, long n, int workers) {
    const EnsembleSpec spec = config.ensemble.with_dimension(n);
    const Observable a = config.observable.build(n);
    const std::uint64_t seed = trial_seed(config.base_seed, n, 0, config.experiment);
    const Task task{config, spec, n, 0, seed};
    for (std::size_t k = 0; k < config.z_grid.size(); ++k) {
        const auto z = try_resolve(config.z_grid[k], n);
        if (!z) {
            invalid_z_row(table, task, config.z_grid[k]);
            continue;
        }
        const VarianceReport v =
            check_variance_im_ga(spec, *z, a, config.trials_per_n, mix_keys({seed, k}), workers);
        const double err = std::abs(v.empirical - v.prediction);
        auto row = base_row(table, task, to_string(ErrorScaleKind::variance_ImGA));
        set_z(row, *z, *z);
        set_comparison(row, v.empirical, v.prediction, err, v.prediction, err / v.prediction,
                       regime(*z, *z, n).admissible, 0.15);
        row.set("n_trials", v.n_trials)
            .set("variance_ratio", v.ratio)
            .set("ci_low", v.ci_low)
            .set("ci_high", v.ci_high)
            .set("mean", v.mean);
        table.push(std::move(row));
    }
}

std::uint64_t experiment_tag(Experiment e) { return 0xe7a0000ULL + static_cast<std::uint64_t>(e); }

} // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, long n, long trial, Experiment experiment) {
    return mix_keys({base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial),
                     experiment_tag(experiment)});
}

int resolve_workers(std::optional<int> requested) {
    if (requested) {
        if (*requested < 1) throw InvalidArgument("thread count must be >= 1");
        return *requested;
    }
    if (const char* env = std::getenv("ETHLAB_THREADS"); env && *env) {
        int value = 0;
        const std::string_view text(env);
        const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value < 1) {
            throw ConfigError("ETHLAB_THREADS must be a positive integer");
        }
        return value;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::vector<Column> schema(Experiment experiment) {
    std::vector<Column> cols = common_columns();
    auto add = [&](std::initializer_list<Column> extra) { cols.insert(cols.end(), extra); };
    switch (experiment) {
    case Experiment::eth_scaling:
        add({{"j", ColumnType::integer},
             {"max_diag_dev", ColumnType::real},
             {"max_offdiag", ColumnType::real},
             {"max_conj_dev", ColumnType::real},
             {"xi_j", ColumnType::real},
             {"xi_bar_j", ColumnType::real},
             {"lambda_j", ColumnType::real},
             {"pi_j", ColumnType::real}});
        break;
    case Experiment::transpose_scaling:
        add({{"j", ColumnType::integer},
             {"pi_j", ColumnType::real},
             {"diag_unit_dev", ColumnType::real},
             {"antidiag_unit_dev", ColumnType::real},
             {"eigen_antisymmetry", ColumnType::real}});
        break;
    case Experiment::two_g:
        add({{"sigma", ColumnType::real}, {"lambda_plus", ColumnType::real}});
        break;
    case Experiment::variance:
        add({{"n_trials", ColumnType::integer},
             {"variance_ratio", ColumnType::real},
             {"ci_low", ColumnType::real},
             {"ci_high", ColumnType::real},
             {"mean", ColumnType::real}});
        break;
    case Experiment::renorm:
        add({{"lambda_plus", ColumnType::real}});
        break;
    case Experiment::rigidity:
        add({{"argmax", ColumnType::integer}});
        break;
    case Experiment::single_g:
        break;
    }
    return cols;
}

Table run(const ExperimentConfig& config, int workers) {
    config.validate();
    const std::vector<Column> cols = schema(config.experiment);
    Table out(cols);

    if (config.experiment == Experiment::variance) {
        for (const long n : config.n_grid) run_variance(out, config, n, workers);
        out.sort_rows();
        return out;
    }

    std::vector<Task> tasks;
    for (const long n : config.n_grid) {
        const EnsembleSpec spec = config.ensemble.with_dimension(n);
        for (long t = 0; t < config.trials_per_n; ++t) {
            tasks.push_back({config, spec, n, t, trial_seed(config.base_seed, n, t, config.experiment)});
        }
    }
    std::vector<Table> parts(tasks.size(), Table(cols));
    parallel_for(tasks.size(), workers, [&](std::size_t i) {
        switch (config.experiment) {
        case Experiment::eth_scaling:
            run_eth(parts[i], tasks[i]);
            break;
        case Experiment::transpose_scaling:
            run_transpose(parts[i], tasks[i]);
            break;
        case Experiment::single_g:
            run_single_g(parts[i], tasks[i]);
            break;
        case Experiment::two_g:
            run_two_g(parts[i], tasks[i]);
            break;
        case Experiment::renorm:
            run_renorm(parts[i], tasks[i]);
            break;
        case Experiment::rigidity:
            run_rigidity(parts[i], tasks[i]);
            break;
        case Experiment::variance:
            break;
        }
    });
    for (const Table& part : parts) out.append(part);
    out.sort_rows();
    return out;
}

namespace {

Check slope_check(const Table& table, std::string_view kind, std::string name) {
    Check c{std::move(name), false, ""};
    try {
        const ScalingFit fit = fit_scaling(table, "empirical_re", kind);
        c.passed = fit.slope >= -0.65 && fit.slope <= -0.35 && fit.r_squared >= 0.9;
        c.detail = "slope " + format_real(fit.slope) + ", r^2 " + format_real(fit.r_squared) +
                   " (want slope in [-0.65, -0.35], r^2 >= 0.9)";
    } catch (const std::exception& e) {
        c.detail = e.what();
    }
    return c;
}

Check column_bound(const Table& table, std::string_view column, std::string name,
                   const std::function<double(long)>& limit) {
    Check c{std::move(name), true, ""};
    double worst = 0.0;
    long violations = 0;
    for (std::size_t r = 0; r < table.size(); ++r) {
        const double v = table.real(r, column);
        const long n = table.integer(r, "N");
        worst = std::max(worst, v / limit(n));
        if (!(v <= limit(n))) ++violations;
    }
    c.passed = violations == 0;
    c.detail = std::to_string(violations) + " violations, worst value/limit " + format_real(worst);
    return c;
}

} // namespace

std::vector<Check> assess(const ExperimentConfig& config, const Table& table) {
    std::vector<Check> checks;

    long thresholded = 0, violations = 0;
    for (std::size_t r = 0; r < table.size(); ++r) {
        if (table.cell(r, "pass").empty() || !table.boolean(r, "admissible")) continue;
        ++thresholded;
        if (!table.boolean(r, "pass")) ++violations;
    }
    if (thresholded > 0) {
        checks.push_back({"row thresholds", violations == 0,
                          std::to_string(violations) + " of " + std::to_string(thresholded) +
                              " admissible rows exceed their threshold"});
    }

    std::set<long> distinct_n(config.n_grid.begin(), config.n_grid.end());
    const double sigma = config.ensemble.sigma;
    const auto slack_limit = [](long n) { return slack(n); };
    switch (config.experiment) {
    case Experiment::eth_scaling:
        if (distinct_n.size() >= 3) checks.push_back(slope_check(table, "eth_overlap", "eth slope"));
        checks.push_back(column_bound(table, "lambda_j", "Lambda_J <= N^0.2", slack_limit));
        if (std::abs(sigma) < 1.0) checks.push_back(column_bound(table, "pi_j", "Pi_J <= N^0.2", slack_limit));
        break;
    case Experiment::transpose_scaling:
        if (sigma == 1.0) {
            checks.push_back(column_bound(table, "diag_unit_dev", "|<u_i, conj u_i>| = 1", [](long) { return 1e-12; }));
        } else if (sigma == -1.0) {
            checks.push_back(
                column_bound(table, "antidiag_unit_dev", "anti-diagonal |<u_i, conj u_j>| = 1", [](long) { return 1e-10; }));
            checks.push_back(
                column_bound(table, "eigen_antisymmetry", "spectrum symmetric about 0", [](long) { return 1e-10; }));
        } else {
            if (distinct_n.size() >= 3) checks.push_back(slope_check(table, "transpose_overlap", "transpose slope"));
            checks.push_back(column_bound(table, "pi_j", "Pi_J <= N^0.2", slack_limit));
        }
        break;
    case Experiment::renorm: {
        // Seed average of <underline(WG) A> within 3 standard errors of zero.
        std::map<std::tuple<long, std::string, std::string>, std::vector<cdouble>> groups;
        for (std::size_t r = 0; r < table.size(); ++r) {
            if (table.cell(r, "kind") != to_string(ErrorScaleKind::renorm_WGA)) continue;
            groups[{table.integer(r, "N"), table.cell(r, "z1_re"), table.cell(r, "z1_im")}].emplace_back(
                table.real(r, "empirical_re"), table.real(r, "empirical_im"));
        }
        for (const auto& [key, values] : groups) {
            if (values.size() < 2) continue;
            const auto k = static_cast<double>(values.size());
            cdouble mean = 0.0;
            for (const cdouble v : values) mean += v;
            mean /= k;
            double var_re = 0.0, var_im = 0.0;
            for (const cdouble v : values) {
                var_re += std::norm((v - mean).real());
                var_im += std::norm((v - mean).imag());
            }
            const double se_re = std::sqrt(var_re / (k - 1.0) / k);
            const double se_im = std::sqrt(var_im / (k - 1.0) / k);
            const bool ok = std::abs(mean.real()) <= 3.0 * se_re && std::abs(mean.imag()) <= 3.0 * se_im;
            checks.push_back({"renormalized mean ~ 0 (N=" + std::to_string(std::get<0>(key)) + ", z=" +
                                  std::get<1>(key) + (std::get<2>(key).starts_with('-') ? "" : "+") +
                                  std::get<2>(key) + "i)",
                              ok,
                              "mean " + format_real(mean.real()) + (mean.imag() < 0 ? "" : "+") +
                                  format_real(mean.imag()) + "i, SE " + format_real(se_re) + " / " +
                                  format_real(se_im)});
        }
        break;
    }
    default:
        break;
    }
    return checks;
}

} // namespace ethlab
