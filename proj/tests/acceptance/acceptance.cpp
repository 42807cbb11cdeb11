// Acceptance run: one PASS/FAIL line per criterion, thresholds pinned below.
// Exit status is 0 only when every criterion passes.

#include "ethlab/ethlab.hpp"
#include "ethlab/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ethlab;

namespace {

constexpr double kSlopeLow = -0.65;
constexpr double kSlopeHigh = -0.35;
constexpr double kMinRSquared = 0.9;
constexpr double kVarianceLow = 0.85;
constexpr double kVarianceHigh = 1.15;
constexpr double kWardTolerance = 1e-12;
constexpr double kRecompositionTolerance = 1e-10;
constexpr double kGoeTolerance = 1e-12;
constexpr double kAntisymmetricTolerance = 1e-10;
constexpr double kComparabilityLow = 1e-2;
constexpr double kComparabilityHigh = 1e2;

struct Verdict {
    bool passed = true;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void note(Verdict& v, bool ok, const std::string& text) {
    v.passed = v.passed && ok;
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += text + (ok ? "" : " [fail]");
}

// Rows of one kind: count, violations (ratio above the row threshold) and the worst ratio/threshold.
struct RowSummary {
    long count = 0;
    long violations = 0;
    double worst_ratio = 0.0;
    double worst_threshold = 0.0;
};

RowSummary summarize_rows(const Table& t, const std::string& kind) {
    RowSummary s;
    for (std::size_t r = 0; r < t.size(); ++r) {
        if (t.cell(r, "kind") != kind) continue;
        ++s.count;
        const double ratio = t.real(r, "ratio"), threshold = t.real(r, "threshold");
        if (!(ratio <= threshold)) ++s.violations;
        if (s.count == 1 || ratio / threshold > s.worst_ratio / s.worst_threshold) {
            s.worst_ratio = ratio;
            s.worst_threshold = threshold;
        }
    }
    return s;
}

void note_rows(Verdict& v, const Table& t, const std::string& kind) {
    const RowSummary s = summarize_rows(t, kind);
    note(v, s.count > 0 && s.violations == 0,
         kind + " " + std::to_string(s.violations) + "/" + std::to_string(s.count) + " over, worst " +
             fmt(s.worst_ratio) + " vs " + fmt(s.worst_threshold));
}

void note_slope(Verdict& v, const std::string& label, const Table& t, const std::string& kind) {
    const ScalingFit fit = fit_scaling(t, "empirical_re", kind);
    note(v, fit.slope >= kSlopeLow && fit.slope <= kSlopeHigh && fit.r_squared >= kMinRSquared,
         label + " slope " + fmt(fit.slope) + " r2 " + fmt(fit.r_squared));
}

ExperimentConfig with_ensemble(ExperimentConfig c, const std::string& name) {
    c.ensemble = builtin(name);
    return c;
}

Verdict eth_scaling(int workers) {
    Verdict v;
    for (const char* name : {"gue", "goe"}) {
        const Table t = run(with_ensemble(default_config(Experiment::eth_scaling), name), workers);
        note_slope(v, name, t, "eth_overlap");
    }
    return v;
}

Verdict transpose_orthogonality(int workers) {
    Verdict v;
    for (const char* name : {"gue", "complex_sigma(0.5)"}) {
        const Table t = run(with_ensemble(default_config(Experiment::transpose_scaling), name), workers);
        note_slope(v, name, t, "transpose_overlap");
    }
    double goe_dev = 0.0, anti_dev = 0.0, anti_spec = 0.0;
    for (const long n : default_config(Experiment::transpose_scaling).n_grid) {
        const OverlapMatrix goe = transpose_overlap(diagonalize(sample(builtin("goe", n), mix_keys({1, 0x90e, 0}))));
        goe_dev = std::max(goe_dev, (goe.entries.cwiseAbs() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());

        const SpectralData s = diagonalize(sample(builtin("antisymmetric_imaginary", n), mix_keys({1, 0xa5, 0})));
        const OverlapMatrix anti = transpose_overlap(s);
        Eigen::MatrixXd target = Eigen::MatrixXd::Identity(n, n).rowwise().reverse();
        anti_dev = std::max(anti_dev, (anti.entries.cwiseAbs() - target).cwiseAbs().maxCoeff());
        anti_spec = std::max(anti_spec, (s.eigenvalues() + s.eigenvalues().reverse()).cwiseAbs().maxCoeff());
    }
    note(v, goe_dev <= kGoeTolerance, "goe max||<u_i,conj u_j>|-delta_ij| " + fmt(goe_dev));
    note(v, anti_dev <= kAntisymmetricTolerance, "antisymmetric anti-diagonal dev " + fmt(anti_dev));
    note(v, anti_spec <= kAntisymmetricTolerance, "antisymmetric max|l_i+l_(N+1-i)| " + fmt(anti_spec));
    return v;
}

Verdict traceless_single_g(const Table& single_g) {
    Verdict v;
    note_rows(v, single_g, std::string(to_string(ErrorScaleKind::traceless_single_G)));
    return v;
}

Verdict two_resolvent(int workers) {
    const Table t = run(default_config(Experiment::two_g), workers);
    Verdict v;
    for (const ErrorScaleKind k :
         {ErrorScaleKind::GAGA, ErrorScaleKind::GG_plain, ErrorScaleKind::GGt_sigma, ErrorScaleKind::ImImT}) {
        note_rows(v, t, std::string(to_string(k)));
    }
    return v;
}

Verdict variance(int workers) {
    const Table t = run(default_config(Experiment::variance), workers);
    Verdict v;
    for (std::size_t r = 0; r < t.size(); ++r) {
        const double ratio = t.real(r, "variance_ratio");
        note(v, ratio >= kVarianceLow && ratio <= kVarianceHigh,
             "ratio " + fmt(ratio) + " (95% CI " + fmt(t.real(r, "ci_low")) + ", " + fmt(t.real(r, "ci_high")) +
                 "), " + std::to_string(t.integer(r, "n_trials")) + " trials");
    }
    if (t.empty()) note(v, false, "no rows");
    return v;
}

Verdict ward(const Table& single_g, int workers) {
    Verdict v;
    note_rows(v, single_g, "ward_identity");
    // Same identity on the two-resolvent z grid, GOE and a sigma ensemble.
    const std::vector<cdouble> zs{{0.0, 2.0}, {0.0, 1.0}, {0.0, 0.2}, {1.0, 0.1}, {-1.9, 1e-3}};
    const std::vector<const char*> names{"gue", "goe", "complex_sigma(0.5)"};
    std::vector<double> worst(names.size() * 5, 0.0);
    parallel_for(worst.size(), workers, [&](std::size_t i) {
        const SpectralData s = diagonalize(sample(builtin(names[i / 5], 512), mix_keys({0x3a7d, i})));
        ChainEvaluator eval(s);
        for (const cdouble z : zs) {
            const cdouble lhs = eval.value(ChainSpec::trace({{z}, {z, ResolventVariant::adjoint}}));
            const cdouble rhs = eval.value(ChainSpec::trace({{z, ResolventVariant::imaginary_part}})) / z.imag();
            worst[i] = std::max(worst[i], std::abs(lhs - rhs) / std::abs(rhs));
        }
    });
    const double w = *std::max_element(worst.begin(), worst.end());
    note(v, w <= kWardTolerance, "extra z grid worst relative error " + fmt(w));
    return v;
}

Verdict rigidity(int workers) {
    const Table t = run(default_config(Experiment::rigidity), workers);
    Verdict v;
    note_rows(v, t, "rigidity");
    return v;
}

Verdict renormalization(int workers) {
    const ExperimentConfig c = default_config(Experiment::renorm);
    const Table t = run(c, workers);
    Verdict v;
    note_rows(v, t, std::string(to_string(ErrorScaleKind::renorm_WGA)));
    for (const Check& check : assess(c, t)) {
        if (check.name.find("mean") != std::string::npos) note(v, check.passed, check.name + ": " + check.detail);
    }
    const RowSummary rec = summarize_rows(t, "recomposition");
    note(v, rec.count > 0 && rec.violations == 0 && rec.worst_ratio <= kRecompositionTolerance,
         "recomposition worst " + fmt(rec.worst_ratio) + " over " + std::to_string(rec.count) + " samples");
    return v;
}

Verdict semicircle_analytics() {
    namespace sc = semicircle;
    Verdict v;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> re(-5.0, 5.0), log_im(-6.0, 1.0), unit(0.0, 1.0);
    double residual = 0.0, norm = 0.0;
    long branch_violations = 0;
    for (int k = 0; k < 10000; ++k) {
        const double im = std::pow(10.0, log_im(gen)) * (unit(gen) < 0.5 ? -1.0 : 1.0);
        const cdouble z(re(gen), im);
        const cdouble m = sc::stieltjes(z);
        residual = std::max(residual, std::abs(m * m + z * m + 1.0));
        norm = std::max(norm, std::abs(m));
        if (!(m.imag() * z.imag() > 0.0)) ++branch_violations;
    }
    note(v, residual <= 1e-12, "quadratic residual " + fmt(residual));
    note(v, branch_violations == 0 && norm <= 1.0,
         "branch violations " + std::to_string(branch_violations) + ", max|m| " + fmt(norm));

    double cdf_residual = 0.0;
    for (const long n : {16L, 512L, 4096L}) {
        for (long i = 1; i <= n; ++i) {
            cdf_residual = std::max(cdf_residual, std::abs(sc::cdf(sc::quantile(i, n)) - double(i) / double(n)));
        }
    }
    note(v, cdf_residual <= 1e-10, "quantile cdf residual " + fmt(cdf_residual));

    double fd = 0.0;
    std::uniform_real_distribution<double> bulk(-3.0, 3.0), height(0.05, 2.0);
    for (int k = 0; k < 1000; ++k) {
        const cdouble z(bulk(gen), height(gen));
        const double h = 1e-5;
        const cdouble numeric = (sc::stieltjes(z + h) - sc::stieltjes(z - h)) / (2.0 * h);
        fd = std::max(fd, std::abs(numeric - sc::stieltjes_derivative(z)));
    }
    note(v, fd <= 1e-6, "derivative vs finite differences " + fmt(fd));

    double eta_residual = 0.0;
    for (const long n : {128L, 512L, 1024L}) {
        for (const double j : {1.0, 5.0, std::pow(double(n), 0.3), 0.25 * double(n)}) {
            for (int e = 0; e <= 40; ++e) {
                const double energy = -1.95 + 3.9 * e / 40.0;
                const double eta = sc::solve_eta(energy, j, n);
                const double got = double(n) * eta * sc::rho({energy, eta});
                eta_residual = std::max(eta_residual, std::abs(got - j) / j);
            }
        }
    }
    note(v, eta_residual <= 1e-10, "solve_eta relative residual " + fmt(eta_residual));
    return v;
}

Verdict lambda_pi(int workers) {
    const std::vector<long> grid{256, 512, 1024};
    const long trials = 20;
    struct Out {
        double lambda = 0.0, pi = 0.0, comp_low = 1e300, comp_high = 0.0;
    };
    std::vector<Out> out(grid.size() * trials);
    const std::vector<std::pair<double, double>> energies{{0.0, 0.0}, {0.0, 0.5}, {-1.0, 1.0}};
    parallel_for(out.size(), workers, [&](std::size_t i) {
        const long n = grid[i / trials], trial = static_cast<long>(i % trials);
        const SpectralData s = diagonalize(sample(builtin("gue", n), trial_seed(0x5eed, n, trial, Experiment::eth_scaling)));
        const Observable a = observables::traceless_signs(n);
        const long j = default_window(n);
        const EthSummary sum = summarize(s, a, j);
        Out& o = out[i];
        o.lambda = sum.lambda_j / slack(n);
        o.pi = sum.pi_j / slack(n);
        for (const auto& [e1, e2] : energies) {
            const double r = comparability(s, a, j, e1, e2).normalized;
            o.comp_low = std::min(o.comp_low, r);
            o.comp_high = std::max(o.comp_high, r);
        }
    });
    Out worst;
    for (const Out& o : out) {
        worst.lambda = std::max(worst.lambda, o.lambda);
        worst.pi = std::max(worst.pi, o.pi);
        worst.comp_low = std::min(worst.comp_low, o.comp_low);
        worst.comp_high = std::max(worst.comp_high, o.comp_high);
    }
    Verdict v;
    note(v, worst.lambda <= 1.0, "max Lambda_J/N^0.2 " + fmt(worst.lambda));
    note(v, worst.pi <= 1.0, "max Pi_J/N^0.2 " + fmt(worst.pi));
    note(v, worst.comp_low >= kComparabilityLow && worst.comp_high <= kComparabilityHigh,
         "comparability in [" + fmt(worst.comp_low) + ", " + fmt(worst.comp_high) + "]");
    return v;
}

ExperimentConfig small_config(Experiment e) {
    ExperimentConfig c = default_config(e);
    c.n_grid = e == Experiment::eth_scaling || e == Experiment::transpose_scaling ? std::vector<long>{16, 32, 64}
                                                                                   : std::vector<long>{32, 64};
    c.trials_per_n = e == Experiment::variance ? 500 : 4;
    return c;
}

std::string render(const Table& t, OutputFormat f) {
    std::ostringstream out;
    write(t, f, out);
    return out.str();
}

Verdict determinism() {
    Verdict v;
    long mismatches = 0, runs = 0;
    for (int e = 0; e <= static_cast<int>(Experiment::rigidity); ++e) {
        const ExperimentConfig c = small_config(static_cast<Experiment>(e));
        const std::string reference = render(run(c, 1), OutputFormat::csv);
        for (const int w : {1, 2, 8}) {
            for (const OutputFormat f : {OutputFormat::csv, OutputFormat::json}) {
                const Table t = run(c, w);
                const std::string got = render(t, f);
                const std::string want = f == OutputFormat::csv ? reference : render(run(c, 1), f);
                ++runs;
                if (got != want) {
                    ++mismatches;
                    note(v, false, std::string(to_string(c.experiment)) + " differs at " + std::to_string(w) +
                                       " workers");
                }
            }
        }
    }
    note(v, mismatches == 0, std::to_string(runs) + " reruns over 7 experiments, " + std::to_string(mismatches) +
                                 " mismatches");
    return v;
}

} // namespace

int main() {
    const int workers = resolve_workers(std::nullopt);
    std::cout << "acceptance: " << workers << " worker(s)\n" << std::flush;
    int failed = 0;
    auto report = [&](int id, const char* name, const std::function<Verdict()>& body) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = body();
        } catch (const std::exception& e) {
            v.passed = false;
            v.detail = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!v.passed) ++failed;
        std::cout << (v.passed ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << v.detail << " ("
                  << fmt(secs) << " s)\n"
                  << std::flush;
    };

    report(1, "eth_scaling", [&] { return eth_scaling(workers); });
    report(2, "transpose_orthogonality", [&] { return transpose_orthogonality(workers); });
    Table single_g;
    report(3, "traceless_single_g", [&] {
        single_g = run(default_config(Experiment::single_g), workers);
        return traceless_single_g(single_g);
    });
    report(4, "two_resolvent_limits", [&] { return two_resolvent(workers); });
    report(5, "variance", [&] { return variance(workers); });
    report(6, "ward_identity", [&] { return ward(single_g, workers); });
    report(7, "rigidity", [&] { return rigidity(workers); });
    report(8, "renormalization", [&] { return renormalization(workers); });
    report(9, "semicircle_analytics", [] { return semicircle_analytics(); });
    report(10, "lambda_pi_bounds", [&] { return lambda_pi(workers); });
    report(11, "determinism", [] { return determinism(); });

    std::cout << "acceptance: " << (11 - failed) << "/11 criteria passed\n";
    return failed == 0 ? 0 : 1;
}
