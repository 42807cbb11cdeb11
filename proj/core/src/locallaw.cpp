#include "ethlab/locallaw.hpp"

#include "ethlab/error.hpp"
#include "ethlab/parallel.hpp"
#include "ethlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ethlab {

double slack(long n) { return std::pow(static_cast<double>(n), kSlackExponent); }

Regime regime(cdouble z1, cdouble z2, long n) {
    const SpectralPoint p1 = semicircle::point(z1);
    const SpectralPoint p2 = semicircle::point(z2);
    Regime r;
    r.eta_star = std::min(p1.eta, p2.eta);
    r.rho_star = std::max(p1.rho, p2.rho);
    r.big_l = static_cast<double>(n) * std::min(p1.eta * p1.rho, p2.eta * p2.rho);
    r.admissible = r.big_l >= std::pow(static_cast<double>(n), kAdmissibleExponent);
    return r;
}

LawReport make_report(ErrorScaleKind kind, long n, cdouble z1, cdouble z2, cdouble empirical,
                      cdouble prediction, double bound) {
    LawReport r;
    r.kind = kind;
    r.n = n;
    r.z1 = z1;
    r.z2 = z2;
    r.empirical = empirical;
    r.prediction = prediction;
    r.abs_error = std::abs(empirical - prediction);
    r.bound = bound;
    r.ratio = r.abs_error / bound;
    r.regime = regime(z1, z2, n);
    return r;
}

LawReport check_single_g(ChainEvaluator& eval, cdouble z, const Observable& a) {
    const long n = eval.spectral().n();
    ChainSpec chain;
    chain.factors = {{z}};
    chain.weights = {a.is_identity() ? nullptr : &a};
    const cdouble value = eval.value(chain);
    if (a.traceless()) {
        return make_report(ErrorScaleKind::traceless_single_G, n, z, z, value, 0.0,
                           semicircle::error_scale(ErrorScaleKind::traceless_single_G, z, z, n));
    }
    return make_report(ErrorScaleKind::avg_single_G, n, z, z, value, semicircle::stieltjes(z) * a.trace_mean(),
                       semicircle::error_scale(ErrorScaleKind::avg_single_G, z, z, n));
}

LawReport check_iso_single_g(ChainEvaluator& eval, cdouble z, const Eigen::VectorXcd& x,
                             const Eigen::VectorXcd& y) {
    const long n = eval.spectral().n();
    ChainSpec chain;
    chain.factors = {{z}};
    chain.weights = {nullptr};
    chain.closure = Closure::bilinear;
    chain.x = x;
    chain.y = y;
    const cdouble value = eval.value(chain);
    return make_report(ErrorScaleKind::iso_single_G, n, z, z, value, semicircle::stieltjes(z) * x.dot(y),
                       semicircle::error_scale(ErrorScaleKind::iso_single_G, z, z, n));
}

LawReport check_two_g(ChainEvaluator& eval, ErrorScaleKind kind, cdouble z1, cdouble z2, const Observable& a,
                      const Observable& a_prime, const TwoGOptions& options) {
    const long n = eval.spectral().n();
    const bool with_observables = kind == ErrorScaleKind::GAGA || kind == ErrorScaleKind::ImAImA;
    const bool transpose_law = kind == ErrorScaleKind::GGt_sigma || kind == ErrorScaleKind::ImImT;
    if (!with_observables && !transpose_law && kind != ErrorScaleKind::GG_plain) {
        throw InvalidArgument("check_two_g: unsupported kind " + std::string(to_string(kind)));
    }
    if (transpose_law && std::abs(options.sigma) > options.max_abs_sigma) {
        throw DomainError("check_two_g: |sigma| exceeds the transpose-law range");
    }
    const bool im = kind == ErrorScaleKind::ImAImA || kind == ErrorScaleKind::ImImT;
    const ResolventVariant variant = im ? ResolventVariant::imaginary_part : ResolventVariant::plain;

    ChainSpec chain;
    chain.factors = {{z1, variant, false}, {z2, variant, transpose_law || (with_observables && options.transpose_second)}};
    chain.weights = with_observables ? std::vector<const Observable*>{&a, &a_prime}
                                     : std::vector<const Observable*>{nullptr, nullptr};
    const cdouble value = eval.value(chain);

    const double pair = with_observables ? observables::pairing(a, a_prime) : 1.0;
    const cdouble prediction = semicircle::predict(kind, z1, z2, options.sigma, pair);
    semicircle::ScaleFactors factors;
    factors.lambda_a = options.lambda_a;
    factors.lambda_b = options.lambda_b;
    const double bound = semicircle::error_scale(kind, z1, z2, n, factors);
    return make_report(kind, n, z1, z2, value, prediction, bound);
}

std::array<LawReport, 3> check_bounds_two_g(ChainEvaluator& eval, cdouble z1, cdouble z2, const Observable& a,
                                            double lambda_plus) {
    if (!a.traceless()) throw InvalidArgument("check_bounds_two_g: observable must be traceless");
    const long n = eval.spectral().n();
    semicircle::ScaleFactors factors;
    factors.lambda_a = lambda_plus;

    auto run = [&](ErrorScaleKind kind, ResolventFactor f1, ResolventFactor f2,
                   std::vector<const Observable*> weights) {
        ChainSpec chain;
        chain.factors = {f1, f2};
        chain.weights = std::move(weights);
        const cdouble value = eval.value(chain);
        return make_report(kind, n, z1, z2, value, 0.0, semicircle::error_scale(kind, z1, z2, n, factors));
    };
    const ResolventVariant im = ResolventVariant::imaginary_part;
    return {
        run(ErrorScaleKind::GGA_bound, {z1}, {z2}, {nullptr, &a}),
        run(ErrorScaleKind::ImGAG_bound, {z1, im}, {z2}, {&a, nullptr}),
        run(ErrorScaleKind::ImGAImG_bound, {z1, im}, {z2, im}, {&a, nullptr}),
    };
}

LawReport check_iso_two_g(ChainEvaluator& eval, cdouble z1, cdouble z2, const Observable& a,
                          const Eigen::VectorXcd& x, const Eigen::VectorXcd& y, double lambda_plus) {
    if (!a.traceless()) throw InvalidArgument("check_iso_two_g: observable must be traceless");
    const long n = eval.spectral().n();
    ChainSpec chain;
    chain.factors = {{z1}, {z2}};
    chain.weights = {&a, nullptr};
    chain.closure = Closure::bilinear;
    chain.x = x;
    chain.y = y;
    const cdouble value = eval.value(chain);
    semicircle::ScaleFactors factors;
    factors.lambda_a = lambda_plus;
    return make_report(ErrorScaleKind::iso_two_G, n, z1, z2, value, 0.0,
                       semicircle::error_scale(ErrorScaleKind::iso_two_G, z1, z2, n, factors));
}

double im_trace_ga(const SpectralData& spectral, cdouble z, const Observable& a) {
    const Eigen::MatrixXcd& u = spectral.eigenvectors();
    Eigen::VectorXd diag_overlap(u.cols());
    if (a.diagonal()) {
        const Eigen::VectorXd d = a.matrix().diagonal().real();
        diag_overlap = (d.transpose() * u.cwiseAbs2()).transpose();
    } else {
        const Eigen::MatrixXcd au = a.matrix() * u;
        diag_overlap = u.conjugate().cwiseProduct(au).colwise().sum().real().transpose();
    }
    const Eigen::VectorXcd p = factor_weights(spectral.eigenvalues(), {z, ResolventVariant::imaginary_part});
    return p.real().dot(diag_overlap) / static_cast<double>(spectral.n());
}

VarianceReport check_variance_im_ga(const EnsembleSpec& spec, cdouble z, const Observable& a, long n_trials,
                                    std::uint64_t base_seed, int workers) {
    if (z.imag() <= 0.0) throw DomainError("check_variance_im_ga: need Im z > 0");
    if (n_trials < 500) throw InvalidArgument("check_variance_im_ga: need at least 500 trials");
    if (!a.traceless()) throw InvalidArgument("check_variance_im_ga: observable must be traceless");
    if (a.n() != spec.n) throw InvalidArgument("check_variance_im_ga: dimension mismatch");

    std::vector<double> values(static_cast<std::size_t>(n_trials));
    parallel_for(values.size(), workers, [&](std::size_t t) {
        const WignerSample w = sample(spec, mix_keys({base_seed, static_cast<std::uint64_t>(t)}));
        values[t] = im_trace_ga(diagonalize(w), z, a);
    });

    VarianceReport out;
    out.n_trials = n_trials;
    std::vector<double> squares(values.size());
    std::transform(values.begin(), values.end(), squares.begin(), [](double v) { return v * v; });
    const double count = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
    out.empirical = std::accumulate(squares.begin(), squares.end(), 0.0) / count;
    semicircle::ScaleFactors factors;
    factors.pairing = observables::pairing(a, a);
    out.prediction = semicircle::error_scale(ErrorScaleKind::variance_ImGA, z, z, spec.n, factors);
    out.ratio = out.prediction > 0.0 ? out.empirical / out.prediction : 0.0;

    // Percentile bootstrap over trials.
    constexpr int kResamples = 1000;
    CounterRng rng(StreamDomain::bootstrap, base_seed);
    std::vector<double> ratios(kResamples);
    for (double& r : ratios) {
        double acc = 0.0;
        for (std::size_t k = 0; k < squares.size(); ++k) acc += squares[rng() % squares.size()];
        r = out.prediction > 0.0 ? acc / count / out.prediction : 0.0;
    }
    std::sort(ratios.begin(), ratios.end());
    out.ci_low = ratios[static_cast<std::size_t>(0.025 * kResamples)];
    out.ci_high = ratios[static_cast<std::size_t>(0.975 * kResamples) - 1];
    return out;
}

Renormalizer::Renormalizer(const WignerSample& sample, const SpectralData& spectral)
    : sample_(sample),
      spectral_(spectral),
      sigma_(sample.spec().sigma),
      w2_tilde_(sample.spec().w2_tilde()) {
    if (spectral.n() != sample.n()) throw InvalidArgument("Renormalizer: dimension mismatch");
}

const Eigen::MatrixXcd& Renormalizer::g(cdouble z) {
    const auto key = std::make_pair(z.real(), z.imag());
    if (auto it = g_cache_.find(key); it != g_cache_.end()) return it->second;
    return g_cache_.emplace(key, resolvent(spectral_, z)).first->second;
}

const Eigen::MatrixXcd& Renormalizer::wg_product(cdouble z) {
    const auto key = std::make_pair(z.real(), z.imag());
    if (auto it = wg_cache_.find(key); it != wg_cache_.end()) return it->second;
    Eigen::MatrixXcd wg;
    wg.noalias() = sample_.matrix() * g(z);
    return wg_cache_.emplace(key, std::move(wg)).first->second;
}

Eigen::MatrixXcd Renormalizer::cumulant_correction(const Eigen::MatrixXcd& left,
                                                   const Eigen::MatrixXcd& right) const {
    // E~[W~ X W~] = <X> + (sigma/N) X^t + (w2~/N) diag(X), applied to `right`.
    const double nd = static_cast<double>(sample_.n());
    Eigen::MatrixXcd out = (left.trace() / nd) * right;
    if (sigma_ != 0.0) out.noalias() += (sigma_ / nd) * left.transpose() * right;
    if (w2_tilde_ != 0.0) out.noalias() += (w2_tilde_ / nd) * (left.diagonal().asDiagonal() * right);
    return out;
}

Eigen::MatrixXcd Renormalizer::underline_wg(cdouble z) {
    const Eigen::MatrixXcd& gz = g(z);
    return wg_product(z) + cumulant_correction(gz, gz);
}

cdouble Renormalizer::wg(cdouble z, const Observable& a) {
    const Eigen::MatrixXcd u = underline_wg(z);
    return (u.array() * a.matrix().transpose().array()).sum() / static_cast<double>(sample_.n());
}

cdouble Renormalizer::wg1g2(cdouble z1, cdouble z2, const Observable& a, const Observable& a_prime) {
    const Eigen::MatrixXcd& g2 = g(z2);
    const Eigen::MatrixXcd x = g(z1) * a.matrix() * g2;
    Eigen::MatrixXcd total = underline_wg(z1) * a.matrix() * g2;
    total += cumulant_correction(x, g2);
    return (total.array() * a_prime.matrix().transpose().array()).sum() / static_cast<double>(sample_.n());
}

double Renormalizer::recomposition_residual(cdouble z) {
    const long n = sample_.n();
    const double nd = static_cast<double>(n);
    const cdouble m = semicircle::stieltjes(z);
    const Eigen::MatrixXcd& gz = g(z);
    const cdouble g_minus_m = gz.trace() / nd - m;

    Eigen::MatrixXcd rhs = -m * underline_wg(z);
    rhs.diagonal().array() += m;
    rhs.noalias() += (m * sigma_ / nd) * gz.transpose() * gz;
    rhs.noalias() += (m * w2_tilde_ / nd) * (gz.diagonal().asDiagonal() * gz);
    rhs += (m * g_minus_m) * gz;
    return (gz - rhs).cwiseAbs().maxCoeff();
}

double Renormalizer::two_g_expansion_residual(cdouble z1, cdouble z2, const Eigen::MatrixXcd& b1,
                                              const Eigen::MatrixXcd& b2) {
    const double nd = static_cast<double>(sample_.n());
    const cdouble m1 = semicircle::stieltjes(z1);
    const cdouble m2 = semicircle::stieltjes(z2);
    const Eigen::MatrixXcd& g1 = g(z1);
    const Eigen::MatrixXcd& g2 = g(z2);
    const Eigen::MatrixXcd x = g1 * b1 * g2;

    // underline(W G1 B1 G2) = W X + E~[W~ G1 W~] X + E~[W~ X W~] G2.
    const Eigen::MatrixXcd under = sample_.matrix() * x + cumulant_correction(g1, x) + cumulant_correction(x, g2);

    const Eigen::MatrixXcd lhs = x * b2;
    Eigen::MatrixXcd g2_minus_m2 = g2;
    g2_minus_m2.diagonal().array() -= m2;
    Eigen::MatrixXcd rhs = (m1 * m2) * (b1 * b2);
    rhs.noalias() += m1 * (b1 * g2_minus_m2 * b2);
    rhs.noalias() -= m1 * (under * b2);
    rhs += (m1 * (g1.trace() / nd - m1)) * lhs;
    rhs += (m1 * x.trace() / nd) * (g2 * b2);
    rhs.noalias() += (m1 * sigma_ / nd) * (g1.transpose() * lhs);
    rhs.noalias() += (m1 * sigma_ / nd) * (x.transpose() * g2 * b2);
    rhs.noalias() += (m1 * w2_tilde_ / nd) * (g1.diagonal().asDiagonal() * lhs);
    rhs.noalias() += (m1 * w2_tilde_ / nd) * (x.diagonal().asDiagonal() * (g2 * b2));
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

} // namespace ethlab
