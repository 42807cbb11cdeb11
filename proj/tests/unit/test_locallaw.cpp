#include "ethlab/error.hpp"
#include "ethlab/eth_stats.hpp"
#include "ethlab/locallaw.hpp"
#include "ethlab/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ethlab;

namespace {

void expect_consistent(const LawReport& r) {
    EXPECT_EQ(r.abs_error, std::abs(r.empirical - r.prediction));
    if (r.bound > 0.0) EXPECT_NEAR(r.ratio * r.bound, r.abs_error, 1e-15 * std::max(1.0, r.abs_error));
}

struct GueFixture : ::testing::Test {
    static constexpr long n = 512;
    WignerSample w = sample(builtin("gue", n), 21);
    SpectralData s = diagonalize(w);
    ChainEvaluator eval{s};
    Observable a = observables::traceless_signs(n);
    double th = slack(n);
};

} // namespace

TEST(Regime, Admissibility) {
    const Regime r = regime({0.0, 1.0}, {0.0, 0.02}, 512);
    EXPECT_DOUBLE_EQ(r.eta_star, 0.02);
    EXPECT_NEAR(r.big_l, 512 * 0.02 * semicircle::rho({0.0, 0.02}), 1e-12);
    EXPECT_TRUE(r.admissible);
    EXPECT_FALSE(regime({0.0, 1e-5}, {0.0, 1e-5}, 512).admissible);
    EXPECT_NEAR(slack(1024), 4.0, 1e-12);
}

TEST_F(GueFixture, SingleGAverage) {
    const LawReport r = check_single_g(eval, {0.0, 2.0}, observables::identity(n));
    EXPECT_EQ(r.kind, ErrorScaleKind::avg_single_G);
    EXPECT_NEAR(r.prediction.imag(), std::sqrt(2.0) - 1.0, 1e-15);
    EXPECT_LE(r.ratio, th);
    expect_consistent(r);
}

TEST_F(GueFixture, SingleGTracelessAcrossGrid) {
    for (int k = 0; k < 5; ++k) {
        const cdouble z(-1.0 + 0.5 * k, 0.05);
        const LawReport r = check_single_g(eval, z, a);
        EXPECT_EQ(r.kind, ErrorScaleKind::traceless_single_G);
        EXPECT_EQ(r.prediction, cdouble(0.0));
        expect_consistent(r);
        EXPECT_TRUE(r.regime.admissible);
    }
}

TEST(SingleG, DegenerateDimensionOne) {
    const SpectralData s = diagonalize(sample(builtin("gue", 1), 2));
    ChainEvaluator eval(s);
    const LawReport r = check_single_g(eval, {0.0, 1.0}, Observable(Eigen::MatrixXcd::Zero(1, 1)));
    EXPECT_EQ(r.empirical, cdouble(0.0));
}

TEST(IsoSingleG, ZeroMatrixOrthogonalVectors) {
    const SpectralData s = diagonalize(Eigen::MatrixXcd::Zero(4, 4));
    ChainEvaluator eval(s);
    const LawReport r =
        check_iso_single_g(eval, {0.3, 0.7}, observables::unit_coordinate(4, 0), observables::unit_coordinate(4, 1));
    EXPECT_EQ(r.empirical, cdouble(0.0));
    EXPECT_EQ(r.prediction, cdouble(0.0));
}

TEST_F(GueFixture, IsoSingleG) {
    const Eigen::VectorXcd e1 = observables::unit_coordinate(n, 0), flat = observables::flat_vector(n);
    EXPECT_LE(check_iso_single_g(eval, {0.0, 1.0}, e1, e1).ratio, th);
    EXPECT_LE(check_iso_single_g(eval, {0.0, 1.0}, flat, flat).ratio, th);
}

TEST_F(GueFixture, TwoGLimits) {
    const LawReport gg = check_two_g(eval, ErrorScaleKind::GG_plain, {0.0, 2.0}, {0.0, 2.0}, a, a);
    EXPECT_NEAR(gg.prediction.real(), -0.146446609406726238, 1e-14);
    EXPECT_LE(gg.ratio, th);
    const LawReport imt = check_two_g(eval, ErrorScaleKind::ImImT, {0.0, 1.0}, {0.0, 1.0}, a, a);
    EXPECT_NEAR(imt.prediction.real(), 0.381966011250105152, 1e-14);
    EXPECT_LE(imt.ratio, th);
    for (const ErrorScaleKind k : {ErrorScaleKind::GAGA, ErrorScaleKind::ImAImA, ErrorScaleKind::GGt_sigma}) {
        const LawReport r = check_two_g(eval, k, {0.0, 0.2}, {0.0, 0.2}, a, a);
        expect_consistent(r);
        EXPECT_LE(r.ratio, th) << to_string(k);
    }
    TwoGOptions t;
    t.transpose_second = true;
    EXPECT_LE(check_two_g(eval, ErrorScaleKind::GAGA, {0.0, 0.5}, {0.3, 0.4}, a, a, t).ratio, th);
}

TEST_F(GueFixture, TwoGErrors) {
    TwoGOptions o;
    o.sigma = 0.99;
    EXPECT_THROW((void)check_two_g(eval, ErrorScaleKind::GGt_sigma, {0.0, 1.0}, {0.0, 1.0}, a, a, o), DomainError);
    EXPECT_THROW((void)check_two_g(eval, ErrorScaleKind::iso_two_G, {0.0, 1.0}, {0.0, 1.0}, a, a), InvalidArgument);
}

TEST(TwoG, GoeTransposeEqualsPlain) {
    const SpectralData s = diagonalize(sample(builtin("goe", 64), 4));
    ChainEvaluator eval(s);
    const Observable a = observables::traceless_signs(64);
    TwoGOptions o;
    o.sigma = 1.0;
    o.max_abs_sigma = 1.0;
    const cdouble z(0.2, 0.3);
    const LawReport t = check_two_g(eval, ErrorScaleKind::GGt_sigma, z, z, a, a, o);
    const LawReport p = check_two_g(eval, ErrorScaleKind::GG_plain, z, z, a, a, o);
    EXPECT_EQ(t.empirical, p.empirical);
    EXPECT_EQ(t.prediction, p.prediction);
}

TEST_F(GueFixture, BoundsTwoG) {
    const cdouble z(0.0, 0.05);
    const double lp = lambda_plus(s, a, regime(z, z, n).big_l);
    const auto reports = check_bounds_two_g(eval, z, z, a, lp);
    EXPECT_LE(std::abs(reports[2].empirical.imag()), 1e-14 * std::abs(reports[2].empirical));
    for (const LawReport& r : reports) EXPECT_LE(r.ratio, th) << to_string(r.kind);
    const Observable zero(Eigen::MatrixXcd::Zero(n, n));
    for (const LawReport& r : check_bounds_two_g(eval, z, z, zero, lp)) EXPECT_EQ(r.empirical, cdouble(0.0));
}

TEST_F(GueFixture, IsoTwoG) {
    const cdouble z(0.0, 0.05);
    const double lp = lambda_plus(s, a, regime(z, z, n).big_l);
    const Eigen::VectorXcd e1 = observables::unit_coordinate(n, 0);
    EXPECT_LE(check_iso_two_g(eval, z, z, a, e1, e1, lp).ratio, th);
    const Observable zero(Eigen::MatrixXcd::Zero(n, n));
    EXPECT_EQ(check_iso_two_g(eval, z, z, zero, e1, e1, lp).empirical, cdouble(0.0));
    EXPECT_THROW((void)check_iso_two_g(eval, z, z, observables::identity(n), e1, e1, lp), InvalidArgument);
}

TEST(Variance, ZeroObservableAndErrors) {
    const EnsembleSpec spec = builtin("gue", 8);
    const Observable zero(Eigen::MatrixXcd::Zero(8, 8));
    const VarianceReport v = check_variance_im_ga(spec, {0.0, 0.5}, zero, 500, 1);
    EXPECT_EQ(v.empirical, 0.0);
    EXPECT_EQ(v.prediction, 0.0);
    EXPECT_THROW((void)check_variance_im_ga(spec, {0.0, 0.5}, zero, 499, 1), InvalidArgument);
    EXPECT_THROW((void)check_variance_im_ga(spec, {0.0, -0.5}, zero, 500, 1), DomainError);
    EXPECT_THROW((void)check_variance_im_ga(spec, {0.0, 0.5}, observables::identity(8), 500, 1), InvalidArgument);
}

TEST(Variance, WorkerCountDoesNotChangeResult) {
    const EnsembleSpec spec = builtin("gue", 16);
    const Observable a = observables::traceless_signs(16);
    const VarianceReport one = check_variance_im_ga(spec, {0.0, 0.3}, a, 500, 9, 1);
    const VarianceReport three = check_variance_im_ga(spec, {0.0, 0.3}, a, 500, 9, 3);
    EXPECT_EQ(one.empirical, three.empirical);
    EXPECT_EQ(one.ci_low, three.ci_low);
    EXPECT_LE(one.ci_low, one.ratio);
    EXPECT_GE(one.ci_high, one.ratio);
}

TEST(ImTraceGA, MatchesChain) {
    const SpectralData s = diagonalize(sample(builtin("gue", 20), 3));
    const Observable a = observables::random_traceless(20, 4);
    const cdouble z(0.1, 0.2);
    ChainSpec c = ChainSpec::trace({{z, ResolventVariant::imaginary_part}});
    c.weights = {&a};
    EXPECT_NEAR(im_trace_ga(s, z, a), chain_value(s, c).real(), 1e-14);
}

TEST(Renormalizer, IdentitiesHoldForAllCumulantStructures) {
    EnsembleSpec diag_heavy = builtin("gue", 24);
    diag_heavy.w2 = 2.5;  // w2~ = 1.5
    for (const EnsembleSpec& spec : {builtin("gue", 24), builtin("goe", 24), builtin("complex_sigma(0.6)", 24),
                                     builtin("antisymmetric_imaginary", 24), diag_heavy}) {
        const WignerSample w = sample(spec, 12);
        const SpectralData s = diagonalize(w);
        Renormalizer ren(w, s);
        const Observable a = observables::random_traceless(24, 1), b = observables::traceless_signs(24);
        for (const cdouble z : {cdouble(0.0, 0.1), cdouble(1.2, -0.3)}) {
            EXPECT_LE(ren.recomposition_residual(z), 1e-10) << spec.label;
            EXPECT_LE(ren.two_g_expansion_residual(z, {-0.4, 0.2}, a.matrix(), b.matrix()), 1e-10) << spec.label;
        }
    }
}

TEST(Renormalizer, MatchesDefinition) {
    EnsembleSpec spec = builtin("complex_sigma(0.3)", 12);
    spec.w2 = 2.0;
    const WignerSample w = sample(spec, 5);
    const SpectralData s = diagonalize(w);
    Renormalizer ren(w, s);
    const cdouble z(0.2, 0.4);
    const Eigen::MatrixXcd g = resolvent(s, z);
    const double sg = spec.sigma, wt = spec.w2_tilde();
    const Eigen::MatrixXcd expected = w.matrix() * g + (g.trace() / 12.0) * g + (sg / 12.0) * g.transpose() * g +
                                      (wt / 12.0) * g.diagonal().asDiagonal() * g;
    EXPECT_LE((ren.underline_wg(z) - expected).cwiseAbs().maxCoeff(), 1e-13);
    const Observable a = observables::random_traceless(12, 3);
    EXPECT_NEAR(std::abs(ren.wg(z, a) - (expected * a.matrix()).trace() / 12.0), 0.0, 1e-13);
    const Observable zero(Eigen::MatrixXcd::Zero(12, 12));
    EXPECT_EQ(ren.wg1g2(z, z, zero, a), cdouble(0.0));
}

TEST(Renormalizer, GaussianMeanIsZero) {
    const long n = 64;
    const Observable a = observables::traceless_signs(n);
    const cdouble z(0.0, 0.1);
    double sum = 0.0, sum2 = 0.0;
    const int k = 200;
    for (int t = 0; t < k; ++t) {
        const WignerSample w = sample(builtin("gue", n), mix_keys({77, static_cast<std::uint64_t>(t)}));
        const SpectralData s = diagonalize(w);
        Renormalizer ren(w, s);
        const double v = ren.wg(z, a).real();
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / k, se = std::sqrt((sum2 / k - mean * mean) / (k - 1));
    EXPECT_LE(std::abs(mean), 3.0 * se);
}
