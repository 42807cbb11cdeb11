#include "ethlab/error.hpp"
#include "ethlab/ensemble.hpp"
#include "ethlab/eth_stats.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ethlab;

TEST(Overlap, IdentityObservable) {
    const SpectralData s = diagonalize(sample(builtin("gue", 20), 1));
    const OverlapMatrix m = overlap_matrix(s, observables::identity(20), OverlapKind::plain);
    EXPECT_LE((m.entries - Eigen::MatrixXcd::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(eth_deviation(m, 1.0).max_total, 1e-12);
    const OverlapMatrix conj = overlap_matrix(s, observables::identity(20), OverlapKind::conjugated);
    EXPECT_EQ(conj_eth_deviation(conj, 1.0, transpose_overlap(s)), 0.0);
}

TEST(Overlap, PlainIsHermitianAndParseval) {
    const SpectralData s = diagonalize(sample(builtin("complex_sigma(0.2)", 24), 3));
    const Observable a = observables::random_traceless(24, 8);
    const OverlapMatrix m = overlap_matrix(s, a, OverlapKind::plain);
    EXPECT_LE((m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    const Eigen::MatrixXcd au = a.matrix() * s.eigenvectors();
    for (long i = 0; i < 24; ++i) {
        EXPECT_NEAR(m.entries.row(i).squaredNorm(), au.col(i).squaredNorm(), 1e-12);
        EXPECT_LE(au.col(i).squaredNorm(), a.op_norm() * a.op_norm() + 1e-12);
    }
}

TEST(Overlap, DegenerateEnsembles) {
    const long n = 32;
    const OverlapMatrix goe = transpose_overlap(diagonalize(sample(builtin("goe", n), 2)));
    EXPECT_LE((goe.entries.cwiseAbs() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    const OverlapMatrix anti = transpose_overlap(diagonalize(sample(builtin("antisymmetric_imaginary", n), 2)));
    EXPECT_LE((anti.entries.cwiseAbs() - Eigen::MatrixXd::Identity(n, n).rowwise().reverse()).cwiseAbs().maxCoeff(),
              1e-10);
}

TEST(Overlap, GoeConjugatedEqualsPlain) {
    const SpectralData s = diagonalize(sample(builtin("goe", 16), 5));
    const Observable a = observables::traceless_signs(16);
    const OverlapMatrix plain = overlap_matrix(s, a, OverlapKind::plain);
    const OverlapMatrix conj = overlap_matrix(s, a, OverlapKind::conjugated);
    EXPECT_EQ(plain.entries, conj.entries);
    EXPECT_DOUBLE_EQ(conj_eth_deviation(conj, 0.0, transpose_overlap(s)), eth_deviation(plain, 0.0).max_total);
}

TEST(EthDeviation, TrivialCases) {
    const OverlapMatrix id{Eigen::MatrixXcd::Identity(5, 5), OverlapKind::plain};
    EXPECT_EQ(eth_deviation(id, 1.0).max_total, 0.0);
    const SpectralData one = diagonalize(Eigen::MatrixXcd::Zero(1, 1));
    const Observable zero(Eigen::MatrixXcd::Zero(1, 1));
    EXPECT_EQ(eth_deviation(overlap_matrix(one, zero, OverlapKind::plain), 0.0).max_total, 0.0);
}

TEST(EthDeviation, PhaseInvariance) {
    const SpectralData s = diagonalize(sample(builtin("gue", 12), 7));
    Eigen::MatrixXcd u = s.eigenvectors();
    for (long j = 0; j < 12; ++j) u.col(j) *= std::polar(1.0, 0.37 * j);
    const SpectralData rotated(s.eigenvalues(), u, false);
    const Observable a = observables::random_traceless(12, 2);
    EXPECT_NEAR(eth_deviation(overlap_matrix(s, a, OverlapKind::plain), 0.0).max_total,
                eth_deviation(overlap_matrix(rotated, a, OverlapKind::plain), 0.0).max_total, 1e-14);
}

TEST(XiWindow, DeltaOverlaps) {
    const OverlapMatrix id{Eigen::MatrixXcd::Identity(100, 100), OverlapKind::plain};
    EXPECT_NEAR(xi_window(id, 5), 3.0, 1e-14);
    const OverlapMatrix zero{Eigen::MatrixXcd::Zero(10, 10), OverlapKind::plain};
    EXPECT_EQ(xi_window(zero, 3), 0.0);
    EXPECT_THROW((void)xi_window(zero, 0), InvalidArgument);
    EXPECT_THROW((void)xi_window(zero, 11), InvalidArgument);
}

TEST(XiWindow, MatchesBruteForce) {
    const SpectralData s = diagonalize(sample(builtin("gue", 15), 4));
    const OverlapMatrix m = overlap_matrix(s, observables::random_traceless(15, 1), OverlapKind::plain);
    for (long j : {1L, 2L, 4L}) {
        double best = 0.0;
        for (long i0 = 0; i0 < 15; ++i0) {
            for (long j0 = 0; j0 < 15; ++j0) {
                double acc = 0.0;
                for (long i = 0; i < 15; ++i) {
                    for (long k = 0; k < 15; ++k) {
                        if (std::abs(i - i0) < j && std::abs(k - j0) < j) acc += std::norm(m.entries(i, k));
                    }
                }
                best = std::max(best, acc);
            }
        }
        EXPECT_NEAR(xi_window(m, j), std::sqrt(15.0 * best / (4.0 * j * j)), 1e-12) << j;
    }
}

TEST(Summary, FieldsAndDefaultWindow) {
    EXPECT_EQ(default_window(1024), 2);
    EXPECT_EQ(default_window(512), 2);
    EXPECT_EQ(default_window(1), 1);
    const SpectralData s = diagonalize(sample(builtin("gue", 64), 3));
    const EthSummary sum = summarize(s, observables::traceless_signs(64), 2);
    EXPECT_EQ(sum.lambda_j, sum.xi_j + sum.xi_bar_j);
    EXPECT_GE(sum.max_conj_dev, 0.0);
    EXPECT_GE(sum.pi_j, 0.0);
}

TEST(Summary, GoePiIsLarge) {
    const long n = 256, j = 2;
    const SpectralData s = diagonalize(sample(builtin("goe", n), 1));
    const EthSummary sum = summarize(s, observables::traceless_signs(n), j);
    EXPECT_NEAR(sum.pi_j, std::sqrt(n * (2.0 * j - 1.0)) / (2.0 * j), 1e-10);
}

TEST(Summary, GueFunctionalsBounded) {
    const long n = 512;
    const long j = default_window(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SpectralData s = diagonalize(sample(builtin("gue", n), seed));
        const EthSummary sum = summarize(s, observables::traceless_signs(n), j);
        EXPECT_LE(sum.xi_j, std::pow(double(n), 0.2)) << seed;
        EXPECT_LE(sum.pi_j, std::pow(double(n), 0.2)) << seed;
    }
}

TEST(Comparability, WithinTwoDecades) {
    const long n = 512;
    const long j = default_window(n);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SpectralData s = diagonalize(sample(builtin("gue", n), seed));
        const ComparabilityCheck c = comparability(s, observables::traceless_signs(n), j, 0.0, 0.0);
        EXPECT_GE(c.normalized, 1e-2) << seed;
        EXPECT_LE(c.normalized, 1e2) << seed;
    }
}

TEST(LambdaPlus, IncludesNorm) {
    const SpectralData s = diagonalize(sample(builtin("gue", 32), 3));
    const Observable a = observables::traceless_signs(32);
    const double lp = lambda_plus(s, a, 3.2);
    const EthSummary sum = summarize(s, a, 4);
    EXPECT_NEAR(lp, sum.lambda_j + 1.0, 1e-14);
}
