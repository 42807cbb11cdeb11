#include "ethlab/ensemble.hpp"
#include "ethlab/error.hpp"
#include "ethlab/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ethlab;

namespace {

struct Running {
    double sum = 0.0, sum2 = 0.0;
    long k = 0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++k;
    }
    [[nodiscard]] double mean() const { return sum / k; }
    [[nodiscard]] double se() const {
        const double m = mean();
        return std::sqrt((sum2 / k - m * m) / (k - 1));
    }
};

} // namespace

TEST(Builtin, Parameters) {
    const EnsembleSpec goe = builtin("goe", 4);
    EXPECT_EQ(goe.symmetry, Symmetry::real_symmetric);
    EXPECT_EQ(goe.sigma, 1.0);
    EXPECT_EQ(goe.w2, 2.0);
    EXPECT_EQ(goe.w2_tilde(), 0.0);
    const EnsembleSpec gue = builtin("gue", 4);
    EXPECT_EQ(gue.symmetry, Symmetry::complex_hermitian);
    EXPECT_EQ(gue.sigma, 0.0);
    EXPECT_EQ(gue.w2, 1.0);
    const EnsembleSpec anti = builtin("antisymmetric_imaginary", 4);
    EXPECT_EQ(anti.sigma, -1.0);
    EXPECT_EQ(anti.w2, 0.0);
    EXPECT_EQ(builtin("complex_sigma(0.5)").sigma, 0.5);
    EXPECT_EQ(builtin("complex_sigma(-0.25)").w2_tilde(), 0.0);
    EXPECT_EQ(builtin("rademacher_real").entry_law, EntryLaw::rademacher);
    EXPECT_THROW((void)builtin("wishart"), InvalidArgument);
    EXPECT_THROW((void)builtin("complex_sigma(2)"), InvalidArgument);
    EXPECT_THROW((void)builtin("complex_sigma(x)"), InvalidArgument);
}

TEST(EnsembleSpec, Validation) {
    EnsembleSpec s = builtin("gue", 3);
    EXPECT_NO_THROW(s.validate());
    s.sigma = 1.5;
    EXPECT_THROW(s.validate(), InvalidArgument);
    s = builtin("goe", 3);
    s.sigma = 0.5;
    EXPECT_THROW(s.validate(), InvalidArgument);
    EXPECT_THROW((void)builtin("gue", 0), InvalidArgument);
    s = builtin("gue", 2);
    s.w2 = -1.0;
    EXPECT_THROW(s.validate(), InvalidArgument);
    EXPECT_THROW((void)sample(s, 1), InvalidArgument);
}

TEST(EnsembleSpec, NameRoundTrip) {
    for (const auto s : {Symmetry::real_symmetric, Symmetry::complex_hermitian}) {
        EXPECT_EQ(symmetry_from_string(to_string(s)), s);
    }
    for (const auto l : {EntryLaw::gaussian, EntryLaw::rademacher, EntryLaw::uniform}) {
        EXPECT_EQ(entry_law_from_string(to_string(l)), l);
    }
}

TEST(Sample, GoeIsRealSymmetric) {
    const WignerSample w = sample(builtin("goe", 2), 99);
    EXPECT_TRUE(w.matrix().imag().isZero(0.0));
    EXPECT_EQ(w.matrix(), w.matrix().transpose());
}

TEST(Sample, HermitianByConstructionAndReproducible) {
    for (const char* name : {"gue", "complex_sigma(0.3)", "antisymmetric_imaginary", "rademacher_real"}) {
        const WignerSample a = sample(builtin(name, 17), 5);
        const WignerSample b = sample(builtin(name, 17), 5);
        const WignerSample c = sample(builtin(name, 17), 6);
        EXPECT_EQ(a.matrix(), a.matrix().adjoint()) << name;
        EXPECT_EQ(a.matrix(), b.matrix()) << name;
        EXPECT_NE(a.matrix(), c.matrix()) << name;
        EXPECT_EQ(a.seed(), 5u);
        EXPECT_EQ(a.n(), 17);
    }
}

TEST(Sample, GueSecondMomentOfOffDiagonal) {
    const long n = 64;
    Running r;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const WignerSample w = sample(builtin("gue", n), seed);
        r.add(n * std::norm(w.matrix()(0, 1)));
    }
    EXPECT_LE(std::abs(r.mean() - 1.0), 3.0 * r.se());
}

TEST(Sample, ComplexSigmaSquareMoment) {
    const long n = 16;
    EnsembleSpec s = builtin("complex_sigma(-0.5)", n);
    Running re, im;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
        const cdouble w = sample(s, seed).matrix()(0, 1);
        const cdouble sq = static_cast<double>(n) * w * w;
        re.add(sq.real());
        im.add(sq.imag());
    }
    EXPECT_LE(std::abs(re.mean() + 0.5), 3.0 * re.se());
    EXPECT_LE(std::abs(im.mean()), 3.0 * im.se());
}

TEST(Sample, GoeDiagonalVariance) {
    const long n = 4;
    Running r;
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
        r.add(std::norm(sample(builtin("goe", n), seed).matrix()(2, 2)));
    }
    EXPECT_LE(std::abs(r.mean() - 2.0 / n), 3.0 * r.se());
}

TEST(Sample, UniformLawHasUnitVariance) {
    EnsembleSpec s = builtin("gue", 8);
    s.entry_law = EntryLaw::uniform;
    Running r;
    for (std::uint64_t seed = 0; seed < 5000; ++seed) r.add(8.0 * std::norm(sample(s, seed).matrix()(1, 5)));
    EXPECT_LE(std::abs(r.mean() - 1.0), 3.0 * r.se());
}

TEST(Sample, AntisymmetricImaginarySpectrumIsSymmetric) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const WignerSample w = sample(builtin("antisymmetric_imaginary", 8), seed);
        EXPECT_TRUE(w.matrix().real().isZero(0.0));
        const Eigen::VectorXd ev = diagonalize(w).eigenvalues();
        EXPECT_LE((ev + ev.reverse()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(MomentAudit, GueNotFlagged) {
    const MomentAudit a = moment_audit(builtin("gue"), 100000, 3);
    EXPECT_FALSE(a.any_flagged());
    EXPECT_LE(std::abs(a.abs2_od.mean.real() - 1.0), 4.0 * a.abs2_od.std_error);
    EXPECT_LE(std::abs(a.mean_od.mean), 4.0 * a.mean_od.std_error * std::sqrt(2.0));
    EXPECT_EQ(a.abs_moments_od.size(), 8u);
    EXPECT_GT(a.max_abs_moment, 0.0);
}

TEST(MomentAudit, RademacherFourthMomentIsExact) {
    const MomentAudit a = moment_audit(builtin("rademacher_real"), 1000, 11);
    EXPECT_DOUBLE_EQ(a.abs_moments_od[3], 1.0);
    EXPECT_DOUBLE_EQ(a.abs2_od.mean.real(), 1.0);
    EXPECT_FALSE(a.any_flagged());
}

TEST(MomentAudit, CenteringForEverySpec) {
    for (const char* name : {"gue", "goe", "complex_sigma(0.7)", "antisymmetric_imaginary", "rademacher_real"}) {
        const MomentAudit a = moment_audit(builtin(name), 20000, 1);
        EXPECT_FALSE(a.mean_od.flagged) << name;
        EXPECT_FALSE(a.square_od.flagged) << name;
    }
    EXPECT_THROW((void)moment_audit(builtin("gue"), 99), InvalidArgument);
}
