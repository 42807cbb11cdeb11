#pragma once

// Empirical resolvent functionals against their semicircle predictions and
// error scales: single-G laws, two-resolvent laws (with transposes and Im
// parts), isotropic laws, the <Im G A> variance, and renormalized products.

#include "ethlab/ensemble.hpp"
#include "ethlab/observables.hpp"
#include "ethlab/semicircle.hpp"
#include "ethlab/spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace ethlab {

/// Admissibility threshold exponent: the regime L >= N^0.1 is checked.
inline constexpr double kAdmissibleExponent = 0.1;
/// Slack exponent standing in for stochastic domination: pass iff ratio <= N^0.2.
inline constexpr double kSlackExponent = 0.2;

[[nodiscard]] double slack(long n);

struct Regime {
    double eta_star = 0.0;
    double rho_star = 0.0;
    double big_l = 0.0;  // N * min(eta rho)
    bool admissible = false;
};

[[nodiscard]] Regime regime(cdouble z1, cdouble z2, long n);

struct LawReport {
    ErrorScaleKind kind{};
    long n = 0;
    cdouble z1;
    cdouble z2;
    cdouble empirical;
    cdouble prediction;
    double abs_error = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    Regime regime;

    [[nodiscard]] bool passes(double threshold) const noexcept { return ratio <= threshold; }
};

/// Fills abs_error = |empirical - prediction| and ratio = abs_error / bound.
[[nodiscard]] LawReport make_report(ErrorScaleKind kind, long n, cdouble z1, cdouble z2, cdouble empirical,
                                    cdouble prediction, double bound);

/// Traceless A: <GA> against 0 at scale sqrt(rho)/(N sqrt(eta)). Otherwise <GA>
/// against m <A> at scale 1/(N eta).
[[nodiscard]] LawReport check_single_g(ChainEvaluator& eval, cdouble z, const Observable& a);

/// <x, G y> against m <x, y> at scale sqrt(rho/(N eta)).
[[nodiscard]] LawReport check_iso_single_g(ChainEvaluator& eval, cdouble z, const Eigen::VectorXcd& x,
                                           const Eigen::VectorXcd& y);

struct TwoGOptions {
    /// E chi_od^2 of the sampled ensemble; enters GGt_sigma and ImImT.
    double sigma = 0.0;
    /// Use G_2^t in GAGA / ImAImA.
    bool transpose_second = false;
    /// Lambda_+ factors multiplying the GAGA / ImAImA scales; 1 by default.
    double lambda_a = 1.0;
    double lambda_b = 1.0;
    /// Largest |sigma| accepted by the transpose laws.
    double max_abs_sigma = 0.95;
};

/// kind in {GAGA, ImAImA, GGt_sigma, ImImT, GG_plain}. A and A' are ignored by
/// the kinds without observables. Throws DomainError for |sigma| beyond
/// max_abs_sigma and DegenerateError for a vanishing stability factor.
[[nodiscard]] LawReport check_two_g(ChainEvaluator& eval, ErrorScaleKind kind, cdouble z1, cdouble z2,
                                    const Observable& a, const Observable& a_prime,
                                    const TwoGOptions& options = {});

/// |<G1 G2 A>|, |<Im G1 A G2>| and |<Im G1 A Im G2>| against their bounds,
/// with the measured Lambda_+ of A. Requires <A> = 0.
[[nodiscard]] std::array<LawReport, 3> check_bounds_two_g(ChainEvaluator& eval, cdouble z1, cdouble z2,
                                                          const Observable& a, double lambda_plus);

/// |<x, G1 A G2 y>| against Lambda_+ sqrt(rho*/eta*). Requires <A> = 0.
[[nodiscard]] LawReport check_iso_two_g(ChainEvaluator& eval, cdouble z1, cdouble z2, const Observable& a,
                                        const Eigen::VectorXcd& x, const Eigen::VectorXcd& y,
                                        double lambda_plus);

struct VarianceReport {
    long n_trials = 0;
    double empirical = 0.0;   // mean of <Im G A>^2 over fresh samples
    double prediction = 0.0;  // <AA*>/(2N^2) (Im m/eta - Re m')
    double ratio = 0.0;
    double ci_low = 0.0;      // 95% bootstrap interval of the ratio
    double ci_high = 0.0;
    double mean = 0.0;        // mean of <Im G A>
};

/// Monte Carlo E|<Im G A>|^2 over `n_trials` fresh samples (n_trials >= 500),
/// trial t drawn with seed mix(base_seed, t). Work is split across `workers`
/// threads; the result does not depend on the worker count.
[[nodiscard]] VarianceReport check_variance_im_ga(const EnsembleSpec& spec, cdouble z, const Observable& a,
                                                  long n_trials, std::uint64_t base_seed, int workers = 1);

/// <Im G A> for one sample: N^{-1} sum_a Im(1/(lambda_a - z)) <u_a, A u_a>.
[[nodiscard]] double im_trace_ga(const SpectralData& spectral, cdouble z, const Observable& a);

/// Dense resolvent products for one sample. Caches G(z) and W G(z) per z.
/// Not thread-safe.
class Renormalizer {
public:
    Renormalizer(const WignerSample& sample, const SpectralData& spectral);

    /// WG + <G> G + (sigma/N) G^t G + (w2~/N) diag(G) G.
    [[nodiscard]] Eigen::MatrixXcd underline_wg(cdouble z);

    /// <underline(WG) A>.
    [[nodiscard]] cdouble wg(cdouble z, const Observable& a);

    /// <underline(W G1 A G2) A'>, expanded as underline(WG1) A G2 + <G1AG2> G2
    /// + (sigma/N)(G1AG2)^t G2 + (w2~/N) diag(G1AG2) G2.
    [[nodiscard]] cdouble wg1g2(cdouble z1, cdouble z2, const Observable& a, const Observable& a_prime);

    /// max_ij |G - (m - m underline(WG) + (m sigma/N) G^t G + (m w2~/N) diag(G) G
    /// + m <G - m> G)|_ij.
    [[nodiscard]] double recomposition_residual(cdouble z);

    /// max_ij |LHS - RHS| of the two-resolvent expansion of G1 B1 G2 B2, with the
    /// renormalized term computed directly from the cumulant definition.
    [[nodiscard]] double two_g_expansion_residual(cdouble z1, cdouble z2, const Eigen::MatrixXcd& b1,
                                                  const Eigen::MatrixXcd& b2);

    [[nodiscard]] const Eigen::MatrixXcd& g(cdouble z);
    [[nodiscard]] const Eigen::MatrixXcd& wg_product(cdouble z);

private:
    [[nodiscard]] Eigen::MatrixXcd cumulant_correction(const Eigen::MatrixXcd& left,
                                                       const Eigen::MatrixXcd& right) const;

    const WignerSample& sample_;
    const SpectralData& spectral_;
    double sigma_;
    double w2_tilde_;
    std::map<std::pair<double, double>, Eigen::MatrixXcd> g_cache_;
    std::map<std::pair<double, double>, Eigen::MatrixXcd> wg_cache_;
};

} // namespace ethlab
