#pragma once

// Deterministic large-N analytics of the Wigner semicircle law: Stieltjes
// transform, density, quantiles, the eta(E, J) solver, two-resolvent limits
// and the error scales every local-law comparison is measured against.

#include <complex>
#include <string>
#include <string_view>

namespace ethlab {

using cdouble = std::complex<double>;

/// z together with its semicircle data. eta = |Im z|, rho = |Im m| / pi.
struct SpectralPoint {
    cdouble z;
    double eta;
    cdouble m;
    double rho;
};

enum class ErrorScaleKind {
    avg_single_G,
    traceless_single_G,
    iso_single_G,
    GAGA,
    ImAImA,
    GGt_sigma,
    ImImT,
    GG_plain,
    iso_two_G,
    variance_ImGA,
    // Bounds (not limits) for two resolvents with one traceless observable.
    GGA_bound,
    ImGAG_bound,
    ImGAImG_bound,
    // Renormalized products.
    renorm_WG,
    renorm_WGA,
    renorm_WGAGA,
};

[[nodiscard]] std::string_view to_string(ErrorScaleKind kind);
[[nodiscard]] ErrorScaleKind error_scale_kind_from_string(std::string_view name);

namespace semicircle {

/// m(z): root of m^2 + z m + 1 = 0 with Im m * Im z > 0. Throws DomainError for real z.
[[nodiscard]] cdouble stieltjes(cdouble z);

/// dm/dz = m^2 / (1 - m^2). Throws DomainError where |1 - m^2| < 1e-12.
[[nodiscard]] cdouble stieltjes_derivative(cdouble z);

/// rho(z) = |Im m(z)| / pi.
[[nodiscard]] double rho(cdouble z);

[[nodiscard]] SpectralPoint point(cdouble z);

/// Semicircle density sqrt((4 - x^2)_+) / (2 pi) on the real line.
[[nodiscard]] double density(double x);

/// Closed-form CDF of the semicircle law.
[[nodiscard]] double cdf(double x);

/// Classical location gamma_i: cdf(gamma_i) = i / N, 1 <= i <= N.
[[nodiscard]] double quantile(long i, long n);

/// Unique eta > 0 with N * eta * rho(E + i eta) = J. Requires E in [-2, 2] and
/// 0 < J < N / pi (the supremum of the left-hand side).
[[nodiscard]] double solve_eta(double energy, double j, long n);

/// Deterministic two-resolvent limits. `kind` must be one of GG_plain,
/// GGt_sigma, GAGA, ImAImA, ImImT; `pairing` is <A A'>.
[[nodiscard]] cdouble predict(ErrorScaleKind kind, cdouble z1, cdouble z2, double sigma,
                              double pairing = 1.0);

/// Optional multiplicative factors appearing in the error scales. The
/// Lambda_+ / Pi_+ factors default to 1; `pairing` is <A A*> for variance_ImGA.
struct ScaleFactors {
    double lambda_a = 1.0;
    double lambda_b = 1.0;
    double pi_plus = 1.0;
    double pairing = 1.0;
};

/// Positive error scale for `kind`, with rho* = max rho, eta* = min eta and
/// L = N min(eta rho). Single-parameter kinds ignore z2.
[[nodiscard]] double error_scale(ErrorScaleKind kind, cdouble z1, cdouble z2, long n,
                                 const ScaleFactors& factors = {});

} // namespace semicircle
} // namespace ethlab
