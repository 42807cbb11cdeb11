#include "ethlab/semicircle.hpp"

#include "ethlab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace ethlab {

namespace {

constexpr std::array<std::pair<ErrorScaleKind, std::string_view>, 16> kKindNames{{
    {ErrorScaleKind::avg_single_G, "avg_single_G"},
    {ErrorScaleKind::traceless_single_G, "traceless_single_G"},
    {ErrorScaleKind::iso_single_G, "iso_single_G"},
    {ErrorScaleKind::GAGA, "GAGA"},
    {ErrorScaleKind::ImAImA, "ImAImA"},
    {ErrorScaleKind::GGt_sigma, "GGt_sigma"},
    {ErrorScaleKind::ImImT, "ImImT"},
    {ErrorScaleKind::GG_plain, "GG_plain"},
    {ErrorScaleKind::iso_two_G, "iso_two_G"},
    {ErrorScaleKind::variance_ImGA, "variance_ImGA"},
    {ErrorScaleKind::GGA_bound, "GGA_bound"},
    {ErrorScaleKind::ImGAG_bound, "ImGAG_bound"},
    {ErrorScaleKind::ImGAImG_bound, "ImGAImG_bound"},
    {ErrorScaleKind::renorm_WG, "renorm_WG"},
    {ErrorScaleKind::renorm_WGA, "renorm_WGA"},
    {ErrorScaleKind::renorm_WGAGA, "renorm_WGAGA"},
}};

constexpr double kDegenerateStability = 1e-8;

void require_nonreal(cdouble z, const char* what) {
    if (z.imag() == 0.0) {
        throw DomainError(std::string(what) + ": spectral parameter must have Im z != 0");
    }
}

} // namespace

std::string_view to_string(ErrorScaleKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

ErrorScaleKind error_scale_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    throw InvalidArgument("unknown error scale kind: " + std::string(name));
}

namespace semicircle {

cdouble stieltjes(cdouble z) {
    require_nonreal(z, "stieltjes");
    // sqrt(z-2)*sqrt(z+2) ~ z at infinity with its cut on [-2, 2]. The two roots
    // are (-z +- s)/2 with product 1; form the large one without cancellation
    // and invert it.
    const cdouble s = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
    const cdouble r_plus = 0.5 * (-z + s);
    const cdouble r_minus = 0.5 * (-z - s);
    const cdouble big = std::abs(r_plus) >= std::abs(r_minus) ? r_plus : r_minus;
    cdouble m = 1.0 / big;
    // For Im z != 0 no root lies on the unit circle, so the small root carries the
    // correct sign. The fallback only guards against rounding right at the cut.
    if (m.imag() * z.imag() <= 0.0) m = big;
    return m;
}

cdouble stieltjes_derivative(cdouble z) {
    const cdouble m = stieltjes(z);
    const cdouble denom = 1.0 - m * m;
    if (std::abs(denom) < 1e-12) {
        throw DomainError("stieltjes_derivative: z too close to a spectral edge");
    }
    return m * m / denom;
}

double rho(cdouble z) { return std::abs(stieltjes(z).imag()) / std::numbers::pi; }

SpectralPoint point(cdouble z) {
    const cdouble m = stieltjes(z);
    return {z, std::abs(z.imag()), m, std::abs(m.imag()) / std::numbers::pi};
}

double density(double x) {
    const double r = 4.0 - x * x;
    return r > 0.0 ? std::sqrt(r) / (2.0 * std::numbers::pi) : 0.0;
}

double cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
           std::asin(0.5 * x) / std::numbers::pi;
}

double quantile(long i, long n) {
    if (n < 1 || i < 1 || i > n) {
        throw InvalidArgument("quantile: need 1 <= i <= N");
    }
    if (i == n) return 2.0;
    if (2 * i == n) return 0.0;
    const double target = static_cast<double>(i) / static_cast<double>(n);
    double lo = -2.0;
    double hi = 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (cdf(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double solve_eta(double energy, double j, long n) {
    if (!(energy >= -2.0 && energy <= 2.0)) {
        throw DomainError("solve_eta: E must lie in [-2, 2]");
    }
    const double nd = static_cast<double>(n);
    // eta * Im m increases from 0 to 1, so N eta rho is bounded by N / pi.
    if (!(j > 0.0) || j >= nd / std::numbers::pi) {
        throw DomainError("solve_eta: no solution, need 0 < J < N/pi");
    }
    auto lhs = [&](double eta) { return nd * eta * rho(cdouble(energy, eta)); };

    double lo = 0.0;
    double hi = 1.0;
    while (lhs(hi) < j) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw DomainError("solve_eta: bracketing failed");
    }
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (lhs(mid) < j ? lo : hi) = mid;
    }
    const double eta_lo = lo > 0.0 ? lo : hi;
    return std::abs(lhs(eta_lo) - j) <= std::abs(lhs(hi) - j) ? eta_lo : hi;
}

cdouble predict(ErrorScaleKind kind, cdouble z1, cdouble z2, double sigma, double pairing) {
    require_nonreal(z1, "predict");
    require_nonreal(z2, "predict");
    const cdouble m1 = stieltjes(z1);
    const cdouble m2 = stieltjes(z2);
    switch (kind) {
    case ErrorScaleKind::GG_plain: {
        const cdouble stab = 1.0 - m1 * m2;
        if (std::abs(stab) < kDegenerateStability) throw DegenerateError("predict: 1 - m1 m2 vanishes");
        return m1 * m2 / stab;
    }
    case ErrorScaleKind::GGt_sigma: {
        if (std::abs(sigma) > 1.0) throw DomainError("predict: |sigma| must be <= 1");
        const cdouble stab = 1.0 - sigma * m1 * m2;
        if (std::abs(stab) < kDegenerateStability) throw DegenerateError("predict: 1 - sigma m1 m2 vanishes");
        return m1 * m2 / stab;
    }
    case ErrorScaleKind::GAGA:
        return m1 * m2 * pairing;
    case ErrorScaleKind::ImAImA:
        return cdouble(m1.imag() * m2.imag() * pairing, 0.0);
    case ErrorScaleKind::ImImT: {
        if (std::abs(sigma) > 1.0 - 1e-6) throw DomainError("predict: ImImT needs |sigma| <= 1 - 1e-6");
        const double s1 = std::abs(1.0 - sigma * m1 * m2);
        const double s2 = std::abs(1.0 - sigma * std::conj(m1) * m2);
        if (s1 < kDegenerateStability || s2 < kDegenerateStability) {
            throw DegenerateError("predict: transpose stability factor vanishes");
        }
        const double a1 = std::norm(m1);
        const double a2 = std::norm(m2);
        return cdouble(m1.imag() * m2.imag() * (1.0 - sigma * sigma * a1 * a2) / (s1 * s1 * s2 * s2), 0.0);
    }
    default:
        throw InvalidArgument("predict: kind has no deterministic limit: " + std::string(to_string(kind)));
    }
}

double error_scale(ErrorScaleKind kind, cdouble z1, cdouble z2, long n, const ScaleFactors& f) {
    const SpectralPoint p1 = point(z1);
    const SpectralPoint p2 = point(z2);
    const double nd = static_cast<double>(n);
    const double rho_star = std::max(p1.rho, p2.rho);
    const double eta_star = std::min(p1.eta, p2.eta);
    const double big_l = nd * std::min(p1.eta * p1.rho, p2.eta * p2.rho);

    switch (kind) {
    case ErrorScaleKind::avg_single_G:
        return 1.0 / (nd * p1.eta);
    case ErrorScaleKind::traceless_single_G:
        return std::sqrt(p1.rho) / (nd * std::sqrt(p1.eta));
    case ErrorScaleKind::iso_single_G:
        return std::sqrt(p1.rho / (nd * p1.eta));
    case ErrorScaleKind::GAGA:
        return f.lambda_a * f.lambda_b * std::sqrt(rho_star / (nd * eta_star));
    case ErrorScaleKind::ImAImA:
        return f.lambda_a * f.lambda_b * p1.rho * p2.rho / std::sqrt(big_l);
    case ErrorScaleKind::GGt_sigma:
        return f.pi_plus * f.pi_plus * std::sqrt(rho_star / (nd * eta_star));
    case ErrorScaleKind::ImImT:
        return f.pi_plus * f.pi_plus * p1.rho * p2.rho / std::sqrt(big_l);
    case ErrorScaleKind::GG_plain:
        return 1.0 / (nd * p1.eta * p2.eta);
    case ErrorScaleKind::iso_two_G:
        return f.lambda_a * std::sqrt(rho_star / eta_star);
    case ErrorScaleKind::variance_ImGA: {
        const cdouble dm = stieltjes_derivative(z1);
        return f.pairing / (2.0 * nd * nd) * (std::abs(p1.m.imag()) / p1.eta - dm.real());
    }
    case ErrorScaleKind::GGA_bound:
        return std::sqrt(rho_star) * f.lambda_a / (nd * std::pow(eta_star, 1.5));
    case ErrorScaleKind::ImGAG_bound:
        return p1.rho * f.lambda_a / (big_l * std::sqrt(eta_star));
    case ErrorScaleKind::ImGAImG_bound:
        return p1.rho * p2.rho * f.lambda_a / (big_l * std::sqrt(eta_star));
    case ErrorScaleKind::renorm_WG:
        return p1.rho / (nd * p1.eta);
    case ErrorScaleKind::renorm_WGA:
        return f.lambda_a * std::sqrt(p1.rho) / (nd * std::sqrt(p1.eta));
    case ErrorScaleKind::renorm_WGAGA: {
        const double k = nd * eta_star * rho_star;
        return f.lambda_a * f.lambda_b * rho_star / std::sqrt(k);
    }
    }
    throw InvalidArgument("error_scale: unhandled kind");
}

} // namespace semicircle
} // namespace ethlab
