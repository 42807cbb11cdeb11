#pragma once

// Eigenvector overlap statistics: max deviations from <A> delta_ij, overlaps
// with the conjugate eigenbasis, and the window-averaged functionals
// Xi_J, Xi_bar_J, Lambda_J = Xi_J + Xi_bar_J and Pi_J = Xi_bar_J(I).

#include "ethlab/observables.hpp"
#include "ethlab/spectral.hpp"

#include <Eigen/Dense>

namespace ethlab {

enum class OverlapKind {
    plain,           // <u_i, A u_j>
    conjugated,      // <u_i, A conj(u_j)>
    transpose_basis  // <u_i, conj(u_j)>; ignores A
};

struct OverlapMatrix {
    Eigen::MatrixXcd entries;
    OverlapKind kind;
};

[[nodiscard]] OverlapMatrix overlap_matrix(const SpectralData& spectral, const Observable& a, OverlapKind kind);
[[nodiscard]] OverlapMatrix transpose_overlap(const SpectralData& spectral);

struct EthDeviation {
    double max_total = 0.0;    // max_ij |M_ij - <A> delta_ij|
    double max_diag = 0.0;     // max_i |M_ii - <A>|
    double max_offdiag = 0.0;  // max_{i != j} |M_ij|
};

[[nodiscard]] EthDeviation eth_deviation(const OverlapMatrix& m, double trace_mean);

/// max_ij |<u_i, A conj(u_j)> - <A> <u_i, conj(u_j)>|.
[[nodiscard]] double conj_eth_deviation(const OverlapMatrix& conjugated, double trace_mean,
                                        const OverlapMatrix& transpose);

/// sqrt( max_{i0,j0} N/(2J)^2 sum_{|i-i0|<J, |j-j0|<J} |M_ij|^2 ). Window indices
/// are clipped to [1, N]; the (2J)^2 normalization is kept for clipped windows.
[[nodiscard]] double xi_window(const OverlapMatrix& m, long j);

struct EthSummary {
    long j = 1;
    double max_diag_dev = 0.0;
    double max_offdiag = 0.0;
    double max_conj_dev = 0.0;
    double xi_j = 0.0;
    double xi_bar_j = 0.0;
    double lambda_j = 0.0;
    double pi_j = 0.0;
};

[[nodiscard]] EthSummary summarize(const SpectralData& spectral, const Observable& a, long j);

/// Default window ceil(N^0.1).
[[nodiscard]] long default_window(long n);

/// Lambda_+ = Lambda_J + ||A|| with J = ceil(L) capped to [1, N].
[[nodiscard]] double lambda_plus(const SpectralData& spectral, const Observable& a, double big_l);

struct ComparabilityCheck {
    double ratio = 0.0;      // <Im G1 B Im G2 B> / (rho1 rho2)
    double xi_squared = 0.0; // Xi_J(B)^2
    double normalized = 0.0; // ratio / xi_squared
};

/// Compares <Im G1 B Im G2 B>/(rho1 rho2) with Xi_J^2 at z_k = E_k + i eta(E_k, J).
[[nodiscard]] ComparabilityCheck comparability(const SpectralData& spectral, const Observable& b, long j,
                                               double e1, double e2);

} // namespace ethlab
