#include "ethlab/eth_stats.hpp"

#include "ethlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace ethlab {

OverlapMatrix overlap_matrix(const SpectralData& spectral, const Observable& a, OverlapKind kind) {
    if (kind == OverlapKind::transpose_basis) return transpose_overlap(spectral);
    if (a.n() != spectral.n()) throw InvalidArgument("overlap_matrix: dimension mismatch");
    const Eigen::MatrixXcd& u = spectral.eigenvectors();
    const Eigen::MatrixXcd& right = kind == OverlapKind::plain ? u : spectral.conj_eigenvectors();
    Eigen::MatrixXcd ar = a.diagonal() ? Eigen::MatrixXcd(a.matrix().diagonal().asDiagonal() * right)
                                       : Eigen::MatrixXcd(a.matrix() * right);
    Eigen::MatrixXcd m(u.cols(), u.cols());
    m.noalias() = u.adjoint() * ar;
    return {std::move(m), kind};
}

OverlapMatrix transpose_overlap(const SpectralData& spectral) {
    const Eigen::MatrixXcd& u = spectral.eigenvectors();
    Eigen::MatrixXcd m(u.cols(), u.cols());
    m.noalias() = u.adjoint() * spectral.conj_eigenvectors();
    return {std::move(m), OverlapKind::transpose_basis};
}

EthDeviation eth_deviation(const OverlapMatrix& m, double trace_mean) {
    EthDeviation out;
    const Eigen::Index n = m.entries.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == j) {
                out.max_diag = std::max(out.max_diag, std::abs(m.entries(i, i) - trace_mean));
            } else {
                out.max_offdiag = std::max(out.max_offdiag, std::abs(m.entries(i, j)));
            }
        }
    }
    out.max_total = std::max(out.max_diag, out.max_offdiag);
    return out;
}

double conj_eth_deviation(const OverlapMatrix& conjugated, double trace_mean, const OverlapMatrix& transpose) {
    if (conjugated.entries.rows() != transpose.entries.rows()) {
        throw InvalidArgument("conj_eth_deviation: dimension mismatch");
    }
    return (conjugated.entries - trace_mean * transpose.entries).cwiseAbs().maxCoeff();
}

double xi_window(const OverlapMatrix& m, long j) {
    const Eigen::Index n = m.entries.rows();
    if (j < 1 || j > n) throw InvalidArgument("xi_window: need 1 <= J <= N");
    // prefix(i, k) = sum of |M|^2 over rows < i and columns < k.
    Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            prefix(r + 1, c + 1) = std::norm(m.entries(r, c)) + prefix(r, c + 1) + prefix(r + 1, c) - prefix(r, c);
        }
    }
    double best = 0.0;
    for (Eigen::Index c0 = 0; c0 < n; ++c0) {
        const Eigen::Index c_lo = std::max<Eigen::Index>(0, c0 - j + 1);
        const Eigen::Index c_hi = std::min<Eigen::Index>(n, c0 + j);
        for (Eigen::Index r0 = 0; r0 < n; ++r0) {
            const Eigen::Index r_lo = std::max<Eigen::Index>(0, r0 - j + 1);
            const Eigen::Index r_hi = std::min<Eigen::Index>(n, r0 + j);
            const double s = prefix(r_hi, c_hi) - prefix(r_lo, c_hi) - prefix(r_hi, c_lo) + prefix(r_lo, c_lo);
            best = std::max(best, s);
        }
    }
    const double jd = static_cast<double>(j);
    return std::sqrt(std::max(0.0, static_cast<double>(n) * best / (4.0 * jd * jd)));
}

long default_window(long n) {
    return std::max(1L, static_cast<long>(std::ceil(std::pow(static_cast<double>(n), 0.1) - 1e-12)));
}

EthSummary summarize(const SpectralData& spectral, const Observable& a, long j) {
    const OverlapMatrix plain = overlap_matrix(spectral, a, OverlapKind::plain);
    const OverlapMatrix conj = overlap_matrix(spectral, a, OverlapKind::conjugated);
    const OverlapMatrix transpose = transpose_overlap(spectral);

    EthSummary out;
    out.j = j;
    const EthDeviation dev = eth_deviation(plain, a.trace_mean());
    out.max_diag_dev = dev.max_diag;
    out.max_offdiag = dev.max_offdiag;
    out.max_conj_dev = conj_eth_deviation(conj, a.trace_mean(), transpose);
    out.xi_j = xi_window(plain, j);
    out.xi_bar_j = xi_window(conj, j);
    out.lambda_j = out.xi_j + out.xi_bar_j;
    out.pi_j = xi_window(transpose, j);
    return out;
}

double lambda_plus(const SpectralData& spectral, const Observable& a, double big_l) {
    const long n = spectral.n();
    const long j = std::clamp(static_cast<long>(std::ceil(big_l)), 1L, n);
    const double xi = xi_window(overlap_matrix(spectral, a, OverlapKind::plain), j);
    const double xi_bar = xi_window(overlap_matrix(spectral, a, OverlapKind::conjugated), j);
    return xi + xi_bar + a.op_norm();
}

ComparabilityCheck comparability(const SpectralData& spectral, const Observable& b, long j, double e1,
                                 double e2) {
    const long n = spectral.n();
    const cdouble z1(e1, semicircle::solve_eta(e1, static_cast<double>(j), n));
    const cdouble z2(e2, semicircle::solve_eta(e2, static_cast<double>(j), n));
    ChainSpec chain;
    chain.factors = {{z1, ResolventVariant::imaginary_part}, {z2, ResolventVariant::imaginary_part}};
    chain.weights = {&b, &b};
    const double value = chain_value(spectral, chain).real();

    ComparabilityCheck out;
    out.ratio = value / (semicircle::rho(z1) * semicircle::rho(z2));
    const double xi = xi_window(overlap_matrix(spectral, b, OverlapKind::plain), j);
    out.xi_squared = xi * xi;
    out.normalized = out.xi_squared > 0.0 ? out.ratio / out.xi_squared : 0.0;
    return out;
}

} // namespace ethlab
