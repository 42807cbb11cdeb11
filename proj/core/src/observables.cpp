#include "ethlab/observables.hpp"

#include "ethlab/error.hpp"
#include "ethlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace ethlab {

Observable::Observable(Eigen::MatrixXcd matrix, std::string kind)
    : matrix_(std::move(matrix)), kind_(std::move(kind)) {
    if (matrix_.rows() != matrix_.cols()) throw InvalidArgument("observable: matrix must be square");
    const Eigen::Index n = matrix_.rows();
    if (n == 0) throw InvalidArgument("observable: empty matrix");

    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-14 * scale) {
        throw InvalidArgument("observable: matrix is not Hermitian");
    }
    trace_mean_ = matrix_.trace().real() / static_cast<double>(n);
    traceless_ = std::abs(trace_mean_) <= 1e-14;

    Eigen::MatrixXcd offdiag = matrix_;
    offdiag.diagonal().setZero();
    diagonal_ = offdiag.cwiseAbs().maxCoeff() == 0.0;
    if (diagonal_) {
        op_norm_ = matrix_.diagonal().cwiseAbs().maxCoeff();
        identity_ = (matrix_.diagonal().array() == std::complex<double>(1.0, 0.0)).all();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
        op_norm_ = solver.eigenvalues().cwiseAbs().maxCoeff();
    }
}

namespace observables {

Observable identity(long n) {
    if (n < 1) throw InvalidArgument("identity: N must be >= 1");
    return Observable(Eigen::MatrixXcd::Identity(n, n), "identity");
}

Observable traceless_signs(long n) {
    if (n < 2 || n % 2 != 0) throw InvalidArgument("traceless_signs: N must be even");
    Eigen::VectorXcd d(n);
    d.head(n / 2).setConstant(1.0);
    d.tail(n / 2).setConstant(-1.0);
    return Observable(d.asDiagonal().toDenseMatrix(), "traceless_signs");
}

Observable traceless_projector(long n, long k) {
    if (k < 1 || k >= n) throw InvalidArgument("traceless_projector: need 1 <= k < N");
    const double frac = static_cast<double>(k) / static_cast<double>(n);
    Eigen::VectorXcd d = Eigen::VectorXcd::Constant(n, -frac);
    d.head(k).array() += 1.0;
    return Observable(d.asDiagonal().toDenseMatrix(), "traceless_projector");
}

Observable random_traceless(long n, std::uint64_t seed) {
    if (n < 2) throw InvalidArgument("random_traceless: N must be >= 2");
    CounterRng rng(StreamDomain::observable, seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = normal(rng);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const std::complex<double> v(normal(rng) / std::sqrt(2.0), normal(rng) / std::sqrt(2.0));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    const std::complex<double> mean = a.trace() / static_cast<double>(n);
    a.diagonal().array() -= mean;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
    a /= solver.eigenvalues().cwiseAbs().maxCoeff();
    return Observable(std::move(a), "random_traceless");
}

std::pair<double, Observable> decompose(const Eigen::MatrixXcd& b) {
    if (b.rows() != b.cols() || b.rows() == 0) throw InvalidArgument("decompose: need a square matrix");
    const double mean = b.trace().real() / static_cast<double>(b.rows());
    Eigen::MatrixXcd circ = b;
    circ.diagonal().array() -= mean;
    return {mean, Observable(std::move(circ), "traceless_part")};
}

double pairing(const Observable& a, const Observable& b) {
    if (a.n() != b.n()) throw InvalidArgument("pairing: dimension mismatch");
    // Tr(A B) = sum_ij A_ij B_ji; for Hermitian B that is sum_ij A_ij conj(B_ij).
    const std::complex<double> tr = (a.matrix().array() * b.matrix().transpose().array()).sum();
    return tr.real() / static_cast<double>(a.n());
}

Eigen::VectorXcd unit_coordinate(long n, long index) {
    if (index < 0 || index >= n) throw InvalidArgument("unit_coordinate: index out of range");
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(index) = 1.0;
    return e;
}

Eigen::VectorXcd flat_vector(long n) {
    if (n < 1) throw InvalidArgument("flat_vector: N must be >= 1");
    return Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

} // namespace observables
} // namespace ethlab
