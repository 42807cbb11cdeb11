#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>

namespace ethlab {

/// Deterministic Hermitian test matrix with cached trace and norm metadata.
class Observable {
public:
    /// Computes <A>, ||A|| and the traceless flag. Throws InvalidArgument if
    /// `matrix` is not square or not Hermitian to 1e-14 (scaled by max|A_ij|).
    explicit Observable(Eigen::MatrixXcd matrix, std::string kind = "custom");

    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    [[nodiscard]] long n() const noexcept { return static_cast<long>(matrix_.rows()); }
    /// <A> = Tr(A) / N.
    [[nodiscard]] double trace_mean() const noexcept { return trace_mean_; }
    [[nodiscard]] double op_norm() const noexcept { return op_norm_; }
    [[nodiscard]] bool traceless() const noexcept { return traceless_; }
    [[nodiscard]] bool diagonal() const noexcept { return diagonal_; }
    [[nodiscard]] bool is_identity() const noexcept { return identity_; }
    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    Eigen::MatrixXcd matrix_;
    std::string kind_;
    double trace_mean_ = 0.0;
    double op_norm_ = 0.0;
    bool traceless_ = false;
    bool diagonal_ = false;
    bool identity_ = false;
};

namespace observables {

[[nodiscard]] Observable identity(long n);

/// diag(+1,...,+1,-1,...,-1); N must be even.
[[nodiscard]] Observable traceless_signs(long n);

/// P_k - (k/N) I with P_k the projector onto the first k coordinates, 1 <= k < N.
[[nodiscard]] Observable traceless_projector(long n, long k);

/// GUE-like draw, trace removed, scaled to unit operator norm. Uses the
/// observable RNG domain, disjoint from ensemble sampling.
[[nodiscard]] Observable random_traceless(long n, std::uint64_t seed);

/// B = <B> I + B_circ with <B_circ> = 0.
[[nodiscard]] std::pair<double, Observable> decompose(const Eigen::MatrixXcd& b);

/// <A A'> = Tr(A A') / N.
[[nodiscard]] double pairing(const Observable& a, const Observable& b);

/// e_1.
[[nodiscard]] Eigen::VectorXcd unit_coordinate(long n, long index = 0);

/// N^{-1/2} (1, ..., 1).
[[nodiscard]] Eigen::VectorXcd flat_vector(long n);

} // namespace observables
} // namespace ethlab
