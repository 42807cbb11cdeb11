#pragma once

// Eigendecomposition of samples and exact evaluation of alternating
// resolvent/observable chains in the eigenbasis.

#include "ethlab/ensemble.hpp"
#include "ethlab/observables.hpp"
#include "ethlab/semicircle.hpp"

#include <Eigen/Dense>

#include <map>
#include <tuple>
#include <vector>

namespace ethlab {

/// Ascending eigenvalues and orthonormal eigenvectors u_1..u_N (columns). Each
/// eigenvector's largest-modulus component is real and positive.
class SpectralData {
public:
    SpectralData(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd eigenvectors, bool real_basis);

    [[nodiscard]] long n() const noexcept { return static_cast<long>(eigenvalues_.size()); }
    [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    [[nodiscard]] const Eigen::MatrixXcd& eigenvectors() const noexcept { return eigenvectors_; }
    /// Entrywise conjugate of the eigenvector matrix: the eigenbasis of W^t.
    [[nodiscard]] const Eigen::MatrixXcd& conj_eigenvectors() const noexcept { return conj_eigenvectors_; }
    /// True when the input was real symmetric; the eigenvectors are then exactly real.
    [[nodiscard]] bool real_basis() const noexcept { return real_basis_; }

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
    Eigen::MatrixXcd conj_eigenvectors_;
    bool real_basis_;
};

/// Dense Hermitian eigendecomposition. Throws InvalidArgument if the input
/// deviates from Hermitian by more than 1e-10 in any entry.
[[nodiscard]] SpectralData diagonalize(const Eigen::MatrixXcd& w);
[[nodiscard]] SpectralData diagonalize(const WignerSample& sample);

enum class ResolventVariant { plain, adjoint, imaginary_part, absolute_value };

/// One resolvent in a chain: G(z), G(z)^*, Im G(z) or |G(z)|, optionally transposed.
struct ResolventFactor {
    cdouble z;
    ResolventVariant variant = ResolventVariant::plain;
    bool transposed = false;
};

/// Eigenvalue weight p_a of a factor: 1/(l-z), 1/(l-conj z), Im 1/(l-z) or 1/|l-z|.
[[nodiscard]] Eigen::VectorXcd factor_weights(const Eigen::VectorXd& eigenvalues,
                                              const ResolventFactor& factor);

enum class Closure { trace_normalized, bilinear };

/// F_1 B_1 F_2 B_2 ... F_l B_l, closed either as <.> = Tr(.)/N or as <x, . y>.
/// A null weight stands for the identity. Observables are borrowed and must
/// outlive the evaluation.
struct ChainSpec {
    std::vector<ResolventFactor> factors;
    std::vector<const Observable*> weights;
    Closure closure = Closure::trace_normalized;
    Eigen::VectorXcd x;
    Eigen::VectorXcd y;

    /// Chain with identity weights.
    static ChainSpec trace(std::vector<ResolventFactor> factors);
};

/// Evaluates chains against one SpectralData, caching the basis-change matrices
/// V_i^* B V_j so that z-grid sweeps cost O(N^2) per length-two chain.
/// Not thread-safe; use one evaluator per worker.
class ChainEvaluator {
public:
    explicit ChainEvaluator(const SpectralData& spectral) : spectral_(spectral) {}

    [[nodiscard]] cdouble value(const ChainSpec& chain);

    [[nodiscard]] const SpectralData& spectral() const noexcept { return spectral_; }

private:
    const Eigen::MatrixXcd& basis(bool transposed) const {
        return transposed ? spectral_.conj_eigenvectors() : spectral_.eigenvectors();
    }
    const Eigen::MatrixXcd& basis_change(bool left_transposed, const Observable* weight,
                                         bool right_transposed);

    const SpectralData& spectral_;
    std::map<std::tuple<bool, const Observable*, bool>, Eigen::MatrixXcd> cache_;
};

/// One-shot chain evaluation.
[[nodiscard]] cdouble chain_value(const SpectralData& spectral, const ChainSpec& chain);

/// Dense F(z) = V diag(p) V^* for a single factor (G(z) by default).
[[nodiscard]] Eigen::MatrixXcd resolvent(const SpectralData& spectral, const ResolventFactor& factor);
[[nodiscard]] Eigen::MatrixXcd resolvent(const SpectralData& spectral, cdouble z);

struct RigidityProfile {
    /// d_i = N^{2/3} i_hat^{1/3} |lambda_i - gamma_i| with i_hat = min(i, N+1-i).
    Eigen::VectorXd deviations;
    double max = 0.0;
    long argmax = 0;
};

[[nodiscard]] RigidityProfile rigidity_profile(const SpectralData& spectral);
[[nodiscard]] RigidityProfile rigidity_profile(const Eigen::VectorXd& eigenvalues);

} // namespace ethlab
