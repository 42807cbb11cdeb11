#include "ethlab/spectral.hpp"

#include "ethlab/error.hpp"

#include <lapacke.h>

#include <cmath>
#include <mutex>
#include <string>
#include <type_traits>
#include <vector>

#ifdef ETHLAB_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int num_threads);
#endif

namespace ethlab {

namespace {

void pin_blas_threads() {
#ifdef ETHLAB_HAVE_OPENBLAS
    // Parallelism lives at the harness level; nested BLAS threads would
    // oversubscribe and make reductions schedule-dependent.
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
#endif
}

template <typename Matrix>
void fix_phases(Matrix& vectors) {
    for (Eigen::Index col = 0; col < vectors.cols(); ++col) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index row = 0; row < vectors.rows(); ++row) {
            const double mod = std::abs(vectors(row, col));
            if (mod > best) {
                best = mod;
                arg = row;
            }
        }
        if (best <= 0.0) continue;
        using Scalar = typename Matrix::Scalar;
        if constexpr (std::is_same_v<Scalar, double>) {
            if (vectors(arg, col) < 0.0) vectors.col(col) *= -1.0;
        } else {
            vectors.col(col) *= std::conj(vectors(arg, col)) / best;
        }
    }
}

// The real LAPACK drivers (dsyev, dsyevd, dsyevr, dsyevx) in the bundled OpenBLAS
// return non-orthogonal vectors from N = 256 on, so real input goes through Eigen.
SpectralData diagonalize_real(const Eigen::MatrixXd& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w);
    if (solver.info() != Eigen::Success) throw std::runtime_error("real symmetric eigensolver did not converge");
    Eigen::MatrixXd vectors = solver.eigenvectors();
    fix_phases(vectors);
    return SpectralData(solver.eigenvalues(), vectors.cast<cdouble>(), true);
}

SpectralData diagonalize_complex(const Eigen::MatrixXcd& w) {
    const auto n = static_cast<lapack_int>(w.rows());
    Eigen::MatrixXcd work = w;
    Eigen::VectorXd values(n);
    Eigen::MatrixXcd vectors(n, n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(
        LAPACK_COL_MAJOR, 'V', 'A', 'L', n, reinterpret_cast<lapack_complex_double*>(work.data()), n, 0.0,
        0.0, 0, 0, 0.0, &found, values.data(), reinterpret_cast<lapack_complex_double*>(vectors.data()), n,
        support.data());
    if (info != 0 || found != n) throw std::runtime_error("zheevr failed, info = " + std::to_string(info));
    fix_phases(vectors);
    return SpectralData(std::move(values), std::move(vectors), false);
}

} // namespace

SpectralData::SpectralData(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd eigenvectors, bool real_basis)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      conj_eigenvectors_(eigenvectors_.conjugate()),
      real_basis_(real_basis) {
    if (eigenvectors_.rows() != eigenvalues_.size() || eigenvectors_.cols() != eigenvalues_.size()) {
        throw InvalidArgument("SpectralData: eigenvector matrix has the wrong shape");
    }
}

SpectralData diagonalize(const Eigen::MatrixXcd& w) {
    if (w.rows() != w.cols() || w.rows() == 0) throw InvalidArgument("diagonalize: need a square matrix");
    if ((w - w.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidArgument("diagonalize: matrix is not Hermitian");
    }
    pin_blas_threads();
    if (w.imag().cwiseAbs().maxCoeff() == 0.0) return diagonalize_real(w.real());
    return diagonalize_complex(w);
}

SpectralData diagonalize(const WignerSample& sample) { return diagonalize(sample.matrix()); }

Eigen::VectorXcd factor_weights(const Eigen::VectorXd& eigenvalues, const ResolventFactor& factor) {
    if (factor.z.imag() == 0.0) throw DomainError("resolvent factor needs Im z != 0");
    const Eigen::Index n = eigenvalues.size();
    Eigen::VectorXcd p(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const cdouble g = 1.0 / (eigenvalues(a) - factor.z);
        switch (factor.variant) {
        case ResolventVariant::plain: p(a) = g; break;
        case ResolventVariant::adjoint: p(a) = std::conj(g); break;
        case ResolventVariant::imaginary_part: p(a) = g.imag(); break;
        case ResolventVariant::absolute_value: p(a) = std::abs(g); break;
        }
    }
    return p;
}

ChainSpec ChainSpec::trace(std::vector<ResolventFactor> factors) {
    ChainSpec chain;
    chain.weights.assign(factors.size(), nullptr);
    chain.factors = std::move(factors);
    return chain;
}

const Eigen::MatrixXcd& ChainEvaluator::basis_change(bool left_transposed, const Observable* weight,
                                                     bool right_transposed) {
    const auto key = std::make_tuple(left_transposed, weight, right_transposed);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const Eigen::MatrixXcd& left = basis(left_transposed);
    const Eigen::MatrixXcd& right = basis(right_transposed);
    Eigen::MatrixXcd m;
    if (weight == nullptr) {
        m.noalias() = left.adjoint() * right;
    } else if (weight->diagonal()) {
        m.noalias() = left.adjoint() * (weight->matrix().diagonal().asDiagonal() * right);
    } else {
        const Eigen::MatrixXcd br = weight->matrix() * right;
        m.noalias() = left.adjoint() * br;
    }
    return cache_.emplace(key, std::move(m)).first->second;
}

cdouble ChainEvaluator::value(const ChainSpec& chain) {
    const std::size_t len = chain.factors.size();
    const long n = spectral_.n();
    if (len == 0) throw InvalidArgument("chain_value: empty chain");
    if (chain.weights.size() != len) throw InvalidArgument("chain_value: need one weight per factor");
    for (const Observable* w : chain.weights) {
        if (w != nullptr && w->n() != n) throw InvalidArgument("chain_value: observable dimension mismatch");
    }

    std::vector<Eigen::VectorXcd> p(len);
    for (std::size_t k = 0; k < len; ++k) p[k] = factor_weights(spectral_.eigenvalues(), chain.factors[k]);

    if (chain.closure == Closure::bilinear) {
        if (chain.x.size() != n || chain.y.size() != n) {
            throw InvalidArgument("chain_value: bilinear vectors have the wrong dimension");
        }
        // Row vector x^* V_1, then alternate diagonal scaling and basis changes.
        Eigen::RowVectorXcd row = (basis(chain.factors[0].transposed).adjoint() * chain.x).adjoint();
        for (std::size_t k = 0; k + 1 < len; ++k) {
            row = row.cwiseProduct(p[k].transpose());
            row = row * basis_change(chain.factors[k].transposed, chain.weights[k],
                                     chain.factors[k + 1].transposed);
        }
        row = row.cwiseProduct(p[len - 1].transpose());
        const Eigen::MatrixXcd& last = basis(chain.factors[len - 1].transposed);
        const Observable* tail = chain.weights[len - 1];
        const Eigen::VectorXcd by = tail == nullptr ? Eigen::VectorXcd(chain.y) : Eigen::VectorXcd(tail->matrix() * chain.y);
        return (row * (last.adjoint() * by))(0);
    }

    // Tr(D_1 M_1 D_2 M_2 ... D_l M_l) / N with M_k = V_k^* B_k V_{k+1}, V_{l+1} = V_1.
    auto m_of = [&](std::size_t k) -> const Eigen::MatrixXcd& {
        const std::size_t next = (k + 1) % len;
        return basis_change(chain.factors[k].transposed, chain.weights[k], chain.factors[next].transposed);
    };
    const double nd = static_cast<double>(n);
    if (len == 1) {
        return p[0].cwiseProduct(m_of(0).diagonal()).sum() / nd;
    }
    if (len == 2) {
        const Eigen::MatrixXcd& m1 = m_of(0);
        const Eigen::MatrixXcd& m2 = m_of(1);
        // sum_ab p1_a M1_ab p2_b M2_ba
        const cdouble s = (p[0].asDiagonal() * m1.cwiseProduct(m2.transpose()) * p[1]).sum();
        return s / nd;
    }
    Eigen::MatrixXcd acc = p[0].asDiagonal() * m_of(0);
    for (std::size_t k = 1; k + 1 < len; ++k) {
        const Eigen::MatrixXcd step = p[k].asDiagonal() * m_of(k);
        acc = (acc * step).eval();
    }
    const Eigen::MatrixXcd& ml = m_of(len - 1);
    const cdouble s = (acc.cwiseProduct((p[len - 1].asDiagonal() * ml).transpose())).sum();
    return s / nd;
}

cdouble chain_value(const SpectralData& spectral, const ChainSpec& chain) {
    ChainEvaluator evaluator(spectral);
    return evaluator.value(chain);
}

Eigen::MatrixXcd resolvent(const SpectralData& spectral, const ResolventFactor& factor) {
    const Eigen::VectorXcd p = factor_weights(spectral.eigenvalues(), factor);
    const Eigen::MatrixXcd& v = factor.transposed ? spectral.conj_eigenvectors() : spectral.eigenvectors();
    return v * p.asDiagonal() * v.adjoint();
}

Eigen::MatrixXcd resolvent(const SpectralData& spectral, cdouble z) {
    return resolvent(spectral, ResolventFactor{z});
}

RigidityProfile rigidity_profile(const Eigen::VectorXd& eigenvalues) {
    const long n = static_cast<long>(eigenvalues.size());
    RigidityProfile out;
    out.deviations.resize(n);
    const double scale = std::pow(static_cast<double>(n), 2.0 / 3.0);
    for (long i = 1; i <= n; ++i) {
        const long i_hat = std::min(i, n + 1 - i);
        const double d = scale * std::cbrt(static_cast<double>(i_hat)) *
                         std::abs(eigenvalues(i - 1) - semicircle::quantile(i, n));
        out.deviations(i - 1) = d;
        if (d > out.max) {
            out.max = d;
            out.argmax = i - 1;
        }
    }
    return out;
}

RigidityProfile rigidity_profile(const SpectralData& spectral) {
    return rigidity_profile(spectral.eigenvalues());
}

} // namespace ethlab
