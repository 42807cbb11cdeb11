#pragma once

#include "ethlab/rng.hpp"

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ethlab {

enum class Symmetry { real_symmetric, complex_hermitian };
enum class EntryLaw { gaussian, rademacher, uniform };

[[nodiscard]] std::string_view to_string(Symmetry s);
[[nodiscard]] std::string_view to_string(EntryLaw law);
[[nodiscard]] Symmetry symmetry_from_string(std::string_view name);
[[nodiscard]] EntryLaw entry_law_from_string(std::string_view name);

/// Wigner ensemble: w_ab = chi_od / sqrt(N) for a < b, w_aa = chi_d / sqrt(N),
/// with E|chi_od|^2 = 1, sigma = E chi_od^2 and w2 = E chi_d^2.
///
/// Complex off-diagonal entries are chi = sqrt((1+sigma)/2) x + i sqrt((1-sigma)/2) y
/// with x, y i.i.d. draws of `entry_law` at unit variance. The diagonal is always
/// Gaussian with variance w2.
struct EnsembleSpec {
    long n = 1;
    Symmetry symmetry = Symmetry::complex_hermitian;
    EntryLaw entry_law = EntryLaw::gaussian;
    double sigma = 0.0;
    double w2 = 1.0;
    std::string label;

    /// w2 - 1 - sigma; the coefficient of the diagonal cumulant correction.
    [[nodiscard]] double w2_tilde() const noexcept { return w2 - 1.0 - sigma; }

    /// Throws InvalidArgument unless the invariants hold.
    void validate() const;

    [[nodiscard]] EnsembleSpec with_dimension(long new_n) const {
        EnsembleSpec copy = *this;
        copy.n = new_n;
        return copy;
    }

    friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Built-in ensembles: goe, gue, complex_sigma(s), rademacher_real,
/// antisymmetric_imaginary. `complex_sigma(s)` takes s in [-1, 1].
[[nodiscard]] EnsembleSpec builtin(std::string_view name, long n = 1);

/// One drawn matrix. Immutable after construction.
class WignerSample {
public:
    WignerSample(Eigen::MatrixXcd matrix, EnsembleSpec spec, std::uint64_t seed)
        : matrix_(std::move(matrix)), spec_(std::move(spec)), seed_(seed) {}

    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    [[nodiscard]] const EnsembleSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] long n() const noexcept { return spec_.n; }

private:
    Eigen::MatrixXcd matrix_;
    EnsembleSpec spec_;
    std::uint64_t seed_;
};

/// Scalar entry generator for one ensemble; shared by `sample` and `moment_audit`.
/// Holds distribution state, so use one instance per stream.
class EntrySampler {
public:
    explicit EntrySampler(const EnsembleSpec& spec);

    [[nodiscard]] std::complex<double> offdiag(CounterRng& rng);
    [[nodiscard]] double diag(CounterRng& rng);

private:
    [[nodiscard]] double unit_draw(CounterRng& rng);

    std::normal_distribution<double> normal_{0.0, 1.0};
    EntryLaw law_;
    bool real_;
    double re_weight_;
    double im_weight_;
    double diag_sd_;
};

/// Deterministic in (spec, seed). The upper triangle is drawn row by row from a
/// single stream and mirrored, so the result is exactly Hermitian.
[[nodiscard]] WignerSample sample(const EnsembleSpec& spec, std::uint64_t seed);

struct MomentEstimate {
    std::complex<double> mean;
    double std_error = 0.0;
    double population = 0.0;
    bool flagged = false;
};

struct MomentAudit {
    long n_samples = 0;
    MomentEstimate mean_od;       // E chi_od, population 0
    MomentEstimate abs2_od;       // E |chi_od|^2, population 1
    MomentEstimate square_od;     // E chi_od^2, population sigma
    MomentEstimate square_d;      // E chi_d^2, population w2
    std::vector<double> abs_moments_od;  // E |chi_od|^p for p = 1..8
    double max_abs_moment = 0.0;
    [[nodiscard]] bool any_flagged() const noexcept {
        return mean_od.flagged || abs2_od.flagged || square_od.flagged || square_d.flagged;
    }
};

/// Empirical entry moments from `n_samples` scalar draws; flags deviations above
/// 4 standard errors. Requires n_samples >= 100.
[[nodiscard]] MomentAudit moment_audit(const EnsembleSpec& spec, long n_samples,
                                       std::uint64_t seed = 0);

} // namespace ethlab
