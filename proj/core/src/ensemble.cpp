#include "ethlab/ensemble.hpp"

#include "ethlab/error.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace ethlab {

std::string_view to_string(Symmetry s) {
    return s == Symmetry::real_symmetric ? "real_symmetric" : "complex_hermitian";
}

std::string_view to_string(EntryLaw law) {
    switch (law) {
    case EntryLaw::gaussian: return "gaussian";
    case EntryLaw::rademacher: return "rademacher";
    case EntryLaw::uniform: return "uniform";
    }
    return "unknown";
}

Symmetry symmetry_from_string(std::string_view name) {
    if (name == "real_symmetric") return Symmetry::real_symmetric;
    if (name == "complex_hermitian") return Symmetry::complex_hermitian;
    throw InvalidArgument("unknown symmetry class: " + std::string(name));
}

EntryLaw entry_law_from_string(std::string_view name) {
    if (name == "gaussian") return EntryLaw::gaussian;
    if (name == "rademacher") return EntryLaw::rademacher;
    if (name == "uniform") return EntryLaw::uniform;
    throw InvalidArgument("unknown entry law: " + std::string(name));
}

void EnsembleSpec::validate() const {
    if (n < 1) throw InvalidArgument("ensemble: N must be >= 1");
    if (!std::isfinite(sigma) || std::abs(sigma) > 1.0) {
        throw InvalidArgument("ensemble: sigma must lie in [-1, 1]");
    }
    if (!std::isfinite(w2) || w2 < 0.0) throw InvalidArgument("ensemble: w2 must be >= 0");
    if (symmetry == Symmetry::real_symmetric && sigma != 1.0) {
        throw InvalidArgument("ensemble: real_symmetric requires sigma = 1");
    }
}

EnsembleSpec builtin(std::string_view name, long n) {
    EnsembleSpec spec;
    spec.n = n;
    spec.label = std::string(name);
    if (name == "goe") {
        spec.symmetry = Symmetry::real_symmetric;
        spec.sigma = 1.0;
        spec.w2 = 2.0;
    } else if (name == "gue") {
        spec.sigma = 0.0;
        spec.w2 = 1.0;
    } else if (name == "rademacher_real") {
        spec.symmetry = Symmetry::real_symmetric;
        spec.entry_law = EntryLaw::rademacher;
        spec.sigma = 1.0;
        spec.w2 = 2.0;
    } else if (name == "antisymmetric_imaginary") {
        spec.sigma = -1.0;
        spec.w2 = 0.0;
    } else if (name.starts_with("complex_sigma(") && name.ends_with(")")) {
        const std::string_view arg = name.substr(14, name.size() - 15);
        double s = 0.0;
        const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), s);
        if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
            throw InvalidArgument("builtin: cannot parse sigma in " + std::string(name));
        }
        spec.sigma = s;
        // Interpolates between gue (w2 = 1) and goe (w2 = 2) with w2_tilde = 0.
        spec.w2 = 1.0 + s;
    } else {
        throw InvalidArgument("unknown builtin ensemble: " + std::string(name));
    }
    spec.validate();
    return spec;
}

EntrySampler::EntrySampler(const EnsembleSpec& spec)
    : law_(spec.entry_law),
      real_(spec.symmetry == Symmetry::real_symmetric),
      re_weight_(std::sqrt(0.5 * (1.0 + spec.sigma))),
      im_weight_(std::sqrt(0.5 * (1.0 - spec.sigma))),
      diag_sd_(std::sqrt(spec.w2)) {}

double EntrySampler::unit_draw(CounterRng& rng) {
    switch (law_) {
    case EntryLaw::gaussian:
        return normal_(rng);
    case EntryLaw::rademacher:
        return (rng() >> 63) != 0 ? 1.0 : -1.0;
    case EntryLaw::uniform: {
        // Uniform on [-sqrt 3, sqrt 3], unit variance.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return std::sqrt(3.0) * (2.0 * u - 1.0);
    }
    }
    return 0.0;
}

std::complex<double> EntrySampler::offdiag(CounterRng& rng) {
    if (real_) return {unit_draw(rng), 0.0};
    const double x = re_weight_ > 0.0 ? unit_draw(rng) : 0.0;
    const double y = im_weight_ > 0.0 ? unit_draw(rng) : 0.0;
    return {re_weight_ * x, im_weight_ * y};
}

double EntrySampler::diag(CounterRng& rng) {
    if (diag_sd_ == 0.0) return 0.0;
    return diag_sd_ * normal_(rng);
}

WignerSample sample(const EnsembleSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Eigen::Index n = spec.n;
    CounterRng rng(StreamDomain::ensemble, seed);
    EntrySampler entries(spec);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    Eigen::MatrixXcd w(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        w(a, a) = scale * entries.diag(rng);
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const std::complex<double> v = scale * entries.offdiag(rng);
            w(a, b) = v;
            w(b, a) = std::conj(v);
        }
    }
    return WignerSample(std::move(w), spec, seed);
}

namespace {

MomentEstimate estimate(const std::vector<std::complex<double>>& xs, double population) {
    const double count = static_cast<double>(xs.size());
    std::complex<double> mean{};
    for (const auto& x : xs) mean += x;
    mean /= count;
    double var = 0.0;
    for (const auto& x : xs) var += std::norm(x - mean);
    var /= (count - 1.0);
    MomentEstimate out;
    out.mean = mean;
    out.std_error = std::sqrt(var / count);
    out.population = population;
    out.flagged = std::abs(mean - population) > 4.0 * out.std_error + 1e-12;
    return out;
}

} // namespace

MomentAudit moment_audit(const EnsembleSpec& spec, long n_samples, std::uint64_t seed) {
    spec.validate();
    if (n_samples < 100) throw InvalidArgument("moment_audit: need at least 100 samples");
    CounterRng rng(StreamDomain::ensemble, mix_keys({seed, 0x61756469ULL}));
    EntrySampler entries(spec);

    const auto count = static_cast<std::size_t>(n_samples);
    std::vector<std::complex<double>> od(count);
    std::vector<std::complex<double>> abs2(count);
    std::vector<std::complex<double>> sq(count);
    std::vector<std::complex<double>> sq_d(count);
    MomentAudit audit;
    audit.n_samples = n_samples;
    audit.abs_moments_od.assign(8, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        const auto x = entries.offdiag(rng);
        const double d = entries.diag(rng);
        od[k] = x;
        abs2[k] = std::norm(x);
        sq[k] = x * x;
        sq_d[k] = d * d;
        const double ax = std::abs(x);
        double pw = 1.0;
        for (int p = 0; p < 8; ++p) {
            pw *= ax;
            audit.abs_moments_od[static_cast<std::size_t>(p)] += pw;
        }
    }
    for (auto& mom : audit.abs_moments_od) {
        mom /= static_cast<double>(count);
        audit.max_abs_moment = std::max(audit.max_abs_moment, mom);
    }
    audit.mean_od = estimate(od, 0.0);
    audit.abs2_od = estimate(abs2, 1.0);
    audit.square_od = estimate(sq, spec.sigma);
    audit.square_d = estimate(sq_d, spec.w2);
    return audit;
}

} // namespace ethlab
