#pragma once

// Experiment configuration and its JSON form. Keys are snake_case; unknown
// keys are rejected with ConfigError.

#include "ethlab/ensemble.hpp"
#include "ethlab/observables.hpp"
#include "ethlab/semicircle.hpp"
#include "ethlab/table.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ethlab {

enum class Experiment { eth_scaling, transpose_scaling, single_g, two_g, variance, renorm, rigidity };

[[nodiscard]] std::string_view to_string(Experiment e);
[[nodiscard]] Experiment experiment_from_string(std::string_view name);

struct ObservableConfig {
    std::string kind = "traceless_signs";  // traceless_signs | traceless_projector | random_traceless | identity
    long k = 0;                            // projector rank; 0 means N/2
    std::uint64_t seed = 0;                // random_traceless only

    [[nodiscard]] Observable build(long n) const;

    friend bool operator==(const ObservableConfig&, const ObservableConfig&) = default;
};

/// A spectral parameter given directly or as an (E, J) pair with J = N^j_exponent
/// when the exponent form is used; (E, J) resolves via solve_eta.
struct ZSpec {
    enum class Mode { direct, energy_level, energy_exponent };
    Mode mode = Mode::direct;
    cdouble z{0.0, 1.0};
    double energy = 0.0;
    double j = 0.0;
    double j_exponent = 0.0;

    [[nodiscard]] static ZSpec direct(cdouble z);
    [[nodiscard]] static ZSpec level(double energy, double j);
    [[nodiscard]] static ZSpec exponent(double energy, double j_exponent);
    [[nodiscard]] cdouble resolve(long n) const;

    friend bool operator==(const ZSpec&, const ZSpec&) = default;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::single_g;
    EnsembleSpec ensemble;           // n is ignored; dimensions come from n_grid
    std::vector<long> n_grid;
    long trials_per_n = 1;           // Monte Carlo size per N for variance
    std::uint64_t base_seed = 0;
    ObservableConfig observable;
    std::vector<ZSpec> z_grid;
    std::vector<double> sigma_grid;  // two_g: extra complex_sigma ensembles for the transpose laws
    long window = 0;                 // eth / transpose: J, 0 means ceil(N^0.1)
    std::string output_path = "-";
    OutputFormat format = OutputFormat::csv;

    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses and validates. Throws ConfigError on malformed input.
[[nodiscard]] ExperimentConfig parse_config(std::string_view json_text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] std::string to_json(const ExperimentConfig& config);

/// The grids used by the acceptance checks, per experiment.
[[nodiscard]] ExperimentConfig default_config(Experiment experiment);

} // namespace ethlab
