#pragma once

#include "ctrw/montecarlo.hpp"
#include "ctrw/rates.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrw
{

/// Every violation found while validating a configuration, in field order.
class ValidationError : public std::invalid_argument
{
public:
    explicit ValidationError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Named perturbation from the built-in catalog.
struct PerturbationConfig
{
    std::string name = "power_tail"; ///< power_tail | compact_bump
    double exponent = 2.0;           ///< power_tail only
    double support = 1.0;            ///< compact_bump only
    double amplitude = 1.0;
};

/// beta(a) = mu/(1+a) for "reference"; mu/(1+a) + g(a) for "perturbed" (closed-form
/// B) and "custom" (tabulated B). `alpha` is shorthand for power_tail with
/// exponent 1 + alpha; `K` overrides the declared tail constant.
struct RateConfig
{
    std::string kind = "reference";
    double mu = 0.5;
    std::optional<double> alpha;
    std::optional<double> K;
    std::optional<PerturbationConfig> g;

    JumpRateModel build() const;
};

struct FitConfig
{
    bool enabled = true;
    std::optional<double> window_lo;
    std::optional<double> window_hi;
    /// Cut the window before a detected discontinuity of the series.
    bool auto_window = false;
    std::optional<double> fixed_C;
    /// Pin applied only when the automatic window cut the series.
    std::optional<double> fixed_C_if_windowed;
    std::optional<double> fixed_lambda;
};

struct BoundsConfig
{
    double H0 = 2.0;
    double K = 1.0;
};

struct ExperimentConfig
{
    std::string name = "run";
    RateConfig rate;
    std::string engine = "montecarlo"; ///< montecarlo | pde | both
    std::uint64_t n_walkers = 20000;
    int n_cells = 4096;
    std::uint64_t seed = 1;
    int replicas = 1;
    double tau_max = 8.0;
    double snapshot_dtau = 0.1;
    std::string initial = "dirac"; ///< dirac | uniform
    int bins = RescaledHistogram::kDefaultBins;
    std::string variables = "rescaled"; ///< PDE variables: natural | rescaled
    std::string entropy = "abs";        ///< abs | kullback
    bool dissipation = true;
    bool histograms = false;
    bool unconditional_first_jump = false;
    FitConfig fit;
    BoundsConfig bounds;
    std::string output_dir = "out";

    /// Throws ValidationError listing every violation.
    void validate() const;
    std::vector<std::string> violations() const;
};

std::string to_json_string(const ExperimentConfig& config);
/// Strict parse: unknown keys are violations. Missing keys keep their defaults.
ExperimentConfig config_from_json_string(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical JSON serialisation.
std::uint64_t config_hash(const ExperimentConfig& config);

InitialCondition initial_condition_from_string(const std::string& name);

} // namespace ctrw
