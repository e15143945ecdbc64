#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctrw
{

enum class SeriesSource
{
    MonteCarlo,
    Pde,
};

std::string to_string(SeriesSource source);
SeriesSource series_source_from_string(const std::string& name);

/// Measured distance samples (tau_i, value_i), tau strictly increasing.
struct DecaySeries
{
    std::vector<double> tau;
    std::vector<double> value;
    SeriesSource source = SeriesSource::MonteCarlo;
    double mu_nominal = std::numeric_limits<double>::quiet_NaN();
    std::optional<std::pair<double, double>> fit_window;

    void validate() const;
};

struct FitOptions
{
    /// Holds C fixed. When unset, C is fitted for Monte-Carlo series and pinned
    /// to 0 for PDE series.
    std::optional<double> fixed_C;
    bool fit_C_for_pde = false;
    std::optional<double> fixed_lambda;
    double lambda_grid_step = 0.02;
    double gradient_tolerance = 1e-10;
    int max_iterations = 200;
};

/// f(tau) = A e^{-lambda tau} + B e^{-(1-lambda) tau} + C.
struct FitResult
{
    double lambda = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    /// Standard errors of (lambda, A, B, C); zero for pinned parameters.
    std::array<double, 4> std_errors{};
    double residual_rms = 0.0;
    double gradient_norm = 0.0;
    std::vector<std::string> fixed_params;
    /// lambda is so close to 1/2 that A and B are not separately identifiable, or
    /// the Jacobian is numerically rank-deficient (as lambda -> 0 or 1 the slow
    /// term merges with C).
    bool degenerate = false;
    bool converged = false;
    double window_lo = 0.0;
    double window_hi = 0.0;
    int n_points = 0;

    double evaluate(double tau) const;
};

/// Multi-start least squares over lambda in (0, 1): a lambda grid with the
/// linear parameters solved exactly at each node, then damped Gauss-Newton on
/// all free parameters from the best local minima. Reports the lambda / 1-lambda
/// branch nearest mu_nominal (lambda <= 1/2 when mu_nominal is unset).
FitResult fit_decay(const DecaySeries& series, const FitOptions& options = {});

/// Least-squares line through (tau, log value) on the series' fit window:
/// value ~ exp(intercept - exponent * tau). Values in the window must be positive.
struct RateFit
{
    double exponent = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0; ///< in log units
    double window_lo = 0.0;
    double window_hi = 0.0;
    int n_points = 0;
};

RateFit fit_exponential_rate(const DecaySeries& series);

/// One-parameter least squares value ~ K / (1 + tau) on the series' fit window.
struct AlgebraicFit
{
    double K = 0.0;
    double residual_rms = 0.0;
    int n_points = 0;
};

AlgebraicFit fit_inverse_linear(const DecaySeries& series);

/// Index of the first sample after a jump in the second difference larger than
/// `factor` times the local scale (1.4826 x median |second difference| over the
/// preceding `min_history` samples) and larger than 3% of the series range, or
/// nullopt when the series has no such jump.
std::optional<std::size_t> detect_discontinuity(const DecaySeries& series, double factor = 5.0,
                                                std::size_t min_history = 16);

/// Window [tau_0, tau before the detected jump], or the full range.
std::pair<double, double> propose_window(const DecaySeries& series, double factor = 5.0);

} // namespace ctrw
