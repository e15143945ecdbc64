#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ctrw
{

enum class RateKind
{
    Reference,
    Perturbed,
    Custom
};

std::string to_string(RateKind kind);
RateKind rate_kind_from_string(const std::string& name);

/// Perturbation g of the reference rate, beta(a) = mu/(1+a) + g(a), together
/// with its declared tail parameters: int_a^inf |g| <= tail_K / (1+a)^alpha.
struct Perturbation
{
    std::function<double(double)> g;
    /// Optional closed form of int_0^a g. When absent the integral is computed
    /// by adaptive quadrature on every call.
    std::function<double(double)> antiderivative;
    double alpha = 1.0;
    double tail_K = 1.0;
    std::string label;
};

/// g(a) = amplitude * (1+a)^-exponent, exponent > 1. Tail parameters are
/// alpha = exponent - 1 and K = amplitude / (exponent - 1).
Perturbation power_tail(double exponent, double amplitude = 1.0);

/// g(a) = amplitude * (1 - a/support)^2 on [0, support), zero beyond.
Perturbation compact_bump(double support, double amplitude = 1.0);

/// Jump-rate model beta(a) with its cumulative integral B(a) = int_0^a beta.
/// Immutable after construction; copies share state.
class JumpRateModel
{
public:
    static JumpRateModel reference(double mu);
    static JumpRateModel perturbed(double mu, Perturbation perturbation);
    /// User-supplied beta with declared limit a*beta(a) -> mu. B is tabulated
    /// once at construction (cubic Hermite in log(1+a), monotone-limited).
    static JumpRateModel custom(double mu, std::function<double(double)> beta, std::string label = "custom");

    RateKind kind() const { return kind_; }
    double mu() const { return mu_; }
    const std::optional<Perturbation>& perturbation() const { return perturbation_; }
    const std::string& label() const { return label_; }

    double beta(double a) const;
    double big_B(double a) const;
    /// B computed by adaptive quadrature of beta, bypassing closed forms and tables.
    double big_B_quadrature(double a) const;
    /// exp(-(B(age0+s) - B(age0))): probability of no jump during s given age age0.
    double survival(double age0, double s) const;
    /// B(age0+s) - B(age0), accurate for large ages.
    double hazard_increment(double age0, double s) const;
    /// a*beta(a) - mu without cancellation in the reference part.
    double tail_defect(double a) const;
    /// mu*tau - B(e^tau * b), the log of the unnormalised pseudo-equilibrium
    /// profile without the (1-b)^(mu-1) factor. Accurate for large tau.
    double scaled_log_survival(double tau, double b) const;

private:
    struct Table;

    JumpRateModel() = default;

    double perturbation_integral(double a) const;

    RateKind kind_ = RateKind::Reference;
    double mu_ = 0.5;
    std::optional<Perturbation> perturbation_;
    std::function<double(double)> custom_beta_;
    std::shared_ptr<const Table> table_;
    std::string label_;
};

struct HypothesisReport
{
    bool positive = true;
    bool bounded = true;
    double beta_max = 0.0;
    bool non_increasing = true;
    double tail_deviation = 0.0; ///< |a beta(a) - mu| at a = 1e10
    bool tail_limit_ok = true;
    double lower_envelope_deviation = 0.0; ///< |a beta_(a) - mu| at a = 1e10, beta_ = running infimum
    bool lower_envelope_ok = true;
    std::optional<double> h2_worst_ratio; ///< max over grid of tail(a) (1+a)^alpha / K
    bool h2_ok = true;
    std::vector<std::string> notes;

    bool all_ok() const { return positive && bounded && tail_limit_ok && lower_envelope_ok && h2_ok; }
};

/// Sampled check of (H1)/(H2)-type hypotheses on a log-spaced grid up to
/// a = 1e12. Reports, never rejects.
HypothesisReport validate_hypotheses(const JumpRateModel& model);

/// Running infimum of beta over [0, a] evaluated on `grid` (ascending).
std::vector<double> lower_envelope(const JumpRateModel& model, const std::vector<double>& grid);

} // namespace ctrw
