#pragma once

#include <optional>
#include <string>

namespace ctrw
{

enum class Theorem
{
    ThmRef,      ///< explicit bound on ||w - W||_1 for beta = mu/(1+a)
    ThmGeneral,  ///< rate table for perturbed beta with tail exponent alpha
    WtoWinf,     ///< ||W - W_inf||_1 <= K (e^{(mu-1) tau} + e^{-alpha tau})
    LowerDirac,  ///< never-jumped mass e^{-mu tau} of Dirac initial data
    NaturalVars, ///< ||n - N_inf||_1 in natural time t = e^tau - 1
    MuOne,       ///< K / (1 + tau) when mu = 1
};

std::string to_string(Theorem theorem);
Theorem theorem_from_string(const std::string& name);

struct BoundSpec
{
    Theorem theorem = Theorem::ThmRef;
    double mu = 0.5;
    std::optional<double> alpha;
    double H0 = 2.0;
    double K = 1.0;

    void validate() const;
};

/// Value of the bound at rescaled time tau (NaturalVars is evaluated at t = e^tau - 1).
double eval_bound(const BoundSpec& spec, double tau);

struct DominantRate
{
    double exponent = 0.0;
    /// A polynomial prefactor (tau, 1+tau, 1+tau^2) multiplies e^{-exponent tau}.
    /// For MuOne the decay is purely algebraic: exponent 0 with this flag set.
    bool log_correction = false;
};

DominantRate dominant_rate(const BoundSpec& spec);

} // namespace ctrw
