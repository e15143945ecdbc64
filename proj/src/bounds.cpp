#include "ctrw/bounds.hpp"

#include "ctrw/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ctrw
{

namespace
{

constexpr double kTie = 1e-12;

bool same(double a, double b)
{
    return std::abs(a - b) <= kTie;
}

double require_alpha(const BoundSpec& spec)
{
    if (!spec.alpha)
    {
        throw ParameterError("bound " + to_string(spec.theorem) + " needs alpha");
    }
    return *spec.alpha;
}

} // namespace

std::string to_string(Theorem theorem)
{
    switch (theorem)
    {
    case Theorem::ThmRef:
        return "ThmRef";
    case Theorem::ThmGeneral:
        return "ThmGeneral";
    case Theorem::WtoWinf:
        return "WtoWinf";
    case Theorem::LowerDirac:
        return "LowerDirac";
    case Theorem::NaturalVars:
        return "NaturalVars";
    case Theorem::MuOne:
        return "MuOne";
    }
    return "ThmRef";
}

Theorem theorem_from_string(const std::string& name)
{
    for (Theorem t : {Theorem::ThmRef, Theorem::ThmGeneral, Theorem::WtoWinf, Theorem::LowerDirac,
                      Theorem::NaturalVars, Theorem::MuOne})
    {
        if (name == to_string(t))
        {
            return t;
        }
    }
    throw ParameterError("unknown bound '" + name + "'");
}

void BoundSpec::validate() const
{
    if (!std::isfinite(mu) || !std::isfinite(H0) || !std::isfinite(K) || K < 0.0 || H0 < 0.0)
    {
        throw ParameterError("bound parameters must be finite with K, H0 >= 0");
    }
    if (alpha && !(*alpha > 0.0))
    {
        throw ParameterError("alpha must be positive");
    }
    switch (theorem)
    {
    case Theorem::ThmRef:
    case Theorem::ThmGeneral:
    case Theorem::WtoWinf:
    case Theorem::NaturalVars:
        if (!(mu > 0.0 && mu < 1.0))
        {
            throw ParameterError(to_string(theorem) + " requires 0 < mu < 1");
        }
        break;
    case Theorem::LowerDirac:
        if (!(mu > 0.0 && mu <= 1.0))
        {
            throw ParameterError("LowerDirac requires 0 < mu <= 1");
        }
        break;
    case Theorem::MuOne:
        break;
    }
    if (theorem == Theorem::ThmGeneral)
    {
        require_alpha(*this);
    }
}

double eval_bound(const BoundSpec& spec, double tau)
{
    spec.validate();
    if (!(tau >= 0.0))
    {
        throw DomainError("eval_bound requires tau >= 0");
    }
    const double mu = spec.mu;
    const double K = spec.K;
    switch (spec.theorem)
    {
    case Theorem::ThmRef:
    {
        const double boost = 2.0 / (1.0 + std::exp(-tau));
        if (same(mu, 0.5))
        {
            return std::exp(-0.5 * tau) * boost * (spec.H0 + 8.0 * tau);
        }
        const double p = std::pow(boost, mu);
        const double k = 8.0 / (2.0 * mu - 1.0);
        return std::exp(-mu * tau) * (spec.H0 * p - k * p) + std::exp(-(1.0 - mu) * tau) * (k * p);
    }
    case Theorem::ThmGeneral:
    {
        const double alpha = *spec.alpha;
        if (same(mu, 0.5))
        {
            if (same(alpha, 0.5))
            {
                return K * (1.0 + tau * tau) * std::exp(-0.5 * tau);
            }
            if (alpha < 0.5)
            {
                return K * (std::exp(-alpha * tau) + std::exp(-0.5 * tau));
            }
            return K * tau * std::exp(-0.5 * tau);
        }
        if (same(alpha, 1.0 - mu))
        {
            return K * (tau * std::exp(-(1.0 - mu) * tau) + std::exp(-mu * tau));
        }
        if (alpha > 1.0 - mu)
        {
            return K * (std::exp(-(1.0 - mu) * tau) + std::exp(-mu * tau));
        }
        if (same(alpha, mu))
        {
            return K * (1.0 + tau) * std::exp(-mu * tau);
        }
        return K * (std::exp(-alpha * tau) + std::exp(-mu * tau));
    }
    case Theorem::WtoWinf:
        return K * (std::exp((mu - 1.0) * tau) + (spec.alpha ? std::exp(-*spec.alpha * tau) : 0.0));
    case Theorem::LowerDirac:
        return std::exp(-mu * tau);
    case Theorem::NaturalVars:
    {
        // In t = e^tau - 1: K (1+t)^-mu + K (1+t)^-(1-mu), or K (1 + log(1+t)) / sqrt(1+t).
        if (same(mu, 0.5))
        {
            return K * (1.0 + tau) * std::exp(-0.5 * tau);
        }
        return K * (std::exp(-mu * tau) + std::exp(-(1.0 - mu) * tau));
    }
    case Theorem::MuOne:
        return K / (1.0 + tau);
    }
    return 0.0;
}

DominantRate dominant_rate(const BoundSpec& spec)
{
    spec.validate();
    const double mu = spec.mu;
    switch (spec.theorem)
    {
    case Theorem::ThmRef:
    case Theorem::NaturalVars:
        return {std::min(mu, 1.0 - mu), same(mu, 0.5)};
    case Theorem::ThmGeneral:
    {
        const double alpha = *spec.alpha;
        if (same(mu, 0.5))
        {
            if (alpha < 0.5 && !same(alpha, 0.5))
            {
                return {alpha, false};
            }
            return {0.5, true};
        }
        if (same(alpha, 1.0 - mu))
        {
            // tau e^{-(1-mu) tau} + e^{-mu tau}
            return 1.0 - mu < mu ? DominantRate{1.0 - mu, true} : DominantRate{mu, false};
        }
        if (alpha > 1.0 - mu)
        {
            return {std::min(mu, 1.0 - mu), false};
        }
        if (same(alpha, mu))
        {
            return {mu, true};
        }
        return {std::min(alpha, mu), false};
    }
    case Theorem::WtoWinf:
        return {spec.alpha ? std::min(1.0 - mu, *spec.alpha) : 1.0 - mu, false};
    case Theorem::LowerDirac:
        return {mu, false};
    case Theorem::MuOne:
        return {0.0, true};
    }
    return {};
}

} // namespace ctrw
