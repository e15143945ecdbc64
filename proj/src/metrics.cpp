#include "ctrw/metrics.hpp"

#include "ctrw/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ctrw
{

PiecewiseConstant view(const DensityProfile& profile)
{
    return {profile.length(), profile.averages()};
}

PiecewiseConstant view(const RescaledHistogram& histogram)
{
    return {1.0, histogram.densities()};
}

std::vector<double> target_cell_averages(const EquilibriumHandle& h, const Target& target, int n_cells,
                                         double length)
{
    if (n_cells < 1 || !(length > 0.0))
    {
        throw ParameterError("target_cell_averages needs a non-empty grid");
    }
    std::vector<double> out(n_cells, 0.0);
    const double width = length / n_cells;
    // Natural targets are rescaled-variable integrals over b = a / (1+t).
    double scale = 1.0;
    double tau = target.time;
    if (target.kind == TargetKind::N || target.kind == TargetKind::NInfinity)
    {
        if (!(target.time >= 0.0))
        {
            throw DomainError("natural targets need t >= 0");
        }
        scale = 1.0 / (1.0 + target.time);
        tau = std::log1p(target.time);
    }
    for (int i = 0; i < n_cells; ++i)
    {
        const double lo = std::min(i * width * scale, 1.0);
        const double hi = std::min((i + 1) * width * scale, 1.0);
        if (!(hi > lo))
        {
            break;
        }
        double mass = 0.0;
        switch (target.kind)
        {
        case TargetKind::PseudoEquilibrium:
        case TargetKind::N:
            mass = h.integral_W(tau, lo, hi);
            break;
        case TargetKind::WInfinity:
        case TargetKind::NInfinity:
            mass = h.integral_W_infinity(lo, hi);
            break;
        }
        out[i] = mass / width;
    }
    return out;
}

double l1_distance(const PiecewiseConstant& profile, const std::vector<double>& target_averages)
{
    if (target_averages.size() != profile.averages.size())
    {
        throw ParameterError("l1_distance: grid mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < target_averages.size(); ++i)
    {
        s += std::abs(profile.averages[i] - target_averages[i]);
    }
    return s * profile.cell_width();
}

double l1_distance_to(const PiecewiseConstant& profile, const Target& target, const EquilibriumHandle& h)
{
    return l1_distance(profile, target_cell_averages(h, target, profile.n_cells(), profile.length));
}

std::string to_string(EntropyKind kind)
{
    return kind == EntropyKind::AbsDeviation ? "abs" : "kullback";
}

EntropyKind entropy_kind_from_string(const std::string& name)
{
    if (name == "abs")
    {
        return EntropyKind::AbsDeviation;
    }
    if (name == "kullback")
    {
        return EntropyKind::KullbackType;
    }
    throw ParameterError("unknown entropy kind '" + name + "' (expected abs|kullback)");
}

double EntropySpec::H(double x) const
{
    if (kind == EntropyKind::AbsDeviation)
    {
        return std::abs(x - 1.0);
    }
    return x > 0.0 ? x * std::log(x) - x + 1.0 : 1.0;
}

double EntropySpec::H_prime(double x) const
{
    if (kind == EntropyKind::AbsDeviation)
    {
        return x > 1.0 ? 1.0 : (x < 1.0 ? -1.0 : 0.0);
    }
    // x H'(x) -> 0 as x -> 0, which is all the remainder term needs.
    return x > 0.0 ? std::log(x) : 0.0;
}

double relative_entropy(const PiecewiseConstant& profile, const std::vector<double>& w_averages,
                        const EntropySpec& spec)
{
    if (w_averages.size() != profile.averages.size())
    {
        throw ParameterError("relative_entropy: grid mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < w_averages.size(); ++i)
    {
        const double W = w_averages[i];
        if (!(W > 0.0))
        {
            throw NumericError("relative_entropy: target cell average is not positive", W, 0.0);
        }
        s += spec.H(profile.averages[i] / W) * W;
    }
    return s * profile.cell_width();
}

double relative_entropy(const PiecewiseConstant& profile, double tau, const EntropySpec& spec,
                        const EquilibriumHandle& h)
{
    if (profile.length != 1.0)
    {
        throw ParameterError("relative_entropy needs a rescaled profile");
    }
    return relative_entropy(profile, target_cell_averages(h, Target::pseudo_equilibrium(tau), profile.n_cells()),
                            spec);
}

Dissipation dissipation_measure(const PiecewiseConstant& profile, double tau, const EntropySpec& spec,
                                const EquilibriumHandle& h)
{
    if (profile.length != 1.0)
    {
        throw ParameterError("dissipation_measure needs a rescaled profile");
    }
    const int n = profile.n_cells();
    const double width = profile.cell_width();
    const auto W = target_cell_averages(h, Target::pseudo_equilibrium(tau), n);
    Dissipation out;
    out.C = h.normalizer_C(tau);
    double integral_H = 0.0;
    double integral_u = 0.0;
    double remainder = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double u = profile.averages[i] / W[i];
        const double gamma = h.integral_renewal_weight(tau, i * width, (i + 1) * width) / out.C;
        out.gamma_mass += gamma;
        integral_H += spec.H(u) * gamma;
        integral_u += u * gamma;
        remainder += (spec.H(u) - u * spec.H_prime(u)) * W[i] * width;
    }
    out.DH = integral_H - spec.H(integral_u);
    out.remainder = h.c_delta(tau) * remainder;
    return out;
}

double statistical_floor(int n_bins, std::size_t n_particles)
{
    return std::sqrt(double(n_bins) / double(n_particles));
}

} // namespace ctrw
