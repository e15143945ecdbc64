#include "ctrw/equilibria.hpp"

#include "ctrw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

namespace ctrw
{

namespace
{

void check_tau(double tau)
{
    if (!(tau >= 0.0) || !std::isfinite(tau))
    {
        throw DomainError("tau must be finite and >= 0");
    }
}

void check_b(double b)
{
    if (!(b >= 0.0 && b < 1.0))
    {
        throw DomainError("rescaled age b must lie in [0, 1)");
    }
}

// Endpoint substitutions only pay off on cells that touch the singular end.
numerics::SingularQuadratureSpec cell_spec(numerics::SingularQuadratureSpec spec, double lo, double hi)
{
    if (lo > 0.0)
    {
        spec.left_exponent = 0.0;
    }
    if (hi < 1.0)
    {
        spec.right_exponent = 0.0;
    }
    return spec;
}

} // namespace

EquilibriumHandle::EquilibriumHandle(JumpRateModel model, double abs_tol)
    : model_(std::move(model)), abs_tol_(abs_tol), memo_(std::make_shared<Memo>())
{
    if (!(abs_tol_ > 0.0))
    {
        throw ParameterError("EquilibriumHandle: abs_tol must be > 0");
    }
    const double mu = model_.mu();
    c_infinity_ = mu < 1.0 ? std::sin(std::numbers::pi * mu) / std::numbers::pi : 0.0;
    if (mu < 1.0)
    {
        const double check = c_infinity_quadrature();
        if (std::abs(check - c_infinity_) > 1e-8)
        {
            std::ostringstream msg;
            msg << "c_infinity quadrature " << check << " disagrees with sin(pi mu)/pi = " << c_infinity_;
            throw NumericError(msg.str(), check, std::abs(check - c_infinity_));
        }
    }
}

numerics::SingularQuadratureSpec EquilibriumHandle::w_spec() const
{
    numerics::SingularQuadratureSpec spec;
    // W is bounded at b = 0 but behaves like b^-mu for e^-tau << b, so the
    // same desingularisation as W_inf keeps large-tau integrands smooth.
    spec.left_exponent = -std::min(model_.mu(), 0.9);
    spec.right_exponent = std::min(model_.mu() - 1.0, 0.0);
    spec.abs_tol = abs_tol_;
    spec.max_subdivisions = 20000;
    return spec;
}

numerics::SingularQuadratureSpec EquilibriumHandle::w_infinity_spec() const
{
    require_limit_profile();
    numerics::SingularQuadratureSpec spec;
    spec.left_exponent = -model_.mu();
    spec.right_exponent = model_.mu() - 1.0;
    spec.abs_tol = abs_tol_;
    spec.max_subdivisions = 20000;
    return spec;
}

void EquilibriumHandle::require_limit_profile() const
{
    if (model_.mu() >= 1.0)
    {
        throw DomainError("W_inf does not exist for mu = 1");
    }
}

double EquilibriumHandle::c_infinity_quadrature() const
{
    require_limit_profile();
    const double mu = model_.mu();
    const double inv = numerics::integrate_singular(
        [mu](double b, double bc) { return std::pow(b, -mu) * std::pow(bc, mu - 1.0); }, w_infinity_spec());
    return 1.0 / inv;
}

double EquilibriumHandle::w_infinity(double b) const
{
    return w_infinity(b, 1.0 - b);
}

double EquilibriumHandle::w_infinity(double b, double one_minus_b) const
{
    require_limit_profile();
    if (!(b > 0.0 && one_minus_b > 0.0))
    {
        throw DomainError("w_infinity requires 0 < b < 1");
    }
    const double mu = model_.mu();
    return c_infinity_ * std::pow(b, -mu) * std::pow(one_minus_b, mu - 1.0);
}

double EquilibriumHandle::unnormalised_shape(double tau, double b, double one_minus_b) const
{
    return std::exp(model_.scaled_log_survival(tau, b)) * std::pow(one_minus_b, model_.mu() - 1.0);
}

double EquilibriumHandle::compute_scaled_normalizer(double tau) const
{
    const double inv = numerics::integrate_singular(
        [this, tau](double b, double bc) { return unnormalised_shape(tau, b, bc); }, w_spec());
    return 1.0 / inv;
}

double EquilibriumHandle::scaled_normalizer(double tau) const
{
    check_tau(tau);
    {
        std::shared_lock lock(memo_->mutex);
        auto it = memo_->scaled_normalizer.find(tau);
        if (it != memo_->scaled_normalizer.end())
        {
            return it->second;
        }
    }
    // Computed outside the lock; concurrent fills of the same key agree bit for bit.
    const double value = compute_scaled_normalizer(tau);
    std::unique_lock lock(memo_->mutex);
    memo_->scaled_normalizer.emplace(tau, value);
    return value;
}

double EquilibriumHandle::normalizer_C(double tau) const
{
    return std::exp(model_.mu() * tau) * scaled_normalizer(tau);
}

double EquilibriumHandle::pseudo_equilibrium(double tau, double b) const
{
    return pseudo_equilibrium(tau, b, 1.0 - b);
}

double EquilibriumHandle::pseudo_equilibrium(double tau, double b, double one_minus_b) const
{
    check_tau(tau);
    check_b(b);
    if (!(one_minus_b > 0.0))
    {
        throw DomainError("pseudo_equilibrium requires b < 1");
    }
    return scaled_normalizer(tau) * unnormalised_shape(tau, b, one_minus_b);
}

double EquilibriumHandle::c_delta(double tau) const
{
    check_tau(tau);
    const double scale = std::exp(tau);
    const double c = scaled_normalizer(tau);
    const double integral = numerics::integrate_singular(
        [&](double b, double bc) { return model_.tail_defect(scale * b) * unnormalised_shape(tau, b, bc); },
        w_spec());
    return c * integral;
}

double EquilibriumHandle::delta(double tau) const
{
    return c_delta(tau) / normalizer_C(tau);
}

std::pair<double, double> EquilibriumHandle::natural_profiles(double t, double a) const
{
    if (!(t >= 0.0) || !(a >= 0.0))
    {
        throw DomainError("natural_profiles requires t >= 0 and a >= 0");
    }
    const double span = 1.0 + t;
    if (a >= span)
    {
        return {0.0, 0.0};
    }
    const double tau = std::log1p(t);
    const double b = a / span;
    const double bc = (span - a) / span;
    const double n = pseudo_equilibrium(tau, b, bc) / span;
    if (model_.mu() >= 1.0)
    {
        return {n, 0.0};
    }
    const double mu = model_.mu();
    const double n_inf = a > 0.0 ? c_infinity_ * std::pow(a, -mu) * std::pow(span - a, mu - 1.0)
                                 : std::numeric_limits<double>::infinity();
    return {n, n_inf};
}

double EquilibriumHandle::integral_W(double tau, double lo, double hi) const
{
    check_tau(tau);
    const double c = scaled_normalizer(tau);
    return c * numerics::integrate_interval(
                   [this, tau](double b, double bc) { return unnormalised_shape(tau, b, bc); }, lo, hi,
                   cell_spec(w_spec(), lo, hi));
}

double EquilibriumHandle::integral_W_infinity(double lo, double hi) const
{
    const double mu = model_.mu();
    const double c = c_infinity_;
    return numerics::integrate_interval(
        [mu, c](double b, double bc) { return c * std::pow(b, -mu) * std::pow(bc, mu - 1.0); }, lo, hi,
        cell_spec(w_infinity_spec(), lo, hi));
}

double EquilibriumHandle::integral_renewal_weight(double tau, double lo, double hi) const
{
    check_tau(tau);
    const double scale = std::exp(tau);
    const double c = scaled_normalizer(tau);
    return c * numerics::integrate_interval(
                   [&](double b, double bc) { return scale * model_.beta(scale * b) * unnormalised_shape(tau, b, bc); },
                   lo, hi, cell_spec(w_spec(), lo, hi));
}

double EquilibriumHandle::l1_pseudo_to_limit(double tau) const
{
    require_limit_profile();
    check_tau(tau);
    const double mu = model_.mu();
    const double log_ratio0 = std::log(scaled_normalizer(tau) / c_infinity_);
    // log(W / W_inf); the common (1-b)^(mu-1) factor cancels.
    auto log_ratio = [&](double b) { return log_ratio0 + model_.scaled_log_survival(tau, b) + mu * std::log(b); };

    std::vector<double> grid;
    for (int k = -300; k <= 0; ++k)
    {
        grid.push_back(std::pow(10.0, k / 20.0) * 0.5);
    }
    for (int k = 1; k <= 300; ++k)
    {
        grid.push_back(1.0 - 0.5 * std::pow(10.0, -k / 20.0));
    }
    std::vector<double> cuts{0.0};
    double prev_b = grid.front();
    double prev_v = log_ratio(prev_b);
    for (std::size_t i = 1; i < grid.size(); ++i)
    {
        const double b = grid[i];
        const double v = log_ratio(b);
        if ((v > 0.0) != (prev_v > 0.0))
        {
            cuts.push_back(numerics::find_root(log_ratio, prev_b, b, 1e-15 * std::max(1.0, b)));
        }
        prev_b = b;
        prev_v = v;
    }
    cuts.push_back(1.0);

    const double c = scaled_normalizer(tau);
    const double ci = c_infinity_;
    auto integrand = [&](double b, double bc) {
        const double w = c * unnormalised_shape(tau, b, bc);
        const double wi = ci * std::pow(b, -mu) * std::pow(bc, mu - 1.0);
        return std::abs(w - wi);
    };
    auto spec = w_infinity_spec();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        if (cuts[i + 1] > cuts[i])
        {
            total += numerics::integrate_interval(integrand, cuts[i], cuts[i + 1], cell_spec(spec, cuts[i], cuts[i + 1]));
        }
    }
    return total;
}

} // namespace ctrw
