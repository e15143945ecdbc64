#include "ctrw/rates.hpp"

#include "ctrw/errors.hpp"
#include "ctrw/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ctrw
{

namespace
{

void check_age(double a)
{
    if (!(a >= 0.0) || !std::isfinite(a))
    {
        std::ostringstream msg;
        msg << "age must be finite and non-negative, got " << a;
        throw DomainError(msg.str());
    }
}

void check_mu(double mu)
{
    if (!(mu > 0.0 && mu <= 1.0))
    {
        throw ParameterError("mu must lie in (0, 1]");
    }
}

// int_0^a f via s = log(1+x), which turns the 1/(1+x) tails into smooth integrands.
double log_scale_integral(const std::function<double(double)>& f, double a)
{
    if (a == 0.0)
    {
        return 0.0;
    }
    const double s_max = std::log1p(a);
    const auto integrand = [&](double s) {
        const double x = std::expm1(s);
        return f(x) * (1.0 + x);
    };
    return numerics::integrate_adaptive(integrand, 0.0, s_max, 1e-11, 20000).value;
}

constexpr double kTableSMax = 34.538776394910684; // log(1 + 1e15)
constexpr double kTableTol = 1e-11;

} // namespace

std::string to_string(RateKind kind)
{
    switch (kind)
    {
    case RateKind::Reference:
        return "reference";
    case RateKind::Perturbed:
        return "perturbed";
    case RateKind::Custom:
        return "custom";
    }
    return "unknown";
}

RateKind rate_kind_from_string(const std::string& name)
{
    if (name == "reference")
    {
        return RateKind::Reference;
    }
    if (name == "perturbed")
    {
        return RateKind::Perturbed;
    }
    if (name == "custom")
    {
        return RateKind::Custom;
    }
    throw ParameterError("unknown rate kind '" + name + "'");
}

Perturbation power_tail(double exponent, double amplitude)
{
    if (!(exponent > 1.0))
    {
        throw ParameterError("power_tail exponent must exceed 1");
    }
    Perturbation p;
    p.g = [=](double a) { return amplitude * std::pow(1.0 + a, -exponent); };
    p.antiderivative = [=](double a) {
        return amplitude * (-std::expm1((1.0 - exponent) * std::log1p(a))) / (exponent - 1.0);
    };
    p.alpha = exponent - 1.0;
    p.tail_K = std::abs(amplitude) / (exponent - 1.0);
    std::ostringstream label;
    label << "power_tail(exponent=" << exponent << ", amplitude=" << amplitude << ")";
    p.label = label.str();
    return p;
}

Perturbation compact_bump(double support, double amplitude)
{
    if (!(support > 0.0))
    {
        throw ParameterError("compact_bump support must be positive");
    }
    Perturbation p;
    p.g = [=](double a) {
        if (a >= support)
        {
            return 0.0;
        }
        const double r = 1.0 - a / support;
        return amplitude * r * r;
    };
    p.antiderivative = [=](double a) {
        const double r = a >= support ? 0.0 : 1.0 - a / support;
        return amplitude * support / 3.0 * (1.0 - r * r * r);
    };
    p.alpha = 1.0;
    p.tail_K = std::abs(amplitude) * support / 3.0 * (1.0 + support);
    std::ostringstream label;
    label << "compact_bump(support=" << support << ", amplitude=" << amplitude << ")";
    p.label = label.str();
    return p;
}

// Tabulated B for custom rates: nodes in s = log(1+a), exact values and
// slopes dB/ds = beta(a)(1+a), cubic Hermite between nodes with the
// Fritsch-Carlson limiter keeping the interpolant monotone.
struct JumpRateModel::Table
{
    std::vector<double> s;
    std::vector<double> B;
    std::vector<double> slope;
    double mu = 0.5;

    static double hermite(double s0, double s1, double b0, double b1, double d0, double d1, double x)
    {
        const double h = s1 - s0;
        const double secant = (b1 - b0) / h;
        if (secant <= 0.0)
        {
            d0 = 0.0;
            d1 = 0.0;
        }
        else
        {
            const double alpha = d0 / secant;
            const double beta = d1 / secant;
            const double norm = alpha * alpha + beta * beta;
            if (norm > 9.0)
            {
                const double scale = 3.0 / std::sqrt(norm);
                d0 = scale * alpha * secant;
                d1 = scale * beta * secant;
            }
        }
        const double t = (x - s0) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * b0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * b1 +
               (t3 - t2) * h * d1;
    }

    double eval(double a) const
    {
        const double x = std::log1p(a);
        if (x >= s.back())
        {
            return B.back() + mu * (x - s.back());
        }
        const auto it = std::upper_bound(s.begin(), s.end(), x);
        const std::size_t k = static_cast<std::size_t>(std::distance(s.begin(), it)) - 1;
        return hermite(s[k], s[k + 1], B[k], B[k + 1], slope[k], slope[k + 1], x);
    }
};

JumpRateModel JumpRateModel::reference(double mu)
{
    check_mu(mu);
    JumpRateModel m;
    m.kind_ = RateKind::Reference;
    m.mu_ = mu;
    std::ostringstream label;
    label << "reference(mu=" << mu << ")";
    m.label_ = label.str();
    return m;
}

JumpRateModel JumpRateModel::perturbed(double mu, Perturbation perturbation)
{
    check_mu(mu);
    if (!perturbation.g)
    {
        throw ParameterError("perturbed rate needs a perturbation function g");
    }
    if (!(perturbation.alpha > 0.0) || !(perturbation.tail_K > 0.0))
    {
        throw ParameterError("perturbation tail parameters alpha and K must be positive");
    }
    JumpRateModel m;
    m.kind_ = RateKind::Perturbed;
    m.mu_ = mu;
    std::ostringstream label;
    label << "perturbed(mu=" << mu << ", g=" << (perturbation.label.empty() ? "user" : perturbation.label) << ")";
    m.label_ = label.str();
    m.perturbation_ = std::move(perturbation);
    return m;
}

JumpRateModel JumpRateModel::custom(double mu, std::function<double(double)> beta, std::string label)
{
    check_mu(mu);
    if (!beta)
    {
        throw ParameterError("custom rate needs a beta function");
    }
    JumpRateModel m;
    m.kind_ = RateKind::Custom;
    m.mu_ = mu;
    m.custom_beta_ = std::move(beta);
    m.label_ = std::move(label);

    auto table = std::make_shared<Table>();
    table->mu = mu;
    const auto& b = m.custom_beta_;
    const auto slope_at = [&](double s) {
        const double a = std::expm1(s);
        return b(a) * (1.0 + a);
    };
    const auto increment = [&](double s0, double s1) {
        return numerics::integrate_adaptive(slope_at, s0, s1, 1e-13, 20000).value;
    };

    // depth-first refinement keeps nodes in ascending order
    std::function<void(double, double, double, double, double, double, int)> refine =
        [&](double s0, double B0, double d0, double s1, double B1, double d1, int depth) {
            const double sm = 0.5 * (s0 + s1);
            const double Bm = B0 + increment(s0, sm);
            const double dm = slope_at(sm);
            const double err = std::abs(Table::hermite(s0, s1, B0, B1, d0, d1, sm) - Bm);
            if (err > kTableTol && depth < 30)
            {
                refine(s0, B0, d0, sm, Bm, dm, depth + 1);
                refine(sm, Bm, dm, s1, B1, d1, depth + 1);
                return;
            }
            table->s.push_back(s1);
            table->B.push_back(B1);
            table->slope.push_back(d1);
        };

    const int coarse = 70;
    double s_prev = 0.0;
    double B_prev = 0.0;
    double d_prev = slope_at(0.0);
    table->s.push_back(0.0);
    table->B.push_back(0.0);
    table->slope.push_back(d_prev);
    for (int k = 1; k <= coarse; ++k)
    {
        const double s_next = kTableSMax * k / coarse;
        const double B_next = B_prev + increment(s_prev, s_next);
        const double d_next = slope_at(s_next);
        refine(s_prev, B_prev, d_prev, s_next, B_next, d_next, 0);
        s_prev = s_next;
        B_prev = B_next;
        d_prev = d_next;
    }
    m.table_ = std::move(table);
    return m;
}

double JumpRateModel::beta(double a) const
{
    check_age(a);
    switch (kind_)
    {
    case RateKind::Reference:
        return mu_ / (1.0 + a);
    case RateKind::Perturbed:
        return mu_ / (1.0 + a) + perturbation_->g(a);
    case RateKind::Custom:
        return custom_beta_(a);
    }
    return 0.0;
}

double JumpRateModel::tail_defect(double a) const
{
    check_age(a);
    switch (kind_)
    {
    case RateKind::Reference:
        return -mu_ / (1.0 + a);
    case RateKind::Perturbed:
        return -mu_ / (1.0 + a) + a * perturbation_->g(a);
    case RateKind::Custom:
        return a * custom_beta_(a) - mu_;
    }
    return 0.0;
}

double JumpRateModel::perturbation_integral(double a) const
{
    if (perturbation_->antiderivative)
    {
        return perturbation_->antiderivative(a);
    }
    return log_scale_integral(perturbation_->g, a);
}

double JumpRateModel::big_B(double a) const
{
    check_age(a);
    switch (kind_)
    {
    case RateKind::Reference:
        return mu_ * std::log1p(a);
    case RateKind::Perturbed:
        return mu_ * std::log1p(a) + perturbation_integral(a);
    case RateKind::Custom:
        return table_->eval(a);
    }
    return 0.0;
}

double JumpRateModel::big_B_quadrature(double a) const
{
    check_age(a);
    return log_scale_integral([this](double x) { return beta(x); }, a);
}

double JumpRateModel::hazard_increment(double age0, double s) const
{
    check_age(age0);
    check_age(s);
    if (s == 0.0)
    {
        return 0.0;
    }
    switch (kind_)
    {
    case RateKind::Reference:
        return mu_ * std::log1p(s / (1.0 + age0));
    case RateKind::Perturbed:
        return mu_ * std::log1p(s / (1.0 + age0)) + perturbation_integral(age0 + s) - perturbation_integral(age0);
    case RateKind::Custom:
        return table_->eval(age0 + s) - table_->eval(age0);
    }
    return 0.0;
}

double JumpRateModel::survival(double age0, double s) const
{
    if (kind_ == RateKind::Reference)
    {
        check_age(age0);
        check_age(s);
        return std::pow((1.0 + age0) / (1.0 + age0 + s), mu_);
    }
    return std::exp(-hazard_increment(age0, s));
}

double JumpRateModel::scaled_log_survival(double tau, double b) const
{
    const double shift = std::exp(-tau);
    switch (kind_)
    {
    case RateKind::Reference:
        return -mu_ * std::log(shift + b);
    case RateKind::Perturbed:
        return -mu_ * std::log(shift + b) - perturbation_integral(b / shift);
    case RateKind::Custom:
        return mu_ * tau - table_->eval(b / shift);
    }
    return 0.0;
}

std::vector<double> lower_envelope(const JumpRateModel& model, const std::vector<double>& grid)
{
    std::vector<double> out;
    out.reserve(grid.size());
    double running = std::numeric_limits<double>::infinity();
    for (double a : grid)
    {
        running = std::min(running, model.beta(a));
        out.push_back(running);
    }
    return out;
}

HypothesisReport validate_hypotheses(const JumpRateModel& model)
{
    HypothesisReport report;
    const double mu = model.mu();

    std::vector<double> grid{0.0};
    for (int k = -60; k <= 120; ++k)
    {
        grid.push_back(std::pow(10.0, k / 10.0));
    }

    double previous = std::numeric_limits<double>::infinity();
    for (double a : grid)
    {
        const double b = model.beta(a);
        if (!(b > 0.0))
        {
            report.positive = false;
        }
        if (!std::isfinite(b))
        {
            report.bounded = false;
        }
        report.beta_max = std::max(report.beta_max, b);
        if (b > previous * (1.0 + 1e-12))
        {
            report.non_increasing = false;
        }
        previous = b;
    }
    if (!report.positive)
    {
        report.notes.push_back("beta is not strictly positive on the sampled grid");
    }
    if (!report.non_increasing)
    {
        report.notes.push_back("beta is not non-increasing; the lower envelope diagnostic applies");
    }

    constexpr double a_far = 1e10;
    report.tail_deviation = std::abs(a_far * model.beta(a_far) - mu);
    report.tail_limit_ok = report.tail_deviation < 0.01;
    if (!report.tail_limit_ok)
    {
        report.notes.push_back("a*beta(a) has not approached mu at a = 1e10");
    }

    std::vector<double> envelope_grid;
    for (double a : grid)
    {
        if (a <= a_far)
        {
            envelope_grid.push_back(a);
        }
    }
    const auto envelope = lower_envelope(model, envelope_grid);
    report.lower_envelope_deviation = std::abs(envelope_grid.back() * envelope.back() - mu);
    report.lower_envelope_ok = report.lower_envelope_deviation < 0.01;

    if (model.kind() == RateKind::Perturbed)
    {
        const auto& p = *model.perturbation();
        double worst = 0.0;
        for (double a : grid)
        {
            const double s_cap = std::min(60.0 / p.alpha, 690.0 - std::log1p(a));
            const auto integrand = [&](double s) {
                const double x = (1.0 + a) * std::exp(s) - 1.0;
                if (!std::isfinite(x))
                {
                    return 0.0;
                }
                return std::abs(p.g(x)) * (1.0 + x);
            };
            const double tail = numerics::integrate_adaptive(integrand, 0.0, s_cap, 1e-13, 20000).value;
            worst = std::max(worst, tail * std::pow(1.0 + a, p.alpha) / p.tail_K);
        }
        report.h2_worst_ratio = worst;
        report.h2_ok = worst <= 1.0 + 1e-6;
        if (!report.h2_ok)
        {
            report.notes.push_back("declared tail bound K/(1+a)^alpha is violated on the sampled grid");
        }
    }
    return report;
}

} // namespace ctrw
