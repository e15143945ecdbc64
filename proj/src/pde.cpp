#include "ctrw/pde.hpp"

#include "ctrw/errors.hpp"
#include "ctrw/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace ctrw
{

namespace
{

// Neumaier summation.
struct CompensatedSum
{
    double sum = 0.0;
    double carry = 0.0;

    void add(double x)
    {
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

double survival_at(const JumpRateModel& model, bool reference, double age, double dt)
{
    return reference ? std::exp(-model.mu() * std::log1p(dt / (1.0 + age))) : model.survival(age, dt);
}

// Survival over dt averaged over ages uniform in [age_lo, age_lo + width]. The
// midpoint rule suffices once the age spread is small against 1 + age; young
// cells, where the renewal boundary layer lives, get 4-point Gauss-Legendre.
double cell_survival(const JumpRateModel& model, bool reference, double age_lo, double width, double dt)
{
    if (width <= 0.05 * (1.0 + age_lo))
    {
        return survival_at(model, reference, age_lo + 0.5 * width, dt);
    }
    static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                    0.8611363115940526};
    static constexpr double wt[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                     0.3478548451374538};
    double s = 0.0;
    for (int k = 0; k < 4; ++k)
    {
        s += 0.5 * wt[k] * survival_at(model, reference, age_lo + 0.5 * width * (1.0 + x[k]), dt);
    }
    return s;
}

} // namespace

std::string to_string(Variables v)
{
    return v == Variables::Natural ? "natural" : "rescaled";
}

Variables variables_from_string(const std::string& name)
{
    if (name == "natural")
    {
        return Variables::Natural;
    }
    if (name == "rescaled")
    {
        return Variables::Rescaled;
    }
    throw ParameterError("unknown variables '" + name + "' (expected natural|rescaled)");
}

DensityProfile::DensityProfile(Variables variables, double length, std::vector<double> averages, double time)
    : variables_(variables), length_(length), averages_(std::move(averages)), time_(time)
{
    if (averages_.empty())
    {
        throw ParameterError("DensityProfile needs at least one cell");
    }
    if (!(length_ > 0.0))
    {
        throw ParameterError("DensityProfile length must be positive");
    }
    if (variables_ == Variables::Rescaled && length_ != 1.0)
    {
        throw ParameterError("rescaled profiles live on [0, 1)");
    }
    for (double v : averages_)
    {
        if (!(v >= 0.0) || !std::isfinite(v))
        {
            throw DomainError("cell averages must be finite and non-negative");
        }
    }
}

DensityProfile DensityProfile::dirac(Variables variables, int n_cells, double length)
{
    if (n_cells < 1)
    {
        throw ParameterError("n_cells must be positive");
    }
    std::vector<double> avg(n_cells, 0.0);
    avg[0] = n_cells / length;
    return DensityProfile(variables, length, std::move(avg));
}

DensityProfile DensityProfile::uniform_unit(Variables variables, int n_cells, double length)
{
    if (n_cells < 1)
    {
        throw ParameterError("n_cells must be positive");
    }
    if (length < 1.0)
    {
        throw ParameterError("uniform initial data on [0, 1) needs length >= 1");
    }
    const double h = length / n_cells;
    std::vector<double> avg(n_cells, 0.0);
    for (int i = 0; i < n_cells; ++i)
    {
        const double lo = i * h;
        const double hi = std::min((i + 1) * h, 1.0);
        avg[i] = hi > lo ? (hi - lo) / h : 0.0;
    }
    return DensityProfile(variables, length, std::move(avg));
}

DensityProfile DensityProfile::from_density(Variables variables, int n_cells, double length,
                                            const std::function<double(double)>& density)
{
    if (n_cells < 1)
    {
        throw ParameterError("n_cells must be positive");
    }
    const double h = length / n_cells;
    std::vector<double> avg(n_cells);
    CompensatedSum mass;
    for (int i = 0; i < n_cells; ++i)
    {
        avg[i] = numerics::integrate_adaptive(density, i * h, (i + 1) * h, 1e-14).value / h;
        mass.add(avg[i] * h);
    }
    if (!(mass.value() > 0.0))
    {
        throw DomainError("initial density has no mass");
    }
    for (double& v : avg)
    {
        v /= mass.value();
    }
    return DensityProfile(variables, length, std::move(avg));
}

double DensityProfile::mass() const
{
    CompensatedSum s;
    for (double v : averages_)
    {
        s.add(v);
    }
    return s.value() * cell_width();
}

void advance_rescaled(DensityProfile& p, double dtau, const JumpRateModel& model, bool removal)
{
    if (p.variables_ != Variables::Rescaled)
    {
        throw ParameterError("advance_rescaled needs a rescaled profile");
    }
    const int n = p.n_cells();
    const double h = p.cell_width();
    if (!(dtau > 0.0) || dtau > h * (1.0 + 1e-12))
    {
        throw ParameterError("rescaled step violates the CFL condition dtau <= cell width");
    }
    auto& w = p.averages_;
    const double scale = std::exp(p.time_);
    // Natural time elapsed during the step; ages grow by exactly this amount.
    const double dt = scale * std::expm1(dtau);

    CompensatedSum removed;
    if (removal)
    {
        const bool reference = model.kind() == RateKind::Reference;
        for (int i = 0; i < n; ++i)
        {
            if (w[i] == 0.0)
            {
                continue;
            }
            const double keep = cell_survival(model, reference, scale * i * h, scale * h, dt);
            const double kept = w[i] * keep;
            removed.add(w[i] - kept);
            w[i] = kept;
        }
    }

    // Upwind fluxes (1 - b) w at interior faces; both boundary fluxes vanish.
    const double ratio = dtau / h;
    double inflow_from_left = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double face_speed = i + 1 < n ? 1.0 - (i + 1) * h : 0.0;
        const double out = ratio * face_speed * w[i];
        w[i] = w[i] - out + inflow_from_left;
        inflow_from_left = out;
    }
    // Removed densities summed over cells of equal width carry the mass into cell 0.
    w[0] += removed.value();
    p.time_ += dtau;
}

void advance_natural(DensityProfile& p, double dt, const JumpRateModel& model, bool removal)
{
    if (p.variables_ != Variables::Natural)
    {
        throw ParameterError("advance_natural needs a natural-variable profile");
    }
    const int n = p.n_cells();
    const double h = p.cell_width();
    if (!(dt > 0.0) || dt > h * (1.0 + 1e-12))
    {
        throw ParameterError("natural step violates the CFL condition dt <= cell width");
    }
    auto& w = p.averages_;
    const bool exact_shift = std::abs(dt - h) <= 1e-12 * h;
    if (w[n - 1] > 0.0)
    {
        throw DomainError("age support reached a_max; enlarge the natural domain");
    }

    CompensatedSum removed;
    if (removal)
    {
        const bool reference = model.kind() == RateKind::Reference;
        for (int i = 0; i < n; ++i)
        {
            if (w[i] == 0.0)
            {
                continue;
            }
            const double keep = cell_survival(model, reference, i * h, h, dt);
            const double kept = w[i] * keep;
            removed.add(w[i] - kept);
            w[i] = kept;
        }
    }

    if (exact_shift)
    {
        std::move_backward(w.begin(), w.end() - 1, w.end());
        w[0] = 0.0;
    }
    else
    {
        const double ratio = dt / h;
        double inflow_from_left = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const double out = ratio * w[i];
            w[i] = w[i] - out + inflow_from_left;
            inflow_from_left = out;
        }
    }
    // Removed densities summed over cells of equal width carry the mass into cell 0.
    w[0] += removed.value();
    p.time_ += dt;
}

DensityProfile step_rescaled(DensityProfile p, double dtau, const JumpRateModel& model, bool removal)
{
    advance_rescaled(p, dtau, model, removal);
    return p;
}

DensityProfile step_natural(DensityProfile p, double dt, const JumpRateModel& model, bool removal)
{
    advance_natural(p, dt, model, removal);
    return p;
}

double two_solution_gap(const DensityProfile& p1, const DensityProfile& p2)
{
    if (p1.variables() != p2.variables() || p1.n_cells() != p2.n_cells() || p1.length() != p2.length())
    {
        throw ParameterError("two_solution_gap: profiles live on different grids");
    }
    if (std::abs(p1.time() - p2.time()) > 1e-9 * std::max(1.0, std::abs(p1.time())))
    {
        throw ParameterError("two_solution_gap: profiles are at different times");
    }
    CompensatedSum s;
    for (int i = 0; i < p1.n_cells(); ++i)
    {
        s.add(std::abs(p1[i] - p2[i]));
    }
    return s.value() * p1.cell_width();
}

DensityProfile rescale_natural(const DensityProfile& natural, int n_cells)
{
    if (natural.variables() != Variables::Natural)
    {
        throw ParameterError("rescale_natural needs a natural-variable profile");
    }
    const double span = 1.0 + natural.time();
    const double ha = natural.cell_width();
    const double hb = 1.0 / n_cells;
    std::vector<double> avg(n_cells, 0.0);
    for (int j = 0; j < n_cells; ++j)
    {
        const double a_lo = span * j * hb;
        const double a_hi = span * (j + 1) * hb;
        const int first = static_cast<int>(a_lo / ha);
        const int last = std::min(static_cast<int>(std::ceil(a_hi / ha)), natural.n_cells());
        double mass = 0.0;
        for (int i = first; i < last; ++i)
        {
            const double lo = std::max(a_lo, i * ha);
            const double hi = std::min(a_hi, (i + 1) * ha);
            if (hi > lo)
            {
                mass += natural[i] * (hi - lo);
            }
        }
        avg[j] = mass / hb;
    }
    return DensityProfile(Variables::Rescaled, 1.0, std::move(avg), std::log1p(natural.time()));
}

DensityProfile coarsen(const DensityProfile& p, int factor)
{
    if (factor < 1 || p.n_cells() % factor != 0)
    {
        throw ParameterError("coarsen: factor must divide the number of cells");
    }
    std::vector<double> avg(p.n_cells() / factor, 0.0);
    for (int i = 0; i < p.n_cells(); ++i)
    {
        avg[i / factor] += p[i] / factor;
    }
    return DensityProfile(p.variables(), p.length(), std::move(avg), p.time());
}

} // namespace ctrw
