#pragma once

#include "ctrw/rates.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ctrw
{

enum class Variables
{
    Natural,  ///< n(t, a) on [0, a_max), time is t
    Rescaled, ///< w(tau, b) on [0, 1), time is tau
};

std::string to_string(Variables v);
Variables variables_from_string(const std::string& name);

/// Piecewise-constant density on n equal cells of [0, length).
class DensityProfile
{
public:
    DensityProfile(Variables variables, double length, std::vector<double> averages, double time = 0.0);

    /// Unit mass in cell 0.
    static DensityProfile dirac(Variables variables, int n_cells, double length = 1.0);
    /// Uniform density on [0, 1) (ages in [0, 1) for natural variables).
    static DensityProfile uniform_unit(Variables variables, int n_cells, double length = 1.0);
    /// Exact cell averages of `density` by adaptive quadrature, renormalised to unit mass.
    static DensityProfile from_density(Variables variables, int n_cells, double length,
                                       const std::function<double(double)>& density);

    Variables variables() const { return variables_; }
    double length() const { return length_; }
    int n_cells() const { return static_cast<int>(averages_.size()); }
    double cell_width() const { return length_ / n_cells(); }
    double cell_center(int i) const { return (i + 0.5) * cell_width(); }
    double time() const { return time_; }
    const std::vector<double>& averages() const { return averages_; }
    double operator[](int i) const { return averages_[i]; }

    /// Compensated sum of avg * width.
    double mass() const;

    friend void advance_rescaled(DensityProfile&, double, const JumpRateModel&, bool);
    friend void advance_natural(DensityProfile&, double, const JumpRateModel&, bool);

private:
    Variables variables_;
    double length_;
    std::vector<double> averages_;
    double time_;
};

/// In-place split step of the rescaled renewal equation: exact exponential
/// removal along characteristics, conservative upwind advection of (1-b) w,
/// and reinjection of the removed mass into cell 0. Requires dtau <= cell width.
void advance_rescaled(DensityProfile& p, double dtau, const JumpRateModel& model, bool removal = true);

/// In-place split step of the natural-variable equation with unit speed. With
/// dt equal to the cell width transport is an exact one-cell shift. Throws
/// DomainError when mass would leave [0, a_max).
void advance_natural(DensityProfile& p, double dt, const JumpRateModel& model, bool removal = true);

DensityProfile step_rescaled(DensityProfile p, double dtau, const JumpRateModel& model, bool removal = true);
DensityProfile step_natural(DensityProfile p, double dt, const JumpRateModel& model, bool removal = true);

/// sum |p1 - p2| * width. Profiles must share variables, grid and time.
double two_solution_gap(const DensityProfile& p1, const DensityProfile& p2);

/// Maps n(t, .) to w(tau, .) with w(tau, b) = (1+t) n(t, (1+t) b), averaging
/// the natural cells exactly over each rescaled cell.
DensityProfile rescale_natural(const DensityProfile& natural, int n_cells);

/// Averages groups of `factor` adjacent cells (factor must divide n_cells).
DensityProfile coarsen(const DensityProfile& p, int factor);

} // namespace ctrw
