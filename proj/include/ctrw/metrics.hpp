#pragma once

#include "ctrw/equilibria.hpp"
#include "ctrw/montecarlo.hpp"
#include "ctrw/pde.hpp"

#include <string>
#include <vector>

namespace ctrw
{

/// Read-only piecewise-constant density on n equal cells of [0, length).
struct PiecewiseConstant
{
    double length = 1.0;
    std::vector<double> averages;

    int n_cells() const { return static_cast<int>(averages.size()); }
    double cell_width() const { return length / n_cells(); }
};

PiecewiseConstant view(const DensityProfile& profile);
PiecewiseConstant view(const RescaledHistogram& histogram);

enum class TargetKind
{
    PseudoEquilibrium, ///< W(tau, .), time = tau
    WInfinity,         ///< W_inf
    N,                 ///< N(t, .), time = t
    NInfinity,         ///< N_inf(t, .), time = t
};

struct Target
{
    TargetKind kind = TargetKind::PseudoEquilibrium;
    double time = 0.0;

    static Target pseudo_equilibrium(double tau) { return {TargetKind::PseudoEquilibrium, tau}; }
    static Target w_infinity() { return {TargetKind::WInfinity, 0.0}; }
    static Target natural(double t) { return {TargetKind::N, t}; }
    static Target natural_limit(double t) { return {TargetKind::NInfinity, t}; }
};

/// Exact cell averages of the target density on n equal cells of [0, length),
/// by singular quadrature per cell.
std::vector<double> target_cell_averages(const EquilibriumHandle& h, const Target& target, int n_cells,
                                         double length = 1.0);

double l1_distance(const PiecewiseConstant& profile, const std::vector<double>& target_averages);
double l1_distance_to(const PiecewiseConstant& profile, const Target& target, const EquilibriumHandle& h);

enum class EntropyKind
{
    AbsDeviation, ///< H(x) = |x - 1|
    KullbackType, ///< H(x) = x ln x - x + 1
};

std::string to_string(EntropyKind kind);
EntropyKind entropy_kind_from_string(const std::string& name);

struct EntropySpec
{
    EntropyKind kind = EntropyKind::AbsDeviation;

    double H(double x) const;
    /// A subgradient; sign(x - 1) for AbsDeviation.
    double H_prime(double x) const;
};

/// sum H(avg / W_avg) W_avg * width over cells, with W_avg the exact cell averages of W(tau, .).
double relative_entropy(const PiecewiseConstant& profile, double tau, const EntropySpec& spec,
                        const EquilibriumHandle& h);
double relative_entropy(const PiecewiseConstant& profile, const std::vector<double>& w_averages,
                        const EntropySpec& spec);

struct Dissipation
{
    double DH = 0.0;        ///< int H(u) dgamma - H(int u dgamma)
    double remainder = 0.0; ///< C delta int (H(u) - u H'(u)) W db
    double gamma_mass = 0.0; ///< total mass of dgamma, equal to 1 + delta
    double C = 0.0;

    /// -C DH + remainder: the entropy derivative for exact solutions.
    double rate() const { return -C * DH + remainder; }
};

/// Discretisation of the dissipation identity with dgamma = e^tau beta(e^tau b) W db / C,
/// u = w / W cell by cell.
Dissipation dissipation_measure(const PiecewiseConstant& profile, double tau, const EntropySpec& spec,
                                const EquilibriumHandle& h);

/// sqrt(bins / particles), the statistical L1 floor heuristic for histograms.
double statistical_floor(int n_bins, std::size_t n_particles);

} // namespace ctrw
