#include "ctrw/equilibria.hpp"
#include "ctrw/errors.hpp"
#include "ctrw/metrics.hpp"
#include "ctrw/montecarlo.hpp"
#include "oracles.hpp"
#include "property.hpp"

#include <doctest.h>

#include <cmath>

using namespace ctrw;

namespace
{

PiecewiseConstant random_profile(prop::Gen& g, int n)
{
    PiecewiseConstant p;
    p.averages.resize(n);
    double mass = 0.0;
    for (double& v : p.averages)
    {
        v = g.uniform(0.0, 1.0) < 0.2 ? 0.0 : g.log_uniform(1e-3, 10.0);
        mass += v / n;
    }
    for (double& v : p.averages)
    {
        v /= mass;
    }
    return p;
}

} // namespace

TEST_CASE("target cell averages match the Beta-function oracle")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.3));
    const int n = 64;
    const auto W = target_cell_averages(h, Target::pseudo_equilibrium(2.0), n);
    const auto Wi = target_cell_averages(h, Target::w_infinity(), n);
    for (int i = 0; i < n; i += 7)
    {
        const double lo = double(i) / n;
        const double hi = double(i + 1) / n;
        CHECK(W[i] / n == doctest::Approx(oracle::reference_cell_W(0.3, 2.0, lo, hi)).epsilon(1e-9));
        CHECK(Wi[i] / n == doctest::Approx(oracle::cell_W_infinity(0.3, lo, hi)).epsilon(1e-9));
    }
}

TEST_CASE("l1 distance of the exact cell averages is zero")
{
    for (double mu : {0.2, 0.7})
    {
        const EquilibriumHandle h(JumpRateModel::reference(mu));
        const PiecewiseConstant p{1.0, target_cell_averages(h, Target::pseudo_equilibrium(1.5), 256)};
        CHECK(l1_distance_to(p, Target::pseudo_equilibrium(1.5), h) < 1e-10);
        EntropySpec kl{EntropyKind::KullbackType};
        CHECK(relative_entropy(p, 1.5, kl, h) < 1e-10);
    }
}

TEST_CASE("natural targets are rescaled pseudo-equilibria")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.4));
    const double t = 3.0;
    const int n = 200;
    const double length = 8.0;
    const auto N = target_cell_averages(h, Target::natural(t), n, length);
    double mass = 0.0;
    for (double v : N)
    {
        mass += v * length / n;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    // Cells beyond a = 1 + t carry nothing.
    CHECK(N.back() == 0.0);
    const double a = 1.3;
    const int i = static_cast<int>(a / (length / n));
    CHECK(N[i] == doctest::Approx(h.natural_profiles(t, (i + 0.5) * length / n).first).epsilon(1e-3));
}

TEST_CASE("AbsDeviation entropy equals the L1 distance")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.6));
    const int n = 128;
    const auto W = target_cell_averages(h, Target::pseudo_equilibrium(0.7), n);
    prop::for_all(41, 50, [&](prop::Gen& g) {
        const auto p = random_profile(g, n);
        CHECK(relative_entropy(p, W, EntropySpec{EntropyKind::AbsDeviation}) ==
              doctest::Approx(l1_distance(p, W)).epsilon(1e-12));
    });
}

TEST_CASE("Kullback-type entropy dominates half the squared L1 distance")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.35));
    const int n = 128;
    const auto W = target_cell_averages(h, Target::pseudo_equilibrium(1.0), n);
    prop::for_all(42, 50, [&](prop::Gen& g) {
        const auto p = random_profile(g, n);
        const double l1 = l1_distance(p, W);
        CHECK(relative_entropy(p, W, EntropySpec{EntropyKind::KullbackType}) >= 0.5 * l1 * l1 - 1e-12);
    });
    EntropySpec kl{EntropyKind::KullbackType};
    CHECK(kl.H(0.0) == 1.0);
    CHECK(kl.H(1.0) == 0.0);
}

TEST_CASE("dissipation measure: gamma mass and the u = 1 case")
{
    for (double mu : {0.3, 0.8})
    {
        const auto model = JumpRateModel::reference(mu);
        const EquilibriumHandle h(model);
        const int n = 256;
        for (double tau : {0.5, 2.0})
        {
            const PiecewiseConstant W{1.0, target_cell_averages(h, Target::pseudo_equilibrium(tau), n)};
            for (EntropyKind kind : {EntropyKind::AbsDeviation, EntropyKind::KullbackType})
            {
                const Dissipation d = dissipation_measure(W, tau, EntropySpec{kind}, h);
                CHECK(d.gamma_mass == doctest::Approx(1.0 + oracle::reference_delta(tau)).epsilon(1e-8));
                CHECK(d.DH >= -std::abs(h.delta(tau)) - 1e-12);
                CHECK(std::abs(d.remainder) < 1e-10);
            }
        }
    }
}

TEST_CASE("Jensen gap is non-negative for probability weights")
{
    prop::for_all(43, 200, [](prop::Gen& g) {
        const int n = g.integer(2, 30);
        std::vector<double> weight(n);
        std::vector<double> u(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i)
        {
            weight[i] = g.uniform(0.01, 1.0);
            u[i] = g.log_uniform(1e-4, 1e2);
            total += weight[i];
        }
        for (EntropyKind kind : {EntropyKind::AbsDeviation, EntropyKind::KullbackType})
        {
            const EntropySpec spec{kind};
            double mean_H = 0.0;
            double mean_u = 0.0;
            for (int i = 0; i < n; ++i)
            {
                mean_H += spec.H(u[i]) * weight[i] / total;
                mean_u += u[i] * weight[i] / total;
            }
            CHECK(mean_H - spec.H(mean_u) >= -1e-12 * (1.0 + mean_H));
        }
    });
}

TEST_CASE("triangle inequality between the two attractors")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.2));
    const int n = 128;
    const double tau = 6.0;
    const auto W = target_cell_averages(h, Target::pseudo_equilibrium(tau), n);
    const auto Wi = target_cell_averages(h, Target::w_infinity(), n);
    const double gap = l1_distance(PiecewiseConstant{1.0, W}, Wi);
    CHECK(gap <= h.l1_pseudo_to_limit(tau) + 1e-10);
    prop::for_all(44, 50, [&](prop::Gen& g) {
        const auto p = random_profile(g, n);
        CHECK(std::abs(l1_distance(p, W) - l1_distance(p, Wi)) <= gap + 1e-12);
    });
}

TEST_CASE("a fresh Dirac population starts within the trivial bound")
{
    const auto model = JumpRateModel::reference(0.5);
    const EquilibriumHandle h(model);
    auto pop = init_population(20000, InitialCondition::dirac(), model, 5);
    const auto hist = snapshot_histogram(pop);
    const double d = l1_distance_to(view(hist), Target::pseudo_equilibrium(0.0), h);
    CHECK(d <= 2.0);
    CHECK(d > 1.5);
    CHECK(statistical_floor(512, 20000) == doctest::Approx(0.16).epsilon(1e-3));
}

TEST_CASE("metric input checks")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.5));
    PiecewiseConstant p{1.0, {1.0, 1.0}};
    CHECK_THROWS_AS(l1_distance(p, {1.0}), ParameterError);
    CHECK_THROWS_AS(relative_entropy(p, {1.0, 0.0}, EntropySpec{}), NumericError);
    CHECK_THROWS_AS(entropy_kind_from_string("tv"), ParameterError);
    CHECK_THROWS_AS(target_cell_averages(h, Target::natural(-1.0), 4), DomainError);
}
