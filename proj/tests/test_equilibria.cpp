#include "ctrw/equilibria.hpp"
#include "ctrw/errors.hpp"
#include "oracles.hpp"
#include "property.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

using namespace ctrw;

TEST_CASE("w_infinity: arcsine values and symmetries")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.5));
    CHECK(h.w_infinity(0.5) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(h.w_infinity(0.5) == doctest::Approx(0.636620).epsilon(1e-6));
    for (double b : {0.01, 0.2, 0.37})
    {
        CHECK(h.w_infinity(b) == doctest::Approx(h.w_infinity(1.0 - b)).epsilon(1e-14));
    }
    const EquilibriumHandle h3(JumpRateModel::reference(0.3));
    const EquilibriumHandle h7(JumpRateModel::reference(0.7));
    CHECK(h3.w_infinity(0.5) == doctest::Approx(h7.w_infinity(0.5)).epsilon(1e-14));
    CHECK_THROWS_AS(h.w_infinity(0.0), DomainError);
    CHECK_THROWS_AS(h.w_infinity(1.0), DomainError);
}

TEST_CASE("c_infinity: analytic value matches quadrature")
{
    for (int k = 1; k <= 9; ++k)
    {
        const double mu = k / 10.0;
        const EquilibriumHandle h(JumpRateModel::reference(mu));
        CHECK(std::abs(h.c_infinity_quadrature() - std::sin(std::numbers::pi * mu) / std::numbers::pi) < 1e-10);
    }
}

TEST_CASE("normalizer: reference case against the incomplete-beta closed form")
{
    for (double mu : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0})
    {
        const EquilibriumHandle h(JumpRateModel::reference(mu));
        for (double tau : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0})
        {
            CAPTURE(mu);
            CAPTURE(tau);
            const double expected = 1.0 / oracle::inverse_scaled_normalizer(mu, tau);
            CHECK(std::abs(h.scaled_normalizer(tau) - expected) < 1e-10 * expected);
        }
    }
}

TEST_CASE("normalizer: tau = 0, mu = 1/2 gives C(0) = 2/pi")
{
    // int_0^1 (1+b)^-1/2 (1-b)^-1/2 db = int_0^1 (1-b^2)^-1/2 db = pi/2.
    const EquilibriumHandle h(JumpRateModel::reference(0.5));
    CHECK(std::abs(h.normalizer_C(0.0) - 2.0 / std::numbers::pi) < 1e-12);
    CHECK(h.pseudo_equilibrium(0.0, 0.0) / h.normalizer_C(0.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normalizer: c(tau) lies in [c_inf, 2(1+mu)] and tends to c_inf")
{
    for (double mu : {0.1, 0.3, 0.5, 0.7, 0.9})
    {
        const EquilibriumHandle h(JumpRateModel::reference(mu));
        for (double tau = 0.0; tau <= 30.0; tau += 0.75)
        {
            const double c = h.scaled_normalizer(tau);
            CHECK(c >= h.c_infinity() * (1.0 - 1e-12));
            CHECK(c <= 2.0 * (1.0 + mu));
        }
        // c(tau) - c_inf = O(e^{-(1-mu) tau})
        CHECK(std::abs(h.scaled_normalizer(60.0) - h.c_infinity()) < 3.0 * std::exp(-(1.0 - mu) * 60.0) + 1e-12);
    }
}

TEST_CASE("pseudo_equilibrium: W(tau, 0) = C(tau), domain, and large-tau limit")
{
    const EquilibriumHandle h(JumpRateModel::perturbed(0.4, power_tail(1.7, 0.5)));
    for (double tau : {0.0, 1.0, 3.0})
    {
        CHECK(h.pseudo_equilibrium(tau, 0.0) == doctest::Approx(h.normalizer_C(tau)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(h.pseudo_equilibrium(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(h.pseudo_equilibrium(-1.0, 0.5), DomainError);

    for (double mu : {0.2, 0.5, 0.7})
    {
        const EquilibriumHandle r(JumpRateModel::reference(mu));
        for (double b : {0.05, 0.3, 0.6, 0.95})
        {
            CHECK(std::abs(r.pseudo_equilibrium(30.0, b) - r.w_infinity(b)) < 1e-3);
        }
    }
}

TEST_CASE("pseudo_equilibrium: reference closed form")
{
    const double mu = 0.35;
    const EquilibriumHandle h(JumpRateModel::reference(mu));
    prop::for_all(31, 200, [&](prop::Gen& g) {
        const double tau = g.uniform(0.0, 15.0);
        const double b = g.uniform(0.0, 1.0);
        const double e = std::exp(-tau);
        const double expected = h.normalizer_C(tau) * std::exp(-mu * tau) / std::pow(e + b, mu) /
                                std::pow(1.0 - b, 1.0 - mu);
        CHECK(h.pseudo_equilibrium(tau, b) == doctest::Approx(expected).epsilon(1e-12));
    });
}

TEST_CASE("normalisation of W to 1e-8 for several models")
{
    const JumpRateModel models[] = {
        JumpRateModel::reference(0.2),
        JumpRateModel::reference(0.9),
        JumpRateModel::perturbed(0.3, power_tail(1.2)),
        JumpRateModel::perturbed(0.6, compact_bump(2.0, 1.0)),
        JumpRateModel::custom(0.5, [](double a) { return 0.5 / (1.0 + a) + 0.25 / (1.0 + a * a); }),
    };
    for (const auto& m : models)
    {
        const EquilibriumHandle h(m);
        for (double tau : {0.0, 1.0, 2.0, 5.0, 10.0, 20.0})
        {
            CAPTURE(m.label());
            CAPTURE(tau);
            CHECK(std::abs(h.integral_W(tau, 0.0, 1.0) - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("delta: reference closed form on [0, 30]")
{
    for (double mu : {0.1, 0.4, 0.5, 0.8, 1.0})
    {
        const EquilibriumHandle h(JumpRateModel::reference(mu));
        for (double tau = 0.0; tau <= 30.0; tau += 1.25)
        {
            CAPTURE(mu);
            CAPTURE(tau);
            CHECK(std::abs(h.delta(tau) - oracle::reference_delta(tau)) < 1e-8);
        }
        CHECK(h.delta(0.0) == doctest::Approx(-0.5).epsilon(1e-10));
        CHECK(h.delta(std::log(3.0)) == doctest::Approx(-0.25).epsilon(1e-10));
    }
}

TEST_CASE("delta vanishes at large tau for perturbed models")
{
    const EquilibriumHandle h(JumpRateModel::perturbed(0.3, power_tail(1.9)));
    CHECK(std::abs(h.delta(30.0)) < 1e-3);
}

TEST_CASE("mu = 1: explicit W and C delta")
{
    const EquilibriumHandle h(JumpRateModel::reference(1.0));
    for (double tau : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
    {
        const double L = std::log1p(std::exp(tau));
        for (double b : {0.0, 0.001, 0.3, 0.9})
        {
            const double expected = 1.0 / ((std::exp(-tau) + b) * L);
            CHECK(h.pseudo_equilibrium(tau, b) == doctest::Approx(expected).epsilon(1e-10));
        }
        const double cd = -std::exp(tau) / ((1.0 + std::exp(tau)) * L);
        CHECK(std::abs(h.c_delta(tau) - cd) < 1e-8);
    }
    CHECK_THROWS_AS(h.w_infinity(0.5), DomainError);
    CHECK(h.c_infinity() == 0.0);
}

TEST_CASE("natural profiles")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.5));
    const auto outside = h.natural_profiles(3.0, 4.0);
    CHECK(outside.first == 0.0);
    CHECK(outside.second == 0.0);

    const double C0 = h.normalizer_C(0.0);
    for (double a : {0.0, 0.2, 0.7})
    {
        const double expected = C0 / std::sqrt((1.0 + a) * (1.0 - a));
        CHECK(h.natural_profiles(0.0, a).first == doctest::Approx(expected).epsilon(1e-12));
    }

    // int_0^{1+t} N(t, a) da = 1.
    for (double t : {0.0, 2.0, 50.0})
    {
        numerics::SingularQuadratureSpec spec{-0.5, -0.5, 1e-11, 4000};
        const double span = 1.0 + t;
        const double mass = span * numerics::integrate_singular(
                                       [&](double x, double) { return h.natural_profiles(t, x * span).first; }, spec);
        CHECK(std::abs(mass - 1.0) < 1e-8);
    }
    const auto at = h.natural_profiles(3.0, 1.0);
    CHECK(at.second == doctest::Approx(1.0 / std::numbers::pi / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("cell integrals against incomplete-beta oracles")
{
    for (double mu : {0.15, 0.5, 0.85})
    {
        const EquilibriumHandle h(JumpRateModel::reference(mu));
        const int n = 64;
        for (double tau : {0.0, 3.0, 9.0})
        {
            double sum = 0.0;
            for (int i = 0; i < n; ++i)
            {
                const double lo = double(i) / n;
                const double hi = double(i + 1) / n;
                const double v = h.integral_W(tau, lo, hi);
                CHECK(std::abs(v - oracle::reference_cell_W(mu, tau, lo, hi)) < 1e-10);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
        for (int i = 0; i < n; ++i)
        {
            const double lo = double(i) / n;
            const double hi = double(i + 1) / n;
            CHECK(std::abs(h.integral_W_infinity(lo, hi) - oracle::cell_W_infinity(mu, lo, hi)) < 1e-10);
        }
    }
}

TEST_CASE("renewal weight has mass C (1 + delta)")
{
    const JumpRateModel models[] = {
        JumpRateModel::reference(0.3),
        JumpRateModel::perturbed(0.7, power_tail(2.0, 0.4)),
    };
    for (const auto& m : models)
    {
        const EquilibriumHandle h(m);
        for (double tau : {0.0, 2.0, 8.0})
        {
            const double mass = h.integral_renewal_weight(tau, 0.0, 1.0) / h.normalizer_C(tau);
            CHECK(std::abs(mass - (1.0 + h.delta(tau))) < 1e-8);
        }
    }
}

TEST_CASE("sandwich: W (1 + e^tau b)^mu (1-b)^(1-mu) e^-mu tau stays within [1/K, K]")
{
    const EquilibriumHandle h(JumpRateModel::perturbed(0.4, power_tail(1.5, 0.8)));
    double lo = 1e300;
    double hi = 0.0;
    for (double tau = 0.0; tau <= 25.0; tau += 2.5)
    {
        for (double b : {0.0, 1e-9, 1e-5, 1e-3, 0.1, 0.5, 0.9, 0.999})
        {
            const double v = h.pseudo_equilibrium(tau, b) * std::pow(1.0 + std::exp(tau) * b, 0.4) *
                             std::pow(1.0 - b, 0.6) * std::exp(-0.4 * tau);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double K = std::max(hi, 1.0 / lo);
    CHECK(K < 20.0);
}

TEST_CASE("l1 distance W to W_inf: oracle and decay exponent 1 - mu")
{
    for (double mu : {0.3, 0.7})
    {
        const EquilibriumHandle h(JumpRateModel::reference(mu));
        // Brute-force oracle from 4096 exact cell masses (a lower bound converging from below).
        const double tau = 4.0;
        const int n = 4096;
        double coarse = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const double lo = double(i) / n;
            const double hi = double(i + 1) / n;
            coarse += std::abs(oracle::reference_cell_W(mu, tau, lo, hi) - oracle::cell_W_infinity(mu, lo, hi));
        }
        const double exact = h.l1_pseudo_to_limit(tau);
        CHECK(exact >= coarse - 1e-10);
        CHECK(exact - coarse < 1e-3);

        const double r = std::log(h.l1_pseudo_to_limit(20.0) / h.l1_pseudo_to_limit(25.0)) / 5.0;
        CHECK(std::abs(r - (1.0 - mu)) < 0.02);
    }
}

TEST_CASE("memo is shared and safe under concurrent fills")
{
    const EquilibriumHandle h(JumpRateModel::reference(0.45));
    const EquilibriumHandle copy = h;
    std::vector<double> serial;
    for (int i = 0; i < 40; ++i)
    {
        serial.push_back(1.0 / oracle::inverse_scaled_normalizer(0.45, 0.25 * i));
    }
    std::vector<std::thread> threads;
    std::vector<std::vector<double>> got(4, std::vector<double>(40));
    for (int t = 0; t < 4; ++t)
    {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 40; ++i)
            {
                got[t][i] = (t % 2 ? copy : h).scaled_normalizer(0.25 * i);
            }
        });
    }
    for (auto& th : threads)
    {
        th.join();
    }
    for (int t = 0; t < 4; ++t)
    {
        for (int i = 0; i < 40; ++i)
        {
            CHECK(got[t][i] == got[0][i]);
            CHECK(std::abs(got[t][i] - serial[i]) < 1e-10 * serial[i]);
        }
    }
}
