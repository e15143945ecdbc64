#include "ctrw/errors.hpp"
#include "ctrw/numerics.hpp"
#include "property.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace ctrw;
using namespace ctrw::numerics;

TEST_CASE("integrate_singular: constant integrand")
{
    CHECK(integrate_singular([](double) { return 1.0; }, SingularQuadratureSpec{}) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("integrate_singular: arcsine density normalises to pi")
{
    SingularQuadratureSpec spec{-0.5, -0.5, 1e-12, 4000};
    const double v = integrate_singular([](double x, double xc) { return 1.0 / std::sqrt(x * xc); }, spec);
    CHECK(std::abs(v - std::numbers::pi) < 1e-12);
}

TEST_CASE("integrate_singular: Beta(0.7, 0.3) via the reflection formula")
{
    SingularQuadratureSpec spec{-0.3, -0.7, 1e-12, 4000};
    const double v =
        integrate_singular([](double x, double xc) { return std::pow(x, -0.3) * std::pow(xc, -0.7); }, spec);
    CHECK(std::abs(v - std::numbers::pi / std::sin(0.3 * std::numbers::pi)) < 1e-12);
    CHECK(v == doctest::Approx(3.8832).epsilon(1e-4));
}

TEST_CASE("integrate_singular: Beta(1-mu, mu) = pi/sin(pi mu) across mu")
{
    for (int k = 1; k <= 9; ++k)
    {
        const double mu = k / 10.0;
        CAPTURE(mu);
        SingularQuadratureSpec spec{-mu, mu - 1.0, 1e-12, 4000};
        const double v =
            integrate_singular([mu](double x, double xc) { return std::pow(x, -mu) * std::pow(xc, mu - 1.0); }, spec);
        CHECK(std::abs(v - std::numbers::pi / std::sin(mu * std::numbers::pi)) < 1e-12);
    }
}

TEST_CASE("integrate_singular: rejects non-integrable exponents and reports non-convergence")
{
    CHECK_THROWS_AS(integrate_singular([](double) { return 1.0; }, SingularQuadratureSpec{-1.0, 0.0, 1e-12, 100}),
                    ParameterError);
    CHECK_THROWS_AS(integrate_singular([](double) { return 1.0; }, SingularQuadratureSpec{0.0, 0.0, 0.0, 100}),
                    ParameterError);
    // A wildly oscillating integrand cannot be resolved with two panels.
    SingularQuadratureSpec tight{0.0, 0.0, 1e-14, 2};
    try
    {
        integrate_singular([](double x) { return std::sin(1e4 * x); }, tight);
        FAIL("expected NumericError");
    }
    catch (const NumericError& e)
    {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.error_bound() > 1e-14);
    }
}

TEST_CASE("integrate_interval: sub-interval of the arcsine density")
{
    SingularQuadratureSpec spec{-0.5, -0.5, 1e-12, 4000};
    auto f = [](double x, double xc) { return 1.0 / std::sqrt(x * xc); };
    // int_0^b = 2 asin(sqrt(b))
    const double v = integrate_interval(f, 0.25, 1.0, spec);
    CHECK(std::abs(v - (std::numbers::pi - 2.0 * std::asin(0.5))) < 1e-11);
    const double w = integrate_interval(f, 0.0, 0.25, spec);
    CHECK(std::abs(w - 2.0 * std::asin(0.5)) < 1e-11);
}

TEST_CASE("find_root: worked examples")
{
    CHECK(std::abs(find_root([](double x) { return x - 2.0; }, 0.0, 10.0, 1e-12) - 2.0) < 1e-12);
    CHECK(std::abs(find_root([](double x) { return std::log1p(x) - 1.0; }, 0.0, 10.0, 1e-12) -
                   (std::numbers::e - 1.0)) < 1e-11);

    // Bisection oracle for x^3 - x - 2 on [1, 2].
    auto f = [](double x) { return x * x * x - x - 2.0; };
    double lo = 1.0;
    double hi = 2.0;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    CHECK(std::abs(find_root(f, 1.0, 2.0, 1e-12) - lo) < 1e-11);
    CHECK(lo == doctest::Approx(1.52138).epsilon(1e-5));
}

TEST_CASE("find_root: no sign change is a precondition error")
{
    CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), ParameterError);
}

TEST_CASE("property: find_root result does not depend on the bracket")
{
    prop::for_all(11, 200, [](prop::Gen& g) {
        const double root = g.uniform(-5.0, 5.0);
        const double slope = g.log_uniform(1e-2, 1e2);
        auto f = [&](double x) { return std::tanh(slope * (x - root)) + 0.1 * (x - root); };
        const double lo = root - g.uniform(1e-3, 10.0);
        const double hi = root + g.uniform(1e-3, 10.0);
        CHECK(std::abs(find_root(f, lo, hi, 1e-12) - root) < 1e-10);
    });
}

TEST_CASE("philox: known-answer vector")
{
    // Reference output of Philox4x32-10 for a zero counter and key (Random123 kat_vectors).
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5U);
    CHECK(out[1] == 0xe169c58dU);
    CHECK(out[2] == 0xbc57ac4cU);
    CHECK(out[3] == 0x9b00dbd8U);
    const auto ones = philox4x32({0xffffffffU, 0xffffffffU, 0xffffffffU, 0xffffffffU}, {0xffffffffU, 0xffffffffU});
    CHECK(ones[0] == 0x408f276dU);
    CHECK(ones[1] == 0x41c83b0eU);
    CHECK(ones[2] == 0xa20bc7c6U);
    CHECK(ones[3] == 0x6d5451fdU);
}

TEST_CASE("uniform_at: pure, open interval, stream separated")
{
    CHECK(uniform_at(1, 2, 3) == uniform_at(1, 2, 3));
    CHECK(uniform_at(1, 2, 3) != uniform_at(1, 3, 3));
    CHECK(uniform_at(1, 2, 3) != uniform_at(2, 2, 3));

    RandomStream s(42, walker_stream(3, 7));
    RandomStream copy = s;
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum_sq += u * u;
    }
    CHECK(copy.uniform() == uniform_at(42, walker_stream(3, 7), 0));
    CHECK(s.counter() == static_cast<std::uint64_t>(n));
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(var - 1.0 / 12.0) < 1e-3);
}

TEST_CASE("walker_stream: distinct for distinct (replica, walker)")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 8; ++r)
    {
        for (std::uint64_t w = 0; w < 64; ++w)
        {
            CHECK(seen.insert(walker_stream(r, w)).second);
        }
    }
}
