#include "ctrw/bounds.hpp"
#include "ctrw/errors.hpp"
#include "property.hpp"

#include <doctest.h>

#include <cmath>

using namespace ctrw;

namespace
{

BoundSpec general(double mu, double alpha)
{
    BoundSpec s;
    s.theorem = Theorem::ThmGeneral;
    s.mu = mu;
    s.alpha = alpha;
    return s;
}

} // namespace

TEST_CASE("ThmRef telescopes to H0 at tau = 0 on both branches")
{
    prop::for_all(11, 200, [](prop::Gen& g) {
        BoundSpec s;
        s.mu = g.uniform(0.01, 0.99);
        s.H0 = g.uniform(0.0, 2.0);
        CHECK(eval_bound(s, 0.0) == doctest::Approx(s.H0).epsilon(1e-12).scale(1.0));
    });
    BoundSpec half;
    half.mu = 0.5;
    CHECK(eval_bound(half, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("ThmRef half branch matches its closed form")
{
    BoundSpec s;
    s.mu = 0.5;
    for (double tau : {0.5, 1.0, 4.0, 9.0})
    {
        const double expected = std::exp(-tau / 2) * 2.0 / (1.0 + std::exp(-tau)) * (2.0 + 8.0 * tau);
        CHECK(eval_bound(s, tau) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("ThmRef stays finite and positive as mu approaches one half")
{
    for (double eps : {1e-3, 1e-6, 1e-9})
    {
        for (double sign : {-1.0, 1.0})
        {
            BoundSpec s;
            s.mu = 0.5 + sign * eps;
            for (double tau : {0.1, 1.0, 5.0})
            {
                const double v = eval_bound(s, tau);
                CHECK(std::isfinite(v));
                CHECK(v > 0.0);
            }
        }
    }
}

TEST_CASE("ThmRef is eventually decreasing")
{
    prop::for_all(12, 100, [](prop::Gen& g) {
        BoundSpec s;
        s.mu = g.uniform(0.02, 0.98);
        double prev = eval_bound(s, 30.0);
        for (double tau = 30.5; tau <= 60.0; tau += 0.5)
        {
            const double v = eval_bound(s, tau);
            CHECK(v < prev);
            prev = v;
        }
    });
}

TEST_CASE("LowerDirac example")
{
    BoundSpec s;
    s.theorem = Theorem::LowerDirac;
    s.mu = 0.4;
    CHECK(eval_bound(s, std::log(2.0)) == doctest::Approx(std::pow(2.0, -0.4)).epsilon(1e-15));
    CHECK(eval_bound(s, std::log(2.0)) == doctest::Approx(0.7579).epsilon(1e-4));
}

TEST_CASE("NaturalVars agrees with its form in natural time")
{
    for (double mu : {0.2, 0.5, 0.8})
    {
        BoundSpec s;
        s.theorem = Theorem::NaturalVars;
        s.mu = mu;
        s.K = 1.7;
        for (double t : {0.0, 1.0, 50.0, 1e4})
        {
            const double expected = mu == 0.5 ? s.K * (1.0 + std::log1p(t)) / std::sqrt(1.0 + t)
                                              : s.K * (std::pow(1.0 + t, -mu) + std::pow(1.0 + t, mu - 1.0));
            CHECK(eval_bound(s, std::log1p(t)) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("WtoWinf and MuOne forms")
{
    BoundSpec s;
    s.theorem = Theorem::WtoWinf;
    s.mu = 0.3;
    s.K = 2.0;
    CHECK(eval_bound(s, 2.0) == doctest::Approx(2.0 * std::exp(-0.7 * 2.0)).epsilon(1e-15));
    s.alpha = 0.25;
    CHECK(eval_bound(s, 2.0) == doctest::Approx(2.0 * (std::exp(-1.4) + std::exp(-0.5))).epsilon(1e-15));
    CHECK(dominant_rate(s).exponent == doctest::Approx(0.25));

    BoundSpec one;
    one.theorem = Theorem::MuOne;
    one.mu = 1.0;
    one.K = 3.0;
    CHECK(eval_bound(one, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("ThmGeneral case table")
{
    const double tau = 3.0;
    CHECK(eval_bound(general(0.3, 0.3), tau) == doctest::Approx((1 + tau) * std::exp(-0.3 * tau)));
    CHECK(eval_bound(general(0.3, 0.2), tau) == doctest::Approx(std::exp(-0.2 * tau) + std::exp(-0.3 * tau)));
    CHECK(eval_bound(general(0.3, 0.9), tau) == doctest::Approx(std::exp(-0.7 * tau) + std::exp(-0.3 * tau)));
    CHECK(eval_bound(general(0.3, 0.7), tau) ==
          doctest::Approx(tau * std::exp(-0.7 * tau) + std::exp(-0.3 * tau)));
    CHECK(eval_bound(general(0.5, 0.2), tau) == doctest::Approx(std::exp(-0.2 * tau) + std::exp(-0.5 * tau)));
    CHECK(eval_bound(general(0.5, 0.5), tau) == doctest::Approx((1 + tau * tau) * std::exp(-0.5 * tau)));
    CHECK(eval_bound(general(0.5, 2.0), tau) == doctest::Approx(tau * std::exp(-0.5 * tau)));
}

TEST_CASE("dominant_rate examples")
{
    BoundSpec ref;
    ref.mu = 0.2;
    CHECK(dominant_rate(ref).exponent == doctest::Approx(0.2));
    CHECK_FALSE(dominant_rate(ref).log_correction);
    ref.mu = 0.5;
    CHECK(dominant_rate(ref).exponent == doctest::Approx(0.5));
    CHECK(dominant_rate(ref).log_correction);

    auto r = dominant_rate(general(0.3, 0.3));
    CHECK(r.exponent == doctest::Approx(0.3));
    CHECK(r.log_correction);
    CHECK(dominant_rate(general(0.3, 0.2)).exponent == doctest::Approx(0.2));
    CHECK(dominant_rate(general(0.3, 0.9)).exponent == doctest::Approx(0.3));
    r = dominant_rate(general(0.8, 0.1));
    CHECK(r.exponent == doctest::Approx(0.1));
    CHECK_FALSE(r.log_correction);
    r = dominant_rate(general(0.8, 0.2));
    CHECK(r.exponent == doctest::Approx(0.2));
    CHECK(r.log_correction);
    r = dominant_rate(general(0.8, 0.5));
    CHECK(r.exponent == doctest::Approx(0.2));
    r = dominant_rate(general(0.7, 0.3));
    CHECK(r.exponent == doctest::Approx(0.3));
    CHECK(r.log_correction);
}

TEST_CASE("dominant_rate is the slowest exponent of the evaluated bound")
{
    // The log-slope between two large times tends to -exponent; polynomial factors
    // contribute at most log(700^2 / 300^2) / 400.
    prop::for_all(13, 200, [](prop::Gen& g) {
        const double mu = g.uniform(0.05, 0.95);
        const double alpha = g.uniform(0.05, 1.5);
        const BoundSpec s = general(mu, alpha);
        const double measured = (std::log(eval_bound(s, 300.0)) - std::log(eval_bound(s, 700.0))) / 400.0;
        CHECK(std::abs(measured - dominant_rate(s).exponent) < 5e-3);
    });
}

TEST_CASE("bound validation")
{
    BoundSpec s;
    s.mu = 1.2;
    CHECK_THROWS_AS(eval_bound(s, 1.0), ParameterError);
    s.mu = 0.5;
    CHECK_THROWS_AS(eval_bound(s, -1.0), DomainError);
    CHECK_THROWS_AS(eval_bound(BoundSpec{Theorem::ThmGeneral, 0.3, std::nullopt}, 1.0), ParameterError);
    CHECK_THROWS_AS(theorem_from_string("Nope"), ParameterError);
    CHECK(theorem_from_string(to_string(Theorem::WtoWinf)) == Theorem::WtoWinf);
}
