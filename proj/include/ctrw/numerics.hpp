#pragma once

#include <array>
#include <cstdint>
#include <functional>

namespace ctrw::numerics
{

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Describes the endpoint behaviour of an integrand on (0,1): near 0 it grows
/// like x^left_exponent, near 1 like (1-x)^right_exponent. Both exponents must
/// lie in (-1, 0] so that the integral exists.
struct SingularQuadratureSpec
{
    double left_exponent = 0.0;
    double right_exponent = 0.0;
    double abs_tol = 1e-12;
    int max_subdivisions = 4000;

    void validate() const;
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

/// Integrand that receives both x and 1-x. The complement is produced by the
/// change of variables itself, so it stays accurate when x is within a few ulp
/// of 1 (where (1-x)^(mu-1) carries a non-negligible share of the mass).
using EndpointFunction = std::function<double(double x, double one_minus_x)>;
using ScalarFunction = std::function<double(double)>;

/// Integral over (0,1). The interval is split at 1/2; on the left half
/// x = v^p / 2 with p = 1/(1+left_exponent), mirrored on the right half, and
/// each half is integrated by globally adaptive Gauss-Kronrod (7/15) panels.
/// Throws NumericError if abs_tol is not met within max_subdivisions.
QuadratureResult integrate_singular_detailed(const EndpointFunction& f, const SingularQuadratureSpec& spec);
double integrate_singular(const EndpointFunction& f, const SingularQuadratureSpec& spec);
double integrate_singular(const ScalarFunction& f, const SingularQuadratureSpec& spec);

/// Same as integrate_singular but over [lo, hi] with 0 <= lo < hi <= 1; the
/// integrand still receives (x, 1-x) in absolute coordinates.
double integrate_interval(const EndpointFunction& f, double lo, double hi, const SingularQuadratureSpec& spec);

/// Plain adaptive Gauss-Kronrod on a finite interval [lo, hi].
QuadratureResult integrate_adaptive(const ScalarFunction& f, double lo, double hi, double abs_tol,
                                    int max_subdivisions = 4000);

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Brent's method (bisection safeguarding secant / inverse quadratic steps).
/// Requires f(lo) * f(hi) <= 0; returns x whose bracket has width <= tol.
double find_root(const ScalarFunction& f, double lo, double hi, double tol);

// ---------------------------------------------------------------------------
// Counter-based random source
// ---------------------------------------------------------------------------

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Maps (seed, stream, counter) to a uniform double in the open interval
/// (0,1). Pure function: the same triple always yields the same value.
double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

/// Value-like cursor over one stream. Copies advance independently.
class RandomStream
{
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0)
        : seed_(seed), stream_(stream), counter_(counter)
    {
    }

    double uniform() { return uniform_at(seed_, stream_, counter_++); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
};

/// Stream index for walker `walker` of replica `replica`.
constexpr std::uint64_t walker_stream(std::uint64_t replica, std::uint64_t walker)
{
    return (replica << 32) | (walker & 0xffffffffULL);
}

} // namespace ctrw::numerics
