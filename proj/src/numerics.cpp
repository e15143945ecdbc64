#include "ctrw/numerics.hpp"

#include "ctrw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace ctrw::numerics
{

namespace
{

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel
{
    double lo;
    double hi;
    double value;
    double error;
    double resabs;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const ScalarFunction& f, double lo, double hi)
{
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<double, 15> fv{};
    fv[7] = f(center);
    for (int j = 0; j < 7; ++j)
    {
        const double dx = half * kXgk[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }

    double kronrod = kWgk[7] * fv[7];
    double gauss = kWg[3] * fv[7];
    double resabs = std::abs(kronrod);
    for (int j = 0; j < 7; ++j)
    {
        const double pair = fv[j] + fv[14 - j];
        kronrod += kWgk[j] * pair;
        resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1)
        {
            gauss += kWg[j / 2] * pair;
        }
    }
    const double mean = 0.5 * kronrod;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j)
    {
        resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    }

    const double value = kronrod * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && error != 0.0)
    {
        error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    {
        error = std::max(50.0 * eps * resabs, error);
    }
    return {lo, hi, value, error, resabs};
}

double substituted_half(const EndpointFunction& f, double exponent, bool left_half, double abs_tol,
                        int max_subdivisions, int& subdivisions, double& error_out)
{
    const double power = 1.0 / (1.0 + exponent);
    ScalarFunction g = [&](double v) {
        // near = distance from the singular endpoint
        const double near = 0.5 * std::pow(v, power);
        if (near <= 0.0)
        {
            return 0.0; // underflow: the panel has zero width in x
        }
        const double jacobian = 0.5 * power * std::pow(v, power - 1.0);
        const double far = 1.0 - near;
        return left_half ? f(near, far) * jacobian : f(far, near) * jacobian;
    };
    const QuadratureResult r = integrate_adaptive(g, 0.0, 1.0, abs_tol, max_subdivisions);
    subdivisions += r.subdivisions;
    error_out += r.error;
    return r.value;
}

} // namespace

void SingularQuadratureSpec::validate() const
{
    if (!(left_exponent > -1.0 && left_exponent <= 0.0) || !(right_exponent > -1.0 && right_exponent <= 0.0))
    {
        throw ParameterError("singular quadrature exponents must lie in (-1, 0]");
    }
    if (!(abs_tol > 0.0))
    {
        throw ParameterError("singular quadrature tolerance must be positive");
    }
    if (max_subdivisions < 1)
    {
        throw ParameterError("max_subdivisions must be positive");
    }
}

QuadratureResult integrate_adaptive(const ScalarFunction& f, double lo, double hi, double abs_tol,
                                    int max_subdivisions)
{
    std::priority_queue<Panel> panels;
    Panel first = gauss_kronrod_15(f, lo, hi);
    double total = first.value;
    double total_error = first.error;
    double total_resabs = first.resabs;
    panels.push(first);
    int subdivisions = 0;
    constexpr double roundoff = 1e3 * std::numeric_limits<double>::epsilon();

    while (total_error > std::max(abs_tol, roundoff * total_resabs))
    {
        if (subdivisions >= max_subdivisions)
        {
            std::ostringstream msg;
            msg << "adaptive quadrature did not reach tolerance " << abs_tol << " after " << subdivisions
                << " subdivisions (estimate " << total << ", error " << total_error << ")";
            throw NumericError(msg.str(), total, total_error);
        }
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi))
        {
            std::ostringstream msg;
            msg << "adaptive quadrature exhausted floating-point resolution (estimate " << total << ", error "
                << total_error << ")";
            throw NumericError(msg.str(), total, total_error);
        }
        panels.pop();
        const Panel left = gauss_kronrod_15(f, worst.lo, mid);
        const Panel right = gauss_kronrod_15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        panels.push(left);
        panels.push(right);
        ++subdivisions;

        // refresh the running sums now and then so cancellation does not drift
        if (subdivisions % 64 == 0)
        {
            auto copy = panels;
            total = 0.0;
            total_error = 0.0;
            total_resabs = 0.0;
            while (!copy.empty())
            {
                total += copy.top().value;
                total_error += copy.top().error;
                total_resabs += copy.top().resabs;
                copy.pop();
            }
        }
    }

    double sum = 0.0;
    double err = 0.0;
    while (!panels.empty())
    {
        sum += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    if (!std::isfinite(sum))
    {
        throw NumericError("adaptive quadrature produced a non-finite value", sum, err);
    }
    return {sum, err, subdivisions};
}

QuadratureResult integrate_singular_detailed(const EndpointFunction& f, const SingularQuadratureSpec& spec)
{
    spec.validate();
    QuadratureResult result;
    double left = 0.0;
    double right = 0.0;
    try
    {
        left = substituted_half(f, spec.left_exponent, true, 0.5 * spec.abs_tol, spec.max_subdivisions,
                                result.subdivisions, result.error);
        right = substituted_half(f, spec.right_exponent, false, 0.5 * spec.abs_tol, spec.max_subdivisions,
                                 result.subdivisions, result.error);
    }
    catch (const NumericError& e)
    {
        throw NumericError(e.what(), left + right + e.best_estimate(), result.error + e.error_bound());
    }
    result.value = left + right;
    return result;
}

double integrate_singular(const EndpointFunction& f, const SingularQuadratureSpec& spec)
{
    return integrate_singular_detailed(f, spec).value;
}

double integrate_singular(const ScalarFunction& f, const SingularQuadratureSpec& spec)
{
    return integrate_singular_detailed([&](double x, double) { return f(x); }, spec).value;
}

double integrate_interval(const EndpointFunction& f, double lo, double hi, const SingularQuadratureSpec& spec)
{
    if (!(lo >= 0.0 && hi <= 1.0 && lo < hi))
    {
        throw ParameterError("integrate_interval requires 0 <= lo < hi <= 1");
    }
    const double width = hi - lo;
    const double tail = 1.0 - hi;
    SingularQuadratureSpec scaled = spec;
    scaled.abs_tol = spec.abs_tol / width;
    const double inner = integrate_singular(
        [&](double s, double sc) { return f(lo + width * s, tail + width * sc); }, scaled);
    return width * inner;
}

double find_root(const ScalarFunction& f, double lo, double hi, double tol)
{
    double a = lo;
    double b = hi;
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0)
    {
        return a;
    }
    if (fb == 0.0)
    {
        return b;
    }
    if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0.0) == (fb > 0.0))
    {
        std::ostringstream msg;
        msg << "find_root: no sign change on [" << lo << ", " << hi << "] (f = " << fa << ", " << fb << ")";
        throw ParameterError(msg.str());
    }

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int iter = 0; iter < 500; ++iter)
    {
        if ((fb > 0.0) == (fc > 0.0))
        {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb))
        {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.25 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0)
        {
            return b;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb))
        {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c)
            {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            }
            else
            {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
            {
                q = -q;
            }
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q)))
            {
                e = d;
                d = p / q;
            }
            else
            {
                d = xm;
                e = d;
            }
        }
        else
        {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key)
{
    constexpr std::uint64_t m0 = 0xD2511F53ULL;
    constexpr std::uint64_t m1 = 0xCD9E8D57ULL;
    constexpr std::uint32_t w0 = 0x9E3779B9U;
    constexpr std::uint32_t w1 = 0xBB67AE85U;
    for (int round = 0; round < 10; ++round)
    {
        const std::uint64_t p0 = m0 * ctr[0];
        const std::uint64_t p1 = m1 * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

double uniform_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
{
    const auto out = philox4x32({static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                                 static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                                {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace ctrw::numerics
