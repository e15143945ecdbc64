#include "ctrw/fitting.hpp"

#include "ctrw/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace ctrw
{

std::string to_string(SeriesSource source)
{
    return source == SeriesSource::MonteCarlo ? "montecarlo" : "pde";
}

SeriesSource series_source_from_string(const std::string& name)
{
    if (name == "montecarlo")
    {
        return SeriesSource::MonteCarlo;
    }
    if (name == "pde")
    {
        return SeriesSource::Pde;
    }
    throw ParameterError("unknown series source '" + name + "' (expected montecarlo|pde)");
}

void DecaySeries::validate() const
{
    if (tau.size() != value.size())
    {
        throw ParameterError("DecaySeries: tau and value differ in length");
    }
    for (std::size_t i = 0; i < tau.size(); ++i)
    {
        if (!std::isfinite(tau[i]) || !std::isfinite(value[i]) || value[i] < 0.0)
        {
            throw ParameterError("DecaySeries: samples must be finite with non-negative values");
        }
        if (i > 0 && !(tau[i] > tau[i - 1]))
        {
            throw ParameterError("DecaySeries: tau must be strictly increasing");
        }
    }
    if (fit_window && !(fit_window->first < fit_window->second))
    {
        throw ParameterError("DecaySeries: empty fit window");
    }
}

double FitResult::evaluate(double tau) const
{
    return A * std::exp(-lambda * tau) + B * std::exp(-(1.0 - lambda) * tau) + C;
}

namespace
{

constexpr double kLambdaMin = 1e-9;
constexpr double kLambdaMax = 1.0 - 1e-9;

struct Problem
{
    Eigen::VectorXd t;
    Eigen::VectorXd y;
    bool fit_lambda = true;
    double lambda_fixed = 0.0;
    bool fit_C = true;
    double C_fixed = 0.0;

    int n_free() const { return (fit_lambda ? 1 : 0) + 2 + (fit_C ? 1 : 0); }
};

struct Params
{
    double lambda = 0.5;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

Eigen::VectorXd residuals(const Problem& p, const Params& q)
{
    Eigen::VectorXd r(p.t.size());
    for (Eigen::Index i = 0; i < p.t.size(); ++i)
    {
        r[i] = q.A * std::exp(-q.lambda * p.t[i]) + q.B * std::exp(-(1.0 - q.lambda) * p.t[i]) + q.C - p.y[i];
    }
    return r;
}

Eigen::MatrixXd jacobian(const Problem& p, const Params& q)
{
    Eigen::MatrixXd J(p.t.size(), p.n_free());
    for (Eigen::Index i = 0; i < p.t.size(); ++i)
    {
        const double ea = std::exp(-q.lambda * p.t[i]);
        const double eb = std::exp(-(1.0 - q.lambda) * p.t[i]);
        int c = 0;
        if (p.fit_lambda)
        {
            J(i, c++) = p.t[i] * (q.B * eb - q.A * ea);
        }
        J(i, c++) = ea;
        J(i, c++) = eb;
        if (p.fit_C)
        {
            J(i, c++) = 1.0;
        }
    }
    return J;
}

Params apply_step(const Problem& p, const Params& q, const Eigen::VectorXd& step)
{
    Params out = q;
    int c = 0;
    if (p.fit_lambda)
    {
        out.lambda = std::clamp(q.lambda + step[c++], kLambdaMin, kLambdaMax);
    }
    out.A += step[c++];
    out.B += step[c++];
    if (p.fit_C)
    {
        out.C += step[c++];
    }
    return out;
}

// Exact linear least squares for (A, B[, C]) at fixed lambda.
Params solve_linear(const Problem& p, double lambda, double* sse)
{
    const int cols = p.fit_C ? 3 : 2;
    Eigen::MatrixXd M(p.t.size(), cols);
    Eigen::VectorXd rhs = p.y;
    for (Eigen::Index i = 0; i < p.t.size(); ++i)
    {
        M(i, 0) = std::exp(-lambda * p.t[i]);
        M(i, 1) = std::exp(-(1.0 - lambda) * p.t[i]);
        if (p.fit_C)
        {
            M(i, 2) = 1.0;
        }
        else
        {
            rhs[i] -= p.C_fixed;
        }
    }
    const Eigen::VectorXd x = M.completeOrthogonalDecomposition().solve(rhs);
    Params q;
    q.lambda = lambda;
    q.A = x[0];
    q.B = x[1];
    q.C = p.fit_C ? x[2] : p.C_fixed;
    if (sse)
    {
        *sse = (M * x - rhs).squaredNorm();
    }
    return q;
}

double profile_sse(const Problem& p, double lambda)
{
    double sse = 0.0;
    solve_linear(p, lambda, &sse);
    return sse;
}

// Golden-section search of the variable-projection objective on [lo, hi].
double minimise_lambda(const Problem& p, double lo, double hi)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = profile_sse(p, x1);
    double f2 = profile_sse(p, x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it)
    {
        if (f1 < f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = profile_sse(p, x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = profile_sse(p, x2);
        }
    }
    return 0.5 * (lo + hi);
}

struct Refined
{
    Params params;
    double sse = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
};

// Levenberg-Marquardt damped Gauss-Newton on all free parameters.
Refined refine(const Problem& p, Params q, double gradient_tolerance, int max_iterations)
{
    double nu = 1e-3;
    Eigen::VectorXd r = residuals(p, q);
    double sse = r.squaredNorm();
    Refined out;
    for (int it = 0; it < max_iterations; ++it)
    {
        const Eigen::MatrixXd J = jacobian(p, q);
        const Eigen::VectorXd grad = J.transpose() * r;
        out.gradient_norm = grad.lpNorm<Eigen::Infinity>();
        if (out.gradient_norm < gradient_tolerance)
        {
            out.converged = true;
            break;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        bool improved = false;
        for (int attempt = 0; attempt < 40; ++attempt)
        {
            Eigen::MatrixXd damped = JtJ;
            for (Eigen::Index k = 0; k < damped.rows(); ++k)
            {
                damped(k, k) += nu * std::max(JtJ(k, k), 1e-300);
            }
            const Eigen::VectorXd step = damped.ldlt().solve(-grad);
            const Params trial = apply_step(p, q, step);
            const Eigen::VectorXd r_trial = residuals(p, trial);
            const double sse_trial = r_trial.squaredNorm();
            if (std::isfinite(sse_trial) && sse_trial <= sse)
            {
                const bool stalled = sse - sse_trial <= 1e-15 * sse;
                q = trial;
                r = r_trial;
                sse = sse_trial;
                nu = std::max(nu / 3.0, 1e-12);
                improved = !stalled;
                break;
            }
            nu *= 4.0;
        }
        if (!improved)
        {
            // No representable decrease left: we are at the minimum to machine precision.
            const Eigen::VectorXd g = jacobian(p, q).transpose() * r;
            out.gradient_norm = g.lpNorm<Eigen::Infinity>();
            out.converged = true;
            break;
        }
    }
    out.params = q;
    out.sse = sse;
    return out;
}

} // namespace

FitResult fit_decay(const DecaySeries& series, const FitOptions& options)
{
    series.validate();
    const double lo = series.fit_window ? series.fit_window->first : -std::numeric_limits<double>::infinity();
    const double hi = series.fit_window ? series.fit_window->second : std::numeric_limits<double>::infinity();

    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t i = 0; i < series.tau.size(); ++i)
    {
        if (series.tau[i] >= lo && series.tau[i] <= hi)
        {
            ts.push_back(series.tau[i]);
            ys.push_back(series.value[i]);
        }
    }
    if (ts.size() < 8)
    {
        throw ParameterError("fit_decay needs at least 8 points in the fit window");
    }

    Problem p;
    p.t = Eigen::Map<Eigen::VectorXd>(ts.data(), Eigen::Index(ts.size()));
    p.y = Eigen::Map<Eigen::VectorXd>(ys.data(), Eigen::Index(ys.size()));
    if (options.fixed_C)
    {
        p.fit_C = false;
        p.C_fixed = *options.fixed_C;
    }
    else if (series.source == SeriesSource::Pde && !options.fit_C_for_pde)
    {
        p.fit_C = false;
        p.C_fixed = 0.0;
    }
    if (options.fixed_lambda)
    {
        if (!(*options.fixed_lambda > 0.0 && *options.fixed_lambda < 1.0))
        {
            throw ParameterError("fixed lambda must lie in (0, 1)");
        }
        p.fit_lambda = false;
        p.lambda_fixed = *options.fixed_lambda;
    }
    if (!(options.lambda_grid_step > 0.0 && options.lambda_grid_step < 0.5))
    {
        throw ParameterError("lambda grid step must lie in (0, 0.5)");
    }

    Refined best;
    best.sse = std::numeric_limits<double>::infinity();
    if (!p.fit_lambda)
    {
        best = refine(p, solve_linear(p, p.lambda_fixed, nullptr), options.gradient_tolerance, options.max_iterations);
    }
    else
    {
        // Grid of cell midpoints, so lambda = 1/2 (collinear basis) is never a node.
        const double step = options.lambda_grid_step;
        std::vector<double> grid;
        for (double l = 0.5 * step; l < 1.0; l += step)
        {
            grid.push_back(l);
        }
        std::vector<double> sse(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
        {
            sse[k] = profile_sse(p, grid[k]);
        }
        std::vector<std::size_t> minima;
        for (std::size_t k = 0; k < grid.size(); ++k)
        {
            const bool left_ok = k == 0 || sse[k] <= sse[k - 1];
            const bool right_ok = k + 1 == grid.size() || sse[k] <= sse[k + 1];
            if (left_ok && right_ok)
            {
                minima.push_back(k);
            }
        }
        std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return sse[a] < sse[b]; });
        if (minima.size() > 4)
        {
            minima.resize(4);
        }
        for (std::size_t k : minima)
        {
            const double a = k == 0 ? kLambdaMin : grid[k - 1];
            const double b = k + 1 == grid.size() ? kLambdaMax : grid[k + 1];
            const double lambda = minimise_lambda(p, a, b);
            const Refined r =
                refine(p, solve_linear(p, lambda, nullptr), options.gradient_tolerance, options.max_iterations);
            if (r.sse < best.sse)
            {
                best = r;
            }
        }
    }

    FitResult out;
    out.lambda = best.params.lambda;
    out.A = best.params.A;
    out.B = best.params.B;
    out.C = best.params.C;
    out.gradient_norm = best.gradient_norm;
    out.converged = best.converged;
    out.n_points = static_cast<int>(ts.size());
    out.window_lo = ts.front();
    out.window_hi = ts.back();
    out.residual_rms = std::sqrt(best.sse / double(ts.size()));
    if (!p.fit_lambda)
    {
        out.fixed_params.push_back("lambda");
    }
    if (!p.fit_C)
    {
        out.fixed_params.push_back("C");
    }

    // Covariance s^2 (J^T J)^-1 through the SVD of J; singular values are
    // floored so that an unidentifiable direction yields large, finite errors.
    const Eigen::MatrixXd J = jacobian(p, best.params);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double s_max = sv.size() ? sv[0] : 0.0;
    const double s_min = sv.size() ? sv[sv.size() - 1] : 0.0;
    const int dof = out.n_points - p.n_free();
    const double s2 = dof > 0 ? best.sse / dof : 0.0;
    Eigen::VectorXd inv_sq(sv.size());
    for (Eigen::Index k = 0; k < sv.size(); ++k)
    {
        const double s = std::max(sv[k], 1e-12 * s_max);
        inv_sq[k] = 1.0 / (s * s);
    }
    const Eigen::MatrixXd V = svd.matrixV();
    const Eigen::MatrixXd cov = s2 * V * inv_sq.asDiagonal() * V.transpose();
    int c = 0;
    if (p.fit_lambda)
    {
        out.std_errors[0] = std::sqrt(cov(c, c));
        ++c;
    }
    out.std_errors[1] = std::sqrt(cov(c, c));
    out.std_errors[2] = std::sqrt(cov(c + 1, c + 1));
    if (p.fit_C)
    {
        out.std_errors[3] = std::sqrt(cov(c + 2, c + 2));
    }
    out.degenerate = std::abs(1.0 - 2.0 * out.lambda) < 0.1 || !(s_min > 1e-8 * s_max);

    // f is invariant under lambda <-> 1 - lambda with A <-> B.
    const bool have_nominal = std::isfinite(series.mu_nominal);
    const bool swap = have_nominal ? std::abs(1.0 - out.lambda - series.mu_nominal) <
                                         std::abs(out.lambda - series.mu_nominal)
                                   : out.lambda > 0.5;
    if (swap && p.fit_lambda)
    {
        out.lambda = 1.0 - out.lambda;
        std::swap(out.A, out.B);
        std::swap(out.std_errors[1], out.std_errors[2]);
    }
    return out;
}

namespace
{

std::pair<std::vector<double>, std::vector<double>> windowed(const DecaySeries& series)
{
    series.validate();
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t i = 0; i < series.tau.size(); ++i)
    {
        if (!series.fit_window ||
            (series.tau[i] >= series.fit_window->first && series.tau[i] <= series.fit_window->second))
        {
            ts.push_back(series.tau[i]);
            ys.push_back(series.value[i]);
        }
    }
    return {ts, ys};
}

} // namespace

RateFit fit_exponential_rate(const DecaySeries& series)
{
    auto [ts, ys] = windowed(series);
    const std::size_t n = ts.size();
    if (n < 3)
    {
        throw ParameterError("fit_exponential_rate needs at least 3 points in the fit window");
    }
    double mt = 0.0;
    double ml = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!(ys[i] > 0.0))
        {
            throw DomainError("fit_exponential_rate needs positive values");
        }
        mt += ts[i] / n;
        ml += std::log(ys[i]) / n;
    }
    double stt = 0.0;
    double stl = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        stt += (ts[i] - mt) * (ts[i] - mt);
        stl += (ts[i] - mt) * (std::log(ys[i]) - ml);
    }
    RateFit out;
    const double slope = stl / stt;
    out.exponent = -slope;
    out.intercept = ml - slope * mt;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double r = std::log(ys[i]) - (out.intercept + slope * ts[i]);
        sse += r * r;
    }
    out.residual_rms = std::sqrt(sse / n);
    out.std_error = std::sqrt(sse / double(n - 2) / stt);
    out.window_lo = ts.front();
    out.window_hi = ts.back();
    out.n_points = static_cast<int>(n);
    return out;
}

AlgebraicFit fit_inverse_linear(const DecaySeries& series)
{
    auto [ts, ys] = windowed(series);
    if (ts.empty())
    {
        throw ParameterError("fit_inverse_linear: empty fit window");
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
    {
        const double x = 1.0 / (1.0 + ts[i]);
        sxy += x * ys[i];
        sxx += x * x;
    }
    AlgebraicFit out;
    out.K = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
    {
        const double r = ys[i] - out.K / (1.0 + ts[i]);
        sse += r * r;
    }
    out.residual_rms = std::sqrt(sse / ts.size());
    out.n_points = static_cast<int>(ts.size());
    return out;
}

std::optional<std::size_t> detect_discontinuity(const DecaySeries& series, double factor, std::size_t min_history)
{
    series.validate();
    const auto& v = series.value;
    if (v.size() < min_history + 3)
    {
        return std::nullopt;
    }
    std::vector<double> d2(v.size(), 0.0);
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
    {
        d2[i] = std::abs(v[i + 1] - 2.0 * v[i] + v[i - 1]);
    }
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    // Jumps below 3% of the series range are bin-crossing texture or noise,
    // not the never-jumped cohort entering the last bin.
    const double min_jump = 0.03 * (*hi_it - *lo_it);
    for (std::size_t i = min_history + 1; i + 1 < v.size(); ++i)
    {
        std::vector<double> history(d2.begin() + std::ptrdiff_t(i - min_history), d2.begin() + std::ptrdiff_t(i));
        std::nth_element(history.begin(), history.begin() + std::ptrdiff_t(history.size() / 2), history.end());
        // Robust standard deviation of the recent second differences; the bare
        // median sits near 0.67 sigma and lets Monte-Carlo noise trip the test.
        const double local = 1.4826 * history[history.size() / 2];
        if (d2[i] > factor * local && d2[i] > min_jump)
        {
            return i + 1;
        }
    }
    return std::nullopt;
}

std::pair<double, double> propose_window(const DecaySeries& series, double factor)
{
    series.validate();
    if (series.tau.empty())
    {
        throw ParameterError("propose_window: empty series");
    }
    const auto jump = detect_discontinuity(series, factor);
    if (!jump)
    {
        return {series.tau.front(), series.tau.back()};
    }
    return {series.tau.front(), series.tau[*jump - 1]};
}

} // namespace ctrw
