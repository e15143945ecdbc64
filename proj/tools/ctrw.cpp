// Command-line entry point: individual modules as subcommands plus the figure
// recipes. Exit codes: 0 success, 2 invalid input, 3 numeric failure.

#include "ctrw/bounds.hpp"
#include "ctrw/config.hpp"
#include "ctrw/equilibria.hpp"
#include "ctrw/errors.hpp"
#include "ctrw/experiment.hpp"
#include "ctrw/fitting.hpp"
#include "ctrw/metrics.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace ctrw;
namespace fs = std::filesystem;

namespace
{

constexpr int kExitInvalid = 2;
constexpr int kExitNumeric = 3;

// Where diagnostics.json goes when a numeric failure aborts the command.
std::string g_diagnostics_dir = ".";

std::string num(double x)
{
    return fmt::format("{:.12g}", x);
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
    {
        std::cout << text;
        return;
    }
    if (fs::path(path).has_parent_path())
    {
        fs::create_directories(fs::path(path).parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ParameterError("cannot write '" + path + "'");
    }
    out << text;
}

// Flags shared by simulate, pde and sweep, applied on top of defaults.
struct RunFlags
{
    ExperimentConfig config;
    std::optional<double> t_max;
    bool no_fit = false;

    void add(CLI::App* app, bool montecarlo, bool pde)
    {
        app->add_option("--mu", config.rate.mu, "tail exponent mu in (0, 1]");
        app->add_option("--model", config.rate.kind, "reference | perturbed | custom");
        app->add_option("--alpha", config.rate.alpha, "perturbation g(a) = (1+a)^-(1+alpha)");
        app->add_option("--K", config.rate.K, "declared tail constant of the perturbation");
        app->add_option("--seed", config.seed);
        app->add_option("--tau-max", config.tau_max);
        app->add_option("--t-max", t_max, "horizon in physical time; overrides --tau-max");
        app->add_option("--dtau", config.snapshot_dtau, "snapshot spacing in tau");
        app->add_option("--initial", config.initial, "dirac | uniform");
        app->add_option("--bins", config.bins, "histogram bins / measurement cells");
        app->add_option("--entropy", config.entropy, "abs | kullback");
        app->add_flag("--no-dissipation", [this](std::int64_t) { config.dissipation = false; });
        app->add_flag("--no-fit", no_fit);
        app->add_option("--window-lo", config.fit.window_lo);
        app->add_option("--window-hi", config.fit.window_hi);
        app->add_flag("--auto-window", config.fit.auto_window);
        app->add_option("--fix-C", config.fit.fixed_C);
        app->add_option("--fix-C-if-windowed", config.fit.fixed_C_if_windowed);
        app->add_option("--H0", config.bounds.H0);
        app->add_option("--out", config.output_dir, "output directory");
        if (montecarlo)
        {
            app->add_option("--n-walkers", config.n_walkers);
            app->add_option("--replicas", config.replicas);
            app->add_flag("--histograms", config.histograms, "dump per-snapshot histograms");
            app->add_flag("--unconditional-first-jump", config.unconditional_first_jump);
        }
        if (pde)
        {
            app->add_option("--variables", config.variables, "natural | rescaled");
            app->add_option("--n-cells", config.n_cells);
        }
    }

    ExperimentConfig finish(const std::string& engine, const std::string& name)
    {
        ExperimentConfig c = config;
        c.engine = engine;
        c.name = name;
        if (t_max)
        {
            c.tau_max = std::log1p(*t_max);
        }
        if (no_fit)
        {
            c.fit.enabled = false;
        }
        if (c.rate.alpha && c.rate.kind == "reference")
        {
            c.rate.kind = "perturbed";
        }
        g_diagnostics_dir = c.output_dir;
        return c;
    }
};

void print_artifacts(const ExperimentConfig& c, const RunArtifacts& a)
{
    std::cout << fmt::format("{}: wrote {}{}\n", c.name, c.output_dir, a.resumed ? " (resumed)" : "");
    for (const auto* f : {&a.fit_montecarlo, &a.fit_pde})
    {
        if (*f)
        {
            std::cout << fmt::format("  lambda = {:.4f} +- {:.4f}, C = {:.4f}, window [{:g}, {:g}]\n", (*f)->lambda,
                                     (*f)->std_errors[0], (*f)->C, (*f)->window_lo, (*f)->window_hi);
        }
    }
}

// Per-snapshot comparison of both initial data against the reference bound
// plus the statistical floor of the histogram.
void write_fig1_check(double mu, const std::vector<ExperimentConfig>& configs, const std::vector<RunArtifacts>& runs,
                      const std::string& path)
{
    BoundSpec spec;
    spec.theorem = Theorem::ThmRef;
    spec.mu = mu;
    spec.H0 = configs.front().bounds.H0;
    const double floor = statistical_floor(configs.front().bins, configs.front().n_walkers);
    std::string text = "# schema: v1\ntau,L1_w_W_dirac,L1_w_W_uniform,bound,statistical_floor,under_bound\n";
    const auto& d = runs[0].montecarlo->rows;
    const auto& u = runs[1].montecarlo->rows;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        const double b = eval_bound(spec, d[i].tau);
        const bool ok = d[i].L1_w_W <= b + floor && u[i].L1_w_W <= b + floor;
        text += fmt::format("{},{},{},{},{},{}\n", num(d[i].tau), num(d[i].L1_w_W), num(u[i].L1_w_W), num(b), num(floor),
                            ok ? 1 : 0);
    }
    emit(path, text);
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Aging continuous-time random walks: simulation, PDE, bounds and fits"};
    app.require_subcommand(1);

    // simulate / pde
    RunFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo renewal population");
    sim_flags.add(simulate, true, false);
    RunFlags pde_flags;
    pde_flags.config.fit.enabled = true;
    auto* pde = app.add_subcommand("pde", "finite-volume solve of the age equation");
    pde_flags.add(pde, false, true);

    // equilibria dump
    auto* equilibria = app.add_subcommand("equilibria", "attractor profiles");
    equilibria->require_subcommand(1);
    auto* dump = equilibria->add_subcommand("dump", "CSV of W, W_inf (rescaled) or N, N_inf (natural)");
    RateConfig eq_rate;
    std::string eq_vars = "rescaled";
    std::vector<double> eq_times{1.0};
    int eq_points = 200;
    std::string eq_out;
    dump->add_option("--mu", eq_rate.mu);
    dump->add_option("--model", eq_rate.kind);
    dump->add_option("--alpha", eq_rate.alpha);
    dump->add_option("--variables", eq_vars, "rescaled (tau, b) | natural (t, a)");
    dump->add_option("--times", eq_times, "tau values (rescaled) or t values (natural)")->delimiter(',');
    dump->add_option("--points", eq_points, "midpoint grid size per time");
    dump->add_option("--out", eq_out, "CSV path, default stdout");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "CSV (tau, bound_value) of one bound");
    BoundSpec b_spec;
    std::string b_theorem = "ThmRef";
    double b_tau_max = 10.0;
    double b_dtau = 0.1;
    std::string b_out;
    bounds->add_option("--theorem", b_theorem, "ThmRef | ThmGeneral | WtoWinf | LowerDirac | NaturalVars | MuOne");
    bounds->add_option("--mu", b_spec.mu);
    bounds->add_option("--alpha", b_spec.alpha);
    bounds->add_option("--H0", b_spec.H0);
    bounds->add_option("--K", b_spec.K);
    bounds->add_option("--tau-max", b_tau_max);
    bounds->add_option("--dtau", b_dtau);
    bounds->add_option("--out", b_out, "CSV path, default stdout");

    // fit
    auto* fit = app.add_subcommand("fit", "fit A e^-lambda tau + B e^-(1-lambda) tau + C to a series CSV");
    std::string f_in;
    std::string f_column = "L1_w_W";
    std::string f_source = "montecarlo";
    std::optional<double> f_mu;
    std::optional<double> f_lo;
    std::optional<double> f_hi;
    bool f_auto = false;
    FitOptions f_opts;
    std::optional<double> f_fix_C_if_windowed;
    std::string f_out;
    fit->add_option("input", f_in, "series CSV")->required();
    fit->add_option("--column", f_column);
    fit->add_option("--source", f_source, "montecarlo | pde (pde pins C = 0 unless --fix-C)");
    fit->add_option("--mu", f_mu, "nominal mu; picks the lambda / 1-lambda branch");
    fit->add_option("--window-lo", f_lo);
    fit->add_option("--window-hi", f_hi);
    fit->add_flag("--auto-window", f_auto, "stop before a detected discontinuity");
    fit->add_option("--fix-C", f_opts.fixed_C);
    fit->add_option("--fix-C-if-windowed", f_fix_C_if_windowed);
    fit->add_option("--fix-lambda", f_opts.fixed_lambda);
    fit->add_option("--out", f_out, "JSON path, default stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "fitted lambda across mu");
    RunFlags sw_flags;
    sw_flags.config = fig3_base("out");
    sw_flags.config.output_dir = "out/sweep";
    std::vector<double> sw_mus = fig3_mus();
    std::string sw_engine = "montecarlo";
    sw_flags.add(sweep, true, true);
    sweep->add_option("--mus", sw_mus)->delimiter(',');
    sweep->add_option("--engine", sw_engine, "montecarlo | pde");

    // run
    auto* run = app.add_subcommand("run", "configuration file or figure recipe");
    std::string run_config;
    std::string run_out = "out";
    double fig_mu = 0.4;
    run->add_option("--config", run_config, "JSON experiment configuration");
    run->add_option("--out", run_out, "root directory for figure recipes");
    auto* fig1 = run->add_subcommand("fig1", "bound check for Dirac and uniform data");
    fig1->add_option("--mu", fig_mu);
    auto* fig2 = run->add_subcommand("fig2", "fits at mu = 0.9, 0.5, 0.2");
    auto* fig3 = run->add_subcommand("fig3", "sweep over mu = 0.1 .. 0.9");
    auto* fig4 = run->add_subcommand("fig4", "three-way distances");
    double fig4_mu = 0.9;
    fig4->add_option("--mu", fig4_mu);
    run->require_subcommand(0, 1);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    if (*simulate)
    {
        const ExperimentConfig c = sim_flags.finish("montecarlo", "simulate");
        print_artifacts(c, run_experiment(c));
    }
    else if (*pde)
    {
        const ExperimentConfig c = pde_flags.finish("pde", "pde");
        print_artifacts(c, run_experiment(c));
    }
    else if (*dump)
    {
        if (eq_rate.alpha && eq_rate.kind == "reference")
        {
            eq_rate.kind = "perturbed";
        }
        if (eq_points < 1)
        {
            throw ParameterError("--points must be >= 1");
        }
        const EquilibriumHandle h(eq_rate.build());
        const bool limit = h.mu() < 1.0;
        const double nan = std::nan("");
        std::string text;
        if (eq_vars == "rescaled")
        {
            text = "# schema: v1\ntau,b,W,W_inf\n";
            for (double tau : eq_times)
            {
                for (int i = 0; i < eq_points; ++i)
                {
                    const double b = (i + 0.5) / eq_points;
                    text += fmt::format("{},{},{},{}\n", num(tau), num(b), num(h.pseudo_equilibrium(tau, b)),
                                        num(limit ? h.w_infinity(b) : nan));
                }
            }
        }
        else if (eq_vars == "natural")
        {
            text = "# schema: v1\nt,a,N,N_inf\n";
            for (double t : eq_times)
            {
                for (int i = 0; i < eq_points; ++i)
                {
                    const double a = (i + 0.5) / eq_points * (1.0 + t);
                    const auto [n, n_inf] = h.natural_profiles(t, a);
                    text += fmt::format("{},{},{},{}\n", num(t), num(a), num(n), num(limit ? n_inf : nan));
                }
            }
        }
        else
        {
            throw ParameterError("--variables must be rescaled or natural");
        }
        emit(eq_out, text);
    }
    else if (*bounds)
    {
        b_spec.theorem = theorem_from_string(b_theorem);
        b_spec.validate();
        std::string text = "# schema: v1\ntau,bound_value\n";
        for (double tau : snapshot_times(b_tau_max, b_dtau))
        {
            text += fmt::format("{},{}\n", num(tau), num(eval_bound(b_spec, tau)));
        }
        emit(b_out, text);
    }
    else if (*fit)
    {
        const Series s = read_series_csv(f_in);
        DecaySeries d;
        d.tau = s.taus();
        d.value = s.column(f_column);
        d.source = series_source_from_string(f_source);
        if (f_mu)
        {
            d.mu_nominal = *f_mu;
        }
        double lo = f_lo.value_or(d.tau.front());
        double hi = f_hi.value_or(d.tau.back());
        bool windowed = false;
        if (!f_hi && f_auto)
        {
            const auto w = propose_window(d);
            windowed = w.second < hi;
            hi = std::min(hi, w.second);
        }
        d.fit_window = std::make_pair(lo, hi);
        if (windowed && !f_opts.fixed_C && f_fix_C_if_windowed)
        {
            f_opts.fixed_C = f_fix_C_if_windowed;
        }
        const FitResult r = fit_decay(d, f_opts);
        emit(f_out, fit_to_json(r, d.mu_nominal, f_source));
    }
    else if (*sweep)
    {
        const ExperimentConfig base = sw_flags.finish(sw_engine, "sweep");
        const auto points = sweep_mu(sw_mus, base, series_source_from_string(sw_engine));
        const std::string path = (fs::path(base.output_dir) / "sweep.csv").string();
        write_sweep_csv(path, points);
        for (const auto& p : points)
        {
            std::cout << (p.fit ? fmt::format("mu = {:.2f}: lambda = {:.4f} +- {:.4f}\n", p.mu, p.fit->lambda,
                                              p.fit->std_errors[0])
                                : fmt::format("mu = {:.2f}: failed: {}\n", p.mu, p.error));
        }
        std::cout << "wrote " << path << "\n";
    }
    else if (*run)
    {
        g_diagnostics_dir = run_out;
        if (*fig1)
        {
            const auto configs = fig1_configs(fig_mu, run_out);
            std::vector<RunArtifacts> runs;
            for (const auto& c : configs)
            {
                runs.push_back(run_experiment(c));
                print_artifacts(c, runs.back());
            }
            const auto path = fs::path(configs.front().output_dir).parent_path() / "check.csv";
            write_fig1_check(fig_mu, configs, runs, path.string());
            std::cout << "wrote " << path.string() << "\n";
        }
        else if (*fig2)
        {
            for (const auto& c : fig2_configs(run_out))
            {
                print_artifacts(c, run_experiment(c));
            }
        }
        else if (*fig3)
        {
            const ExperimentConfig base = fig3_base(run_out);
            const auto points = sweep_mu(fig3_mus(), base);
            const std::string path = (fs::path(base.output_dir) / "sweep.csv").string();
            write_sweep_csv(path, points);
            std::cout << "wrote " << path << "\n";
        }
        else if (*fig4)
        {
            const ExperimentConfig c = fig4_config(fig4_mu, run_out);
            print_artifacts(c, run_experiment(c));
        }
        else if (!run_config.empty())
        {
            const ExperimentConfig c = load_config(run_config);
            g_diagnostics_dir = c.output_dir;
            print_artifacts(c, run_experiment(c));
        }
        else
        {
            throw ParameterError("run needs --config FILE or a recipe (fig1 .. fig4)");
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try
    {
        return run_cli(argc, argv);
    }
    catch (const ValidationError& e)
    {
        std::cerr << e.what() << "\n";
        return kExitInvalid;
    }
    catch (const NumericError& e)
    {
        std::cerr << "numeric failure: " << e.what() << "\n";
        nlohmann::json diag{{"error", e.what()}, {"best_estimate", e.best_estimate()}, {"error_bound", e.error_bound()}};
        try
        {
            fs::create_directories(g_diagnostics_dir);
            std::ofstream(fs::path(g_diagnostics_dir) / "diagnostics.json") << diag.dump(2) << "\n";
        }
        catch (const std::exception&)
        {
        }
        return kExitNumeric;
    }
    catch (const ParameterError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    catch (const DomainError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
