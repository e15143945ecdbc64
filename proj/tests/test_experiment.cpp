#include "ctrw/errors.hpp"
#include "ctrw/experiment.hpp"
#include "property.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>

using namespace ctrw;
namespace fs = std::filesystem;

namespace
{

fs::path fresh_dir(const std::string& leaf)
{
    const auto dir = fs::temp_directory_path() / "ctrw_experiment_tests" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small(const std::string& leaf)
{
    ExperimentConfig c;
    c.name = leaf;
    c.rate.mu = 0.6;
    c.n_walkers = 3000;
    c.n_cells = 256;
    c.bins = 64;
    c.tau_max = 3.0;
    c.snapshot_dtau = 0.25;
    c.output_dir = fresh_dir(leaf).string();
    return c;
}

} // namespace

TEST_CASE("experiment: snapshot times include both endpoints")
{
    const auto t = snapshot_times(1.0, 0.1);
    REQUIRE(t.size() == 11);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(snapshot_times(0.95, 0.1).size() == 10);
    CHECK_THROWS_AS(snapshot_times(1.0, 0.0), ParameterError);
}

TEST_CASE("experiment: Monte-Carlo series schema and sanity")
{
    ExperimentConfig c = small("mc_schema");
    const Series s = run_montecarlo(c, 0);
    REQUIRE(s.rows.size() == 13);
    for (const auto& r : s.rows)
    {
        CHECK(r.t == doctest::Approx(std::expm1(r.tau)));
        CHECK(r.L1_w_W >= 0.0);
        CHECK(r.L1_w_W <= 2.0 + 1e-12);
        CHECK(r.never_jumped_fraction == doctest::Approx(std::pow(1 + r.t, -0.6)).epsilon(0.05));
        CHECK(std::isfinite(r.DH));
        CHECK(r.entropy_kind == "abs");
        // abs entropy is the L1 distance to W.
        CHECK(r.entropy_value == doctest::Approx(r.L1_w_W).epsilon(1e-12));
    }
    CHECK(s.rows.back().L1_w_W < s.rows.front().L1_w_W);
}

TEST_CASE("experiment: replicas are deterministic and averaged column-wise")
{
    ExperimentConfig c = small("mc_avg");
    c.replicas = 3;
    const Series a = run_montecarlo_averaged(c);
    const Series b = run_montecarlo_averaged(c);
    std::vector<Series> reps;
    for (std::uint64_t r = 0; r < 3; ++r)
    {
        reps.push_back(run_montecarlo(c, r));
    }
    for (std::size_t i = 0; i < a.rows.size(); ++i)
    {
        CHECK(a.rows[i].L1_w_W == b.rows[i].L1_w_W);
        const double mean = (reps[0].rows[i].L1_w_W + reps[1].rows[i].L1_w_W + reps[2].rows[i].L1_w_W) / 3;
        CHECK(a.rows[i].L1_w_W == doctest::Approx(mean).epsilon(1e-14));
    }
    CHECK(reps[0].rows[4].L1_w_W != reps[1].rows[4].L1_w_W);
}

TEST_CASE("experiment: PDE series in both variables agree")
{
    ExperimentConfig c = small("pde_vars");
    c.engine = "pde";
    c.n_cells = 512;
    c.bins = 64;
    const Series rescaled = run_pde(c);
    c.variables = "natural";
    c.n_cells = 8192;
    const Series natural = run_pde(c);
    REQUIRE(rescaled.rows.size() == natural.rows.size());
    for (std::size_t i = 2; i < rescaled.rows.size(); ++i)
    {
        CAPTURE(rescaled.rows[i].tau);
        CHECK(std::isnan(rescaled.rows[i].never_jumped_fraction));
        CHECK(std::abs(rescaled.rows[i].L1_w_W - natural.rows[i].L1_w_W) < 0.1);
    }
}

TEST_CASE("experiment: series CSV round trip keeps values and NaNs")
{
    prop::for_all(77, 10, [](prop::Gen& g) {
        Series s;
        for (int i = 0; i < 5; ++i)
        {
            SeriesRow r;
            r.tau = 0.1 * i;
            r.t = std::expm1(r.tau);
            r.L1_w_W = g.uniform(0, 2);
            r.L1_w_Winf = g.integer(0, 1) ? std::nan("") : g.uniform(0, 2);
            r.L1_W_Winf = g.uniform(0, 1) * 1e-7;
            r.never_jumped_fraction = std::nan("");
            r.entropy_kind = "kullback";
            r.entropy_value = g.uniform(0, 3);
            r.DH = -g.uniform(0, 1);
            r.remainder = g.uniform(-1e-9, 1e-9);
            s.rows.push_back(r);
        }
        const auto path = fresh_dir("csv") / "s.csv";
        write_series_csv(path.string(), s);
        CHECK(slurp(path).rfind("# schema: v1\n", 0) == 0);
        const Series back = read_series_csv(path.string());
        REQUIRE(back.rows.size() == s.rows.size());
        for (std::size_t i = 0; i < s.rows.size(); ++i)
        {
            CHECK(back.rows[i].L1_w_W == doctest::Approx(s.rows[i].L1_w_W).epsilon(1e-11));
            CHECK(std::isnan(back.rows[i].L1_w_Winf) == std::isnan(s.rows[i].L1_w_Winf));
            CHECK(std::isnan(back.rows[i].never_jumped_fraction));
            CHECK(back.rows[i].entropy_kind == "kullback");
        }
        // A second write of the read-back series is byte-identical.
        const auto path2 = path.parent_path() / "s2.csv";
        write_series_csv(path2.string(), back);
        CHECK(slurp(path) == slurp(path2));
    });
}

TEST_CASE("experiment: fit windows follow the configured rules")
{
    ExperimentConfig c = small("windows");
    Series s;
    for (double tau : snapshot_times(10.0, 0.1))
    {
        SeriesRow r;
        r.tau = tau;
        // Smooth decay with a jump between tau = 6.0 and 6.1.
        r.L1_w_W = 1.5 * std::exp(-0.3 * tau) + 0.5 * std::exp(-0.7 * tau) + 0.05 + (tau > 6.05 ? 0.2 : 0.0);
        s.rows.push_back(r);
    }
    c.rate.mu = 0.3;
    PreparedFit p = prepare_fit(s, SeriesSource::MonteCarlo, c);
    CHECK_FALSE(p.windowed);
    CHECK(p.series.fit_window->second == doctest::Approx(10.0));

    c.fit.auto_window = true;
    c.fit.fixed_C_if_windowed = 0.05;
    p = prepare_fit(s, SeriesSource::MonteCarlo, c);
    CHECK(p.windowed);
    CHECK(p.series.fit_window->second < 6.05);
    CHECK(p.series.fit_window->second > 5.5);
    REQUIRE(p.options.fixed_C);
    CHECK(*p.options.fixed_C == 0.05);
    const FitResult f = fit_decay(p.series, p.options);
    CHECK(f.lambda == doctest::Approx(0.3).epsilon(1e-4));

    c.fit.window_hi = 4.0;
    p = prepare_fit(s, SeriesSource::MonteCarlo, c);
    CHECK(p.series.fit_window->second == 4.0);
    CHECK_FALSE(p.options.fixed_C);

    c.fit.window_hi.reset();
    c.fit.auto_window = false;
    c.n_cells = 256;
    p = prepare_fit(s, SeriesSource::Pde, c);
    CHECK(p.series.fit_window->second == doctest::Approx(std::log(256.0)));
}

TEST_CASE("experiment: bound overlays per rate")
{
    ExperimentConfig c = small("bounds");
    auto names = [](const std::vector<BoundRow>& rows) {
        std::set<std::string> s;
        for (const auto& r : rows)
        {
            s.insert(r.theorem);
        }
        return s;
    };
    auto rows = bound_overlays(c);
    CHECK(names(rows) == std::set<std::string>{"ThmRef", "WtoWinf", "NaturalVars", "LowerDirac"});
    CHECK(rows.front().tau == 0.0);
    CHECK(rows.front().value == doctest::Approx(c.bounds.H0));
    c.rate.kind = "perturbed";
    c.rate.alpha = 0.5;
    CHECK(names(bound_overlays(c)).count("ThmGeneral") == 1);
    c.rate = RateConfig{};
    c.rate.mu = 1.0;
    CHECK(names(bound_overlays(c)) == std::set<std::string>{"MuOne", "LowerDirac"});
}

TEST_CASE("experiment: run writes artifacts and resumes byte-identically")
{
    ExperimentConfig c = small("run_resume");
    c.engine = "both";
    c.histograms = true;
    const RunArtifacts first = run_experiment(c);
    CHECK_FALSE(first.resumed);
    REQUIRE(first.fit_montecarlo);
    REQUIRE(first.fit_pde);
    const fs::path dir(c.output_dir);
    for (const char* f : {"series_montecarlo.csv", "series_pde.csv", "fit_montecarlo.json", "fit_pde.json", "bounds.csv",
                          "manifest.json"})
    {
        CHECK(fs::exists(dir / f));
    }
    CHECK(fs::exists(dir / "histograms" / "hist_0.000.csv"));
    CHECK(fs::exists(dir / "histograms" / "hist_3.000.csv"));
    const std::string series = slurp(dir / "series_montecarlo.csv");
    const std::string fit = slurp(dir / "fit_pde.json");

    const RunArtifacts second = run_experiment(c);
    CHECK(second.resumed);
    CHECK(slurp(dir / "series_montecarlo.csv") == series);
    CHECK(slurp(dir / "fit_pde.json") == fit);

    // A fresh run into another directory reproduces the same bytes.
    ExperimentConfig again = c;
    again.output_dir = fresh_dir("run_resume_again").string();
    const RunArtifacts third = run_experiment(again);
    CHECK_FALSE(third.resumed);
    CHECK(slurp(fs::path(again.output_dir) / "series_montecarlo.csv") == series);

    // A changed configuration invalidates the manifest.
    c.seed = 99;
    CHECK_FALSE(run_experiment(c).resumed);
    CHECK(slurp(dir / "series_montecarlo.csv") != series);
}

TEST_CASE("experiment: single engine uses plain artifact names")
{
    ExperimentConfig c = small("single");
    c.engine = "pde";
    c.fit.enabled = false;
    const RunArtifacts a = run_experiment(c);
    CHECK(a.pde);
    CHECK_FALSE(a.fit_pde);
    CHECK(fs::exists(fs::path(c.output_dir) / "series.csv"));
    CHECK_FALSE(fs::exists(fs::path(c.output_dir) / "fit.json"));
}

TEST_CASE("experiment: invalid configuration is rejected before running")
{
    ExperimentConfig c = small("invalid");
    c.replicas = 0;
    CHECK_THROWS_AS(run_experiment(c), ValidationError);
}

TEST_CASE("experiment: sweep records per-point results")
{
    ExperimentConfig c = small("sweep");
    c.engine = "pde";
    c.tau_max = 4.0;
    const auto points = sweep_mu({0.3, 0.7}, c, SeriesSource::Pde);
    REQUIRE(points.size() == 2);
    for (const auto& p : points)
    {
        CHECK(p.error.empty());
        REQUIRE(p.fit);
        CHECK(std::isfinite(p.fit->lambda));
    }
    const auto path = fs::path(c.output_dir) / "sweep.csv";
    write_sweep_csv(path.string(), points);
    CHECK(slurp(path).find("mu,lambda,lambda_err") != std::string::npos);
}

TEST_CASE("experiment: parallel_for covers every index and rethrows")
{
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                        if (i == 7)
                        {
                            throw DomainError("boom");
                        }
                    }),
                    DomainError);
    CHECK(worker_count() >= 1);
}

TEST_CASE("experiment: figure recipes")
{
    const auto f1 = fig1_configs(0.4, "/tmp/x");
    REQUIRE(f1.size() == 2);
    CHECK(f1[0].initial == "dirac");
    CHECK(f1[1].initial == "uniform");
    CHECK(f1[0].n_walkers == 20000);
    const auto f2 = fig2_configs("/tmp/x");
    REQUIRE(f2.size() == 3);
    CHECK(f2[0].replicas == 5);
    CHECK(f2[2].rate.mu == 0.2);
    CHECK(*f2[2].fit.fixed_C_if_windowed == 0.08);
    CHECK(fig3_mus().size() == 9);
    CHECK(fig4_config(0.9, "/tmp/x").rate.mu == 0.9);
}
