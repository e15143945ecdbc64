#include "ctrw/experiment.hpp"

#include "ctrw/bounds.hpp"
#include "ctrw/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace ctrw
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& numeric_columns()
{
    static const std::vector<std::string> cols{"tau",           "t",  "L1_w_W",   "L1_w_Winf", "L1_W_Winf",
                                               "never_jumped_fraction", "entropy_value", "DH", "remainder"};
    return cols;
}

double& field(SeriesRow& r, const std::string& name)
{
    if (name == "tau")
        return r.tau;
    if (name == "t")
        return r.t;
    if (name == "L1_w_W")
        return r.L1_w_W;
    if (name == "L1_w_Winf")
        return r.L1_w_Winf;
    if (name == "L1_W_Winf")
        return r.L1_W_Winf;
    if (name == "never_jumped_fraction")
        return r.never_jumped_fraction;
    if (name == "entropy_value")
        return r.entropy_value;
    if (name == "DH")
        return r.DH;
    if (name == "remainder")
        return r.remainder;
    throw ParameterError("unknown series column '" + name + "'");
}

double field(const SeriesRow& r, const std::string& name)
{
    return field(const_cast<SeriesRow&>(r), name);
}

std::string num(double x)
{
    return fmt::format("{:.12g}", x);
}

thread_local bool t_in_worker = false;

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw ParameterError("cannot write '" + path.string() + "'");
    }
    out << text;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ParameterError("cannot read '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Advances a rescaled profile to exactly tau_end with equal steps of at most one cell.
void run_rescaled_to(DensityProfile& p, double tau_end, const JumpRateModel& model)
{
    const double remaining = tau_end - p.time();
    if (remaining <= 0.0)
    {
        return;
    }
    const int steps = static_cast<int>(std::ceil(remaining / p.cell_width() - 1e-9));
    const double dtau = remaining / steps;
    for (int k = 0; k < steps; ++k)
    {
        advance_rescaled(p, dtau, model);
    }
}

// Full cell shifts, then one partial step that lands on t_end.
void run_natural_to(DensityProfile& p, double t_end, const JumpRateModel& model)
{
    const double h = p.cell_width();
    while (t_end - p.time() > 1e-12 * std::max(1.0, t_end))
    {
        advance_natural(p, std::min(h, t_end - p.time()), model);
    }
}

} // namespace

std::vector<double> Series::taus() const
{
    return column("tau");
}

std::vector<double> Series::column(const std::string& name) const
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
    {
        out.push_back(field(r, name));
    }
    return out;
}

std::vector<double> snapshot_times(double tau_max, double dtau)
{
    if (!(dtau > 0.0) || !(tau_max >= 0.0))
    {
        throw ParameterError("snapshot_times needs dtau > 0 and tau_max >= 0");
    }
    const auto count = static_cast<long>(std::floor(tau_max / dtau + 1e-9));
    std::vector<double> out;
    for (long k = 0; k <= count; ++k)
    {
        out.push_back(k * dtau);
    }
    return out;
}

SnapshotMeter::SnapshotMeter(const EquilibriumHandle& handle, int n_cells, EntropyKind entropy, bool dissipation)
    : handle_(handle), n_cells_(n_cells), entropy_{entropy}, dissipation_(dissipation)
{
    if (handle_.mu() < 1.0)
    {
        w_infinity_ = target_cell_averages(handle_, Target::w_infinity(), n_cells_);
    }
}

SeriesRow SnapshotMeter::measure(const PiecewiseConstant& profile, double tau) const
{
    if (profile.n_cells() != n_cells_ || profile.length != 1.0)
    {
        throw ParameterError("SnapshotMeter: profile grid does not match");
    }
    const auto W = target_cell_averages(handle_, Target::pseudo_equilibrium(tau), n_cells_);
    SeriesRow row;
    row.tau = tau;
    row.t = std::expm1(tau);
    row.L1_w_W = l1_distance(profile, W);
    if (!w_infinity_.empty())
    {
        row.L1_w_Winf = l1_distance(profile, w_infinity_);
        row.L1_W_Winf = l1_distance(PiecewiseConstant{1.0, W}, w_infinity_);
    }
    else
    {
        row.L1_w_Winf = kNaN;
        row.L1_W_Winf = kNaN;
    }
    row.never_jumped_fraction = kNaN;
    row.entropy_kind = to_string(entropy_.kind);
    row.entropy_value = relative_entropy(profile, W, entropy_);
    if (dissipation_)
    {
        const Dissipation d = dissipation_measure(profile, tau, entropy_, handle_);
        row.DH = d.DH;
        row.remainder = d.remainder;
    }
    else
    {
        row.DH = kNaN;
        row.remainder = kNaN;
    }
    return row;
}

Series run_montecarlo(const ExperimentConfig& config, std::uint64_t replica, const HistogramSink& sink)
{
    const JumpRateModel model = config.rate.build();
    const EquilibriumHandle handle(model);
    const SnapshotMeter meter(handle, config.bins, entropy_kind_from_string(config.entropy), config.dissipation);
    PopulationOptions options;
    options.seed = config.seed;
    options.replica = replica;
    options.unconditional_first_jump = config.unconditional_first_jump;
    WalkerPopulation pop(config.n_walkers, initial_condition_from_string(config.initial), model, options);
    Series out;
    for (double tau : snapshot_times(config.tau_max, config.snapshot_dtau))
    {
        pop.advance_to(std::expm1(tau));
        const RescaledHistogram hist = snapshot_histogram(pop, config.bins);
        SeriesRow row = meter.measure(view(hist), tau);
        row.never_jumped_fraction = pop.never_jumped_fraction();
        out.rows.push_back(row);
        if (sink)
        {
            sink(tau, hist);
        }
    }
    return out;
}

Series run_montecarlo_averaged(const ExperimentConfig& config, const HistogramSink& sink)
{
    std::vector<Series> replicas(config.replicas);
    parallel_for(replicas.size(), [&](std::size_t r) {
        replicas[r] = run_montecarlo(config, r, r == 0 ? sink : HistogramSink{});
    });
    return average(replicas);
}

Series run_pde(const ExperimentConfig& config)
{
    const JumpRateModel model = config.rate.build();
    const EquilibriumHandle handle(model);
    const EntropyKind entropy = entropy_kind_from_string(config.entropy);
    const Variables variables = variables_from_string(config.variables);
    const bool dirac = config.initial == "dirac";
    Series out;
    if (variables == Variables::Rescaled)
    {
        const SnapshotMeter meter(handle, config.n_cells, entropy, config.dissipation);
        DensityProfile p = dirac ? DensityProfile::dirac(Variables::Rescaled, config.n_cells)
                                 : DensityProfile::uniform_unit(Variables::Rescaled, config.n_cells);
        for (double tau : snapshot_times(config.tau_max, config.snapshot_dtau))
        {
            run_rescaled_to(p, tau, model);
            SeriesRow row = meter.measure(view(p), tau);
            out.rows.push_back(row);
        }
        return out;
    }
    // Ages stay below 1 + t_max; one spare cell keeps the last cell empty.
    const double t_max = std::expm1(config.tau_max);
    const double a_max = (2.0 + t_max) * (1.0 + 2.0 / config.n_cells);
    const SnapshotMeter meter(handle, config.bins, entropy, config.dissipation);
    DensityProfile p = dirac ? DensityProfile::dirac(Variables::Natural, config.n_cells, a_max)
                             : DensityProfile::uniform_unit(Variables::Natural, config.n_cells, a_max);
    for (double tau : snapshot_times(config.tau_max, config.snapshot_dtau))
    {
        run_natural_to(p, std::expm1(tau), model);
        const DensityProfile w = rescale_natural(p, config.bins);
        SeriesRow row = meter.measure(view(w), tau);
        out.rows.push_back(row);
    }
    return out;
}

Series average(const std::vector<Series>& replicas)
{
    if (replicas.empty())
    {
        throw ParameterError("average: no replicas");
    }
    Series out = replicas.front();
    if (replicas.size() == 1)
    {
        return out;
    }
    for (std::size_t i = 0; i < out.rows.size(); ++i)
    {
        for (const auto& name : numeric_columns())
        {
            if (name == "tau" || name == "t")
            {
                continue;
            }
            double s = 0.0;
            for (const auto& rep : replicas)
            {
                if (rep.rows.size() != out.rows.size() || rep.rows[i].tau != out.rows[i].tau)
                {
                    throw ParameterError("average: replicas have different snapshot times");
                }
                s += field(rep.rows[i], name);
            }
            field(out.rows[i], name) = s / replicas.size();
        }
    }
    return out;
}

void write_series_csv(const std::string& path, const Series& series)
{
    std::string text = "# schema: v1\n"
                       "tau,t,L1_w_W,L1_w_Winf,L1_W_Winf,never_jumped_fraction,entropy_kind,entropy_value,DH,"
                       "remainder\n";
    for (const auto& r : series.rows)
    {
        text += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(r.tau), num(r.t), num(r.L1_w_W), num(r.L1_w_Winf),
                            num(r.L1_W_Winf), num(r.never_jumped_fraction), r.entropy_kind, num(r.entropy_value),
                            num(r.DH), num(r.remainder));
    }
    write_text(path, text);
}

Series read_series_csv(const std::string& path)
{
    std::istringstream in(read_text(path));
    std::string line;
    std::vector<std::string> header;
    Series out;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
        {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
        {
            cells.push_back(cell);
        }
        if (header.empty())
        {
            header = cells;
            continue;
        }
        if (cells.size() != header.size())
        {
            throw ParameterError("series CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(header.size()));
        }
        SeriesRow row;
        for (double* f : {&row.L1_w_Winf, &row.L1_W_Winf, &row.never_jumped_fraction, &row.DH, &row.remainder})
        {
            *f = kNaN;
        }
        for (std::size_t k = 0; k < header.size(); ++k)
        {
            if (header[k] == "entropy_kind")
            {
                row.entropy_kind = cells[k];
                continue;
            }
            try
            {
                field(row, header[k]) = std::stod(cells[k]);
            }
            catch (const std::invalid_argument&)
            {
                throw ParameterError("series CSV: cannot parse '" + cells[k] + "' in column " + header[k]);
            }
        }
        out.rows.push_back(row);
    }
    if (header.empty())
    {
        throw ParameterError("series CSV '" + path + "' has no header");
    }
    return out;
}

PreparedFit prepare_fit(const Series& series, SeriesSource source, const ExperimentConfig& config)
{
    PreparedFit out;
    out.series.tau = series.taus();
    out.series.value = series.column("L1_w_W");
    out.series.source = source;
    out.series.mu_nominal = config.rate.mu < 1.0 ? config.rate.mu : kNaN;
    if (out.series.tau.empty())
    {
        throw ParameterError("prepare_fit: empty series");
    }
    double lo = config.fit.window_lo.value_or(out.series.tau.front());
    double hi = out.series.tau.back();
    if (config.fit.window_hi)
    {
        hi = *config.fit.window_hi;
    }
    else
    {
        if (config.fit.auto_window)
        {
            const auto proposed = propose_window(out.series);
            if (proposed.second < hi)
            {
                hi = proposed.second;
                out.windowed = true;
            }
        }
        if (source == SeriesSource::Pde && config.variables == "rescaled")
        {
            hi = std::min(hi, std::log(double(config.n_cells)));
        }
    }
    out.series.fit_window = std::make_pair(lo, hi);
    out.options.fixed_C = config.fit.fixed_C;
    if (!out.options.fixed_C && out.windowed && config.fit.fixed_C_if_windowed)
    {
        out.options.fixed_C = config.fit.fixed_C_if_windowed;
    }
    out.options.fixed_lambda = config.fit.fixed_lambda;
    return out;
}

FitResult fit_series(const Series& series, SeriesSource source, const ExperimentConfig& config)
{
    const PreparedFit p = prepare_fit(series, source, config);
    return fit_decay(p.series, p.options);
}

std::string fit_to_json(const FitResult& fit, double mu, const std::string& source)
{
    json j{{"source", source},
           {"mu_nominal", mu},
           {"lambda", fit.lambda},
           {"A", fit.A},
           {"B", fit.B},
           {"C", fit.C},
           {"std_errors",
            {{"lambda", fit.std_errors[0]}, {"A", fit.std_errors[1]}, {"B", fit.std_errors[2]}, {"C", fit.std_errors[3]}}},
           {"residual_rms", fit.residual_rms},
           {"gradient_norm", fit.gradient_norm},
           {"window", {fit.window_lo, fit.window_hi}},
           {"n_points", fit.n_points},
           {"flags", {{"degenerate", fit.degenerate}, {"converged", fit.converged}, {"fixed", fit.fixed_params}}}};
    return j.dump(2) + "\n";
}

std::vector<BoundRow> bound_overlays(const ExperimentConfig& config)
{
    const JumpRateModel model = config.rate.build();
    const double mu = model.mu();
    std::vector<BoundSpec> specs;
    auto add = [&](Theorem th, std::optional<double> alpha) {
        BoundSpec s;
        s.theorem = th;
        s.mu = mu;
        s.alpha = alpha;
        s.H0 = config.bounds.H0;
        s.K = config.bounds.K;
        specs.push_back(s);
    };
    std::optional<double> alpha;
    if (model.perturbation())
    {
        alpha = model.perturbation()->alpha;
    }
    if (mu < 1.0)
    {
        if (model.kind() == RateKind::Reference)
        {
            add(Theorem::ThmRef, std::nullopt);
        }
        else if (alpha)
        {
            add(Theorem::ThmGeneral, alpha);
        }
        add(Theorem::WtoWinf, alpha);
        add(Theorem::NaturalVars, std::nullopt);
    }
    else
    {
        add(Theorem::MuOne, std::nullopt);
    }
    add(Theorem::LowerDirac, std::nullopt);
    std::vector<BoundRow> rows;
    for (const auto& s : specs)
    {
        for (double tau : snapshot_times(config.tau_max, config.snapshot_dtau))
        {
            rows.push_back({to_string(s.theorem), tau, eval_bound(s, tau)});
        }
    }
    return rows;
}

void write_bounds_csv(const std::string& path, const std::vector<BoundRow>& rows)
{
    std::string text = "# schema: v1\ntheorem,tau,bound_value\n";
    for (const auto& r : rows)
    {
        text += fmt::format("{},{},{}\n", r.theorem, num(r.tau), num(r.value));
    }
    write_text(path, text);
}

int worker_count()
{
    if (const char* env = std::getenv("CTRW_WORKERS"))
    {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096)
        {
            return static_cast<int>(v);
        }
        throw ParameterError(std::string("CTRW_WORKERS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = t_in_worker ? 1 : std::min<std::size_t>(worker_count(), n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&] {
            t_in_worker = true;
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                    {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool)
    {
        t.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

RunArtifacts run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const fs::path dir(config.output_dir);
    fs::create_directories(dir);
    const std::string hash = fmt::format("{:016x}", config_hash(config));
    const fs::path manifest_path = dir / "manifest.json";

    RunArtifacts out;
    std::set<std::string> completed;
    if (fs::exists(manifest_path))
    {
        try
        {
            const json m = json::parse(read_text(manifest_path));
            if (m.value("config_hash", std::string()) == hash)
            {
                for (const auto& s : m.at("completed"))
                {
                    completed.insert(s.get<std::string>());
                }
            }
        }
        catch (const json::exception&)
        {
            completed.clear();
        }
    }
    auto save_manifest = [&] {
        json m{{"toolkit_version", kToolkitVersion},
               {"config_hash", hash},
               {"seed", config.seed},
               {"config", json::parse(to_json_string(config))},
               {"completed", std::vector<std::string>(completed.begin(), completed.end())}};
        write_text(manifest_path, m.dump(2) + "\n");
    };
    auto done = [&](const std::string& step, const fs::path& file) {
        return completed.count(step) && fs::exists(file);
    };
    save_manifest();

    std::vector<std::string> engines;
    if (config.engine == "montecarlo" || config.engine == "both")
    {
        engines.push_back("montecarlo");
    }
    if (config.engine == "pde" || config.engine == "both")
    {
        engines.push_back("pde");
    }
    const bool single = engines.size() == 1;

    for (const auto& engine : engines)
    {
        const fs::path series_path = dir / (single ? "series.csv" : "series_" + engine + ".csv");
        const std::string step = "series_" + engine;
        if (done(step, series_path))
        {
            out.resumed = true;
        }
        else
        {
            Series s;
            if (engine == "montecarlo")
            {
                HistogramSink sink;
                if (config.histograms)
                {
                    fs::create_directories(dir / "histograms");
                    sink = [&](double tau, const RescaledHistogram& h) {
                        std::string text = "# schema: v1\ntau,bin_center,density\n";
                        for (int i = 0; i < h.n_bins(); ++i)
                        {
                            text += fmt::format("{},{},{}\n", num(tau), num((i + 0.5) * h.bin_width()), num(h.density(i)));
                        }
                        write_text(dir / "histograms" / fmt::format("hist_{:.3f}.csv", tau), text);
                    };
                }
                s = run_montecarlo_averaged(config, sink);
            }
            else
            {
                s = run_pde(config);
            }
            write_series_csv(series_path.string(), s);
            completed.insert(step);
            save_manifest();
        }
        // Downstream steps always consume the series as written, so fresh and
        // resumed runs produce identical fits.
        Series written = read_series_csv(series_path.string());
        const SeriesSource source = engine == "montecarlo" ? SeriesSource::MonteCarlo : SeriesSource::Pde;
        if (config.fit.enabled)
        {
            const fs::path fit_path = dir / (single ? "fit.json" : "fit_" + engine + ".json");
            const FitResult fit = fit_series(written, source, config);
            if (!done("fit_" + engine, fit_path))
            {
                write_text(fit_path, fit_to_json(fit, config.rate.mu, engine));
                completed.insert("fit_" + engine);
                save_manifest();
            }
            (engine == "montecarlo" ? out.fit_montecarlo : out.fit_pde) = fit;
        }
        (engine == "montecarlo" ? out.montecarlo : out.pde) = std::move(written);
    }

    const fs::path bounds_path = dir / "bounds.csv";
    if (!done("bounds", bounds_path))
    {
        write_bounds_csv(bounds_path.string(), bound_overlays(config));
        completed.insert("bounds");
        save_manifest();
    }
    return out;
}

std::vector<SweepPoint> sweep_mu(const std::vector<double>& mus, const ExperimentConfig& base, SeriesSource source)
{
    std::vector<SweepPoint> points(mus.size());
    parallel_for(mus.size(), [&](std::size_t i) {
        SweepPoint& p = points[i];
        p.mu = mus[i];
        try
        {
            ExperimentConfig c = base;
            c.rate.mu = mus[i];
            c.seed = base.seed + i;
            c.engine = source == SeriesSource::MonteCarlo ? "montecarlo" : "pde";
            c.fit.enabled = true;
            c.name = fmt::format("{}_mu{:g}", base.name, mus[i]);
            c.output_dir = (fs::path(base.output_dir) / fmt::format("mu_{:g}", mus[i])).string();
            const RunArtifacts a = run_experiment(c);
            p.fit = source == SeriesSource::MonteCarlo ? a.fit_montecarlo : a.fit_pde;
        }
        catch (const std::exception& e)
        {
            p.error = e.what();
        }
    });
    return points;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points)
{
    std::string text = "# schema: v1\nmu,lambda,lambda_err,A,B,C,residual_rms,window_lo,window_hi,degenerate,error\n";
    for (const auto& p : points)
    {
        if (p.fit)
        {
            const FitResult& f = *p.fit;
            text += fmt::format("{},{},{},{},{},{},{},{},{},{},\n", num(p.mu), num(f.lambda), num(f.std_errors[0]),
                                num(f.A), num(f.B), num(f.C), num(f.residual_rms), num(f.window_lo),
                                num(f.window_hi), f.degenerate ? 1 : 0);
        }
        else
        {
            std::string msg = p.error;
            for (char& ch : msg)
            {
                if (ch == ',' || ch == '\n')
                {
                    ch = ';';
                }
            }
            text += fmt::format("{},nan,nan,nan,nan,nan,nan,nan,nan,0,{}\n", num(p.mu), msg);
        }
    }
    write_text(path, text);
}

namespace
{

ExperimentConfig desk_scale(const std::string& name, double mu, const fs::path& dir)
{
    ExperimentConfig c;
    c.name = name;
    c.rate.mu = mu;
    c.engine = "montecarlo";
    c.n_walkers = 20000;
    c.bins = RescaledHistogram::kDefaultBins;
    c.snapshot_dtau = 0.1;
    c.output_dir = dir.string();
    return c;
}

} // namespace

std::vector<ExperimentConfig> fig1_configs(double mu, const std::string& out_dir)
{
    std::vector<ExperimentConfig> out;
    std::uint64_t seed = 1;
    for (const char* ic : {"dirac", "uniform"})
    {
        ExperimentConfig c =
            desk_scale(fmt::format("fig1_mu{:g}_{}", mu, ic), mu, fs::path(out_dir) / "fig1" / fmt::format("mu_{:g}", mu) / ic);
        c.initial = ic;
        c.seed = seed++;
        c.tau_max = 8.0;
        c.fit.enabled = false;
        out.push_back(c);
    }
    return out;
}

std::vector<ExperimentConfig> fig2_configs(const std::string& out_dir)
{
    std::vector<ExperimentConfig> out;
    std::uint64_t seed = 11;
    for (double mu : {0.9, 0.5, 0.2})
    {
        ExperimentConfig c = desk_scale(fmt::format("fig2_mu{:g}", mu), mu, fs::path(out_dir) / "fig2" / fmt::format("mu_{:g}", mu));
        c.seed = seed++;
        c.replicas = 5;
        c.tau_max = 10.0;
        // The never-jumped atom enters the last bin at tau = ln(bins); fits stop before it.
        c.fit.auto_window = true;
        c.fit.fixed_C_if_windowed = 0.08;
        out.push_back(c);
    }
    return out;
}

ExperimentConfig fig3_base(const std::string& out_dir)
{
    ExperimentConfig c = desk_scale("fig3", 0.5, fs::path(out_dir) / "fig3");
    c.seed = 31;
    c.replicas = 5;
    c.tau_max = 10.0;
    c.fit.auto_window = true;
    c.fit.fixed_C_if_windowed = 0.08;
    return c;
}

std::vector<double> fig3_mus()
{
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

ExperimentConfig fig4_config(double mu, const std::string& out_dir)
{
    ExperimentConfig c = desk_scale(fmt::format("fig4_mu{:g}", mu), mu, fs::path(out_dir) / "fig4" / fmt::format("mu_{:g}", mu));
    c.seed = 41;
    c.tau_max = 10.0;
    c.fit.enabled = false;
    return c;
}

} // namespace ctrw
