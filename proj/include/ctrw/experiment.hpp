#pragma once

#include "ctrw/config.hpp"
#include "ctrw/equilibria.hpp"
#include "ctrw/fitting.hpp"
#include "ctrw/metrics.hpp"
#include "ctrw/pde.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ctrw
{

inline constexpr const char* kToolkitVersion = "1.0.0";

/// One snapshot of the shared time-series schema. Quantities that do not
/// exist for a run (W_inf when mu = 1, the never-jumped fraction of a PDE
/// solve, disabled dissipation) are NaN.
struct SeriesRow
{
    double tau = 0.0;
    double t = 0.0;
    double L1_w_W = 0.0;
    double L1_w_Winf = 0.0;
    double L1_W_Winf = 0.0;
    double never_jumped_fraction = 0.0;
    std::string entropy_kind = "abs";
    double entropy_value = 0.0;
    double DH = 0.0;
    double remainder = 0.0;
};

struct Series
{
    std::vector<SeriesRow> rows;

    std::vector<double> taus() const;
    /// One column by schema name.
    std::vector<double> column(const std::string& name) const;
};

/// Snapshot times k * dtau for k = 0 .. floor(tau_max / dtau), endpoints included.
std::vector<double> snapshot_times(double tau_max, double dtau);

/// Precomputed attractor cell averages and dissipation settings for measuring
/// profiles on a fixed grid of [0, 1).
class SnapshotMeter
{
public:
    SnapshotMeter(const EquilibriumHandle& handle, int n_cells, EntropyKind entropy, bool dissipation);

    SeriesRow measure(const PiecewiseConstant& profile, double tau) const;

private:
    const EquilibriumHandle& handle_;
    int n_cells_;
    EntropySpec entropy_;
    bool dissipation_;
    std::vector<double> w_infinity_;
};

/// Called with each histogram snapshot (tau, histogram).
using HistogramSink = std::function<void(double, const RescaledHistogram&)>;

/// Monte-Carlo series of one replica. Replicas draw from disjoint streams of the
/// same seed.
Series run_montecarlo(const ExperimentConfig& config, std::uint64_t replica, const HistogramSink& sink = {});

/// Replica-averaged distances: every numeric column is the mean over replicas.
Series run_montecarlo_averaged(const ExperimentConfig& config, const HistogramSink& sink = {});

/// PDE series on config.n_cells cells. Natural-variable solves are measured
/// after rescaling onto config.bins cells; rescaled solves on their own grid.
Series run_pde(const ExperimentConfig& config);

Series average(const std::vector<Series>& replicas);

void write_series_csv(const std::string& path, const Series& series);
Series read_series_csv(const std::string& path);

/// Decay series of L1_w_W with the configured window rules applied: an explicit
/// window wins; otherwise auto_window cuts before a detected discontinuity;
/// PDE series additionally stop at tau = ln(n_cells), past which the renewal
/// boundary layer of width e^-tau is thinner than one cell.
struct PreparedFit
{
    DecaySeries series;
    FitOptions options;
    bool windowed = false;
};

PreparedFit prepare_fit(const Series& series, SeriesSource source, const ExperimentConfig& config);
FitResult fit_series(const Series& series, SeriesSource source, const ExperimentConfig& config);

std::string fit_to_json(const FitResult& fit, double mu, const std::string& source);

/// Rows (theorem, tau, bound_value) for every bound applicable to the rate.
struct BoundRow
{
    std::string theorem;
    double tau = 0.0;
    double value = 0.0;
};

std::vector<BoundRow> bound_overlays(const ExperimentConfig& config);
void write_bounds_csv(const std::string& path, const std::vector<BoundRow>& rows);

/// Worker count from CTRW_WORKERS, else the hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) on the worker pool; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

struct RunArtifacts
{
    std::optional<Series> montecarlo;
    std::optional<Series> pde;
    std::optional<FitResult> fit_montecarlo;
    std::optional<FitResult> fit_pde;
    bool resumed = false;
};

/// Validates, runs the configured engines and writes series, bounds, fits,
/// optional histograms and manifest.json into config.output_dir. Steps recorded
/// as completed in a manifest with the same config hash are read back instead
/// of recomputed.
RunArtifacts run_experiment(const ExperimentConfig& config);

struct SweepPoint
{
    double mu = 0.0;
    std::optional<FitResult> fit;
    std::string error;
};

/// One run per mu (seed offset by the index so streams are independent),
/// each fitted with the base configuration's fit rules. Failures are recorded
/// per point and the sweep continues.
std::vector<SweepPoint> sweep_mu(const std::vector<double>& mus, const ExperimentConfig& base,
                                 SeriesSource source = SeriesSource::MonteCarlo);
void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& points);

/// Figure recipes. Each writes into out_dir/<recipe>/... and returns the
/// configurations it ran.
std::vector<ExperimentConfig> fig1_configs(double mu, const std::string& out_dir);
std::vector<ExperimentConfig> fig2_configs(const std::string& out_dir);
ExperimentConfig fig3_base(const std::string& out_dir);
std::vector<double> fig3_mus();
ExperimentConfig fig4_config(double mu, const std::string& out_dir);

} // namespace ctrw
