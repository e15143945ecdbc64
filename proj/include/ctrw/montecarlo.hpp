#pragma once

#include "ctrw/numerics.hpp"
#include "ctrw/rates.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ctrw
{

/// Inverse-transform draw of the waiting time s > 0 with survival(age0, s) = u.
double sample_waiting_time(const JumpRateModel& model, double age0, double u);

enum class InitialKind
{
    DiracAtZero,
    UniformUnit,
    Custom
};

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

/// Initial age distribution. Custom samplers draw from the walker's own stream
/// and must return ages in [0, 1).
struct InitialCondition
{
    InitialKind kind = InitialKind::DiracAtZero;
    std::function<double(numerics::RandomStream&)> custom_sampler;

    static InitialCondition dirac() { return {InitialKind::DiracAtZero, {}}; }
    static InitialCondition uniform() { return {InitialKind::UniformUnit, {}}; }
    static InitialCondition custom(std::function<double(numerics::RandomStream&)> sampler)
    {
        return {InitialKind::Custom, std::move(sampler)};
    }
};

/// Expected fraction of walkers with no renewal by time t, averaged over the
/// initial distribution (Dirac or uniform; custom initial data throws).
double never_jumped_probability(const JumpRateModel& model, const InitialCondition& ic, double t,
                                bool unconditional_first_jump = false);

struct PopulationOptions
{
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
    /// Draw first events from the age-0 law regardless of the initial age
    /// (exact only for Dirac-at-0 data). Off by default.
    bool unconditional_first_jump = false;
    /// Replaces inverse-transform sampling: (walker, age at draw, u) -> waiting time.
    std::function<double(std::uint32_t, double, double)> waiting_time_override;
};

/// Event-driven renewal population. Each walker owns one pending event in a
/// binary min-heap; each waiting time consumes exactly one uniform from the
/// walker's stream (seed, walker_stream(replica, walker)).
class WalkerPopulation
{
public:
    WalkerPopulation(std::size_t n, const InitialCondition& ic, JumpRateModel model, PopulationOptions options = {});

    /// Processes every event with time <= t_target in time order, then sets the clock to t_target.
    void advance_to(double t_target);

    double clock() const { return clock_; }
    std::size_t size() const { return last_jump_.size(); }
    double age(std::size_t walker) const { return clock_ - last_jump_[walker]; }
    double last_jump_time(std::size_t walker) const { return last_jump_[walker]; }
    bool never_jumped(std::size_t walker) const { return never_jumped_[walker] != 0; }
    std::size_t never_jumped_count() const { return never_jumped_count_; }
    double never_jumped_fraction() const { return double(never_jumped_count_) / double(size()); }
    double initial_age(std::size_t walker) const { return -first_birth_[walker]; }
    std::uint64_t events_processed() const { return events_processed_; }
    double next_event_time() const { return heap_.front().time; }
    const JumpRateModel& model() const { return model_; }

    /// When set, every processed event time is appended to `sink`.
    void record_events(std::vector<double>* sink) { event_sink_ = sink; }

private:
    struct Event
    {
        double time;
        std::uint32_t walker;
    };

    double draw_waiting_time(std::uint32_t walker, double age0);
    void sift_down(std::size_t pos);
    void build_heap();

    JumpRateModel model_;
    PopulationOptions options_;
    bool reference_;
    double inv_mu_;
    std::vector<double> last_jump_;
    std::vector<double> first_birth_;
    std::vector<std::uint8_t> never_jumped_;
    std::vector<std::uint64_t> counters_;
    std::vector<Event> heap_;
    double clock_ = 0.0;
    std::size_t never_jumped_count_ = 0;
    std::uint64_t events_processed_ = 0;
    std::vector<double>* event_sink_ = nullptr;
};

WalkerPopulation init_population(std::size_t n, const InitialCondition& ic, const JumpRateModel& model,
                                 std::uint64_t seed, std::uint64_t replica = 0);

/// Histogram of rescaled ages b = age / (1 + t) on [0, 1).
struct RescaledHistogram
{
    static constexpr int kDefaultBins = 512;

    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    double clock = 0.0;

    int n_bins() const { return static_cast<int>(counts.size()); }
    double bin_width() const { return 1.0 / n_bins(); }
    double density(int bin) const { return double(counts[bin]) / (double(total) * bin_width()); }
    std::vector<double> densities() const;
    double tau() const;
};

RescaledHistogram snapshot_histogram(const WalkerPopulation& pop, int n_bins = RescaledHistogram::kDefaultBins);

} // namespace ctrw
