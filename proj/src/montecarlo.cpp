#include "ctrw/montecarlo.hpp"

#include "ctrw/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctrw
{

std::string to_string(InitialKind kind)
{
    switch (kind)
    {
    case InitialKind::DiracAtZero:
        return "dirac";
    case InitialKind::UniformUnit:
        return "uniform";
    case InitialKind::Custom:
        return "custom";
    }
    return "dirac";
}

InitialKind initial_kind_from_string(const std::string& name)
{
    if (name == "dirac")
    {
        return InitialKind::DiracAtZero;
    }
    if (name == "uniform")
    {
        return InitialKind::UniformUnit;
    }
    if (name == "custom")
    {
        return InitialKind::Custom;
    }
    throw ParameterError("unknown initial condition '" + name + "' (expected dirac|uniform|custom)");
}

double sample_waiting_time(const JumpRateModel& model, double age0, double u)
{
    if (!(u > 0.0 && u < 1.0))
    {
        throw DomainError("sample_waiting_time requires u in (0, 1)");
    }
    if (!(age0 >= 0.0) || !std::isfinite(age0))
    {
        throw DomainError("sample_waiting_time requires a finite age0 >= 0");
    }
    const double target = -std::log(u);
    if (model.kind() == RateKind::Reference)
    {
        return (1.0 + age0) * std::expm1(target / model.mu());
    }

    // Geometric bracket [hi/4, hi] around the root keeps the tolerance relative.
    double hi = 1e-6 * (1.0 + age0);
    while (model.hazard_increment(age0, hi) < target)
    {
        hi *= 4.0;
        if (hi > 1e300)
        {
            throw NumericError("sample_waiting_time: hazard does not reach target", hi, hi);
        }
    }
    const double lo = hi == 1e-6 * (1.0 + age0) ? 0.0 : 0.25 * hi;
    return numerics::find_root([&](double s) { return model.hazard_increment(age0, s) - target; }, lo, hi,
                               1e-14 * hi);
}

double never_jumped_probability(const JumpRateModel& model, const InitialCondition& ic, double t,
                                bool unconditional_first_jump)
{
    if (!(t >= 0.0))
    {
        throw DomainError("never_jumped_probability requires t >= 0");
    }
    if (unconditional_first_jump || ic.kind == InitialKind::DiracAtZero)
    {
        return model.survival(0.0, t);
    }
    if (ic.kind == InitialKind::UniformUnit)
    {
        return numerics::integrate_adaptive([&](double a) { return model.survival(a, t); }, 0.0, 1.0, 1e-13).value;
    }
    throw ParameterError("never_jumped_probability is not available for custom initial data");
}

WalkerPopulation::WalkerPopulation(std::size_t n, const InitialCondition& ic, JumpRateModel model,
                                   PopulationOptions options)
    : model_(std::move(model)), options_(std::move(options)), reference_(model_.kind() == RateKind::Reference),
      inv_mu_(1.0 / model_.mu())
{
    if (n == 0 || n > std::numeric_limits<std::uint32_t>::max())
    {
        throw ParameterError("population size must be in [1, 2^32)");
    }
    if (ic.kind == InitialKind::Custom && !ic.custom_sampler)
    {
        throw ParameterError("custom initial condition needs a sampler");
    }
    last_jump_.resize(n);
    first_birth_.resize(n);
    never_jumped_.assign(n, 1);
    counters_.assign(n, 0);
    heap_.resize(n);
    never_jumped_count_ = n;

    for (std::uint32_t w = 0; w < n; ++w)
    {
        numerics::RandomStream stream(options_.seed, numerics::walker_stream(options_.replica, w));
        double a0 = 0.0;
        if (ic.kind == InitialKind::UniformUnit)
        {
            a0 = stream.uniform();
        }
        else if (ic.kind == InitialKind::Custom)
        {
            a0 = ic.custom_sampler(stream);
            if (!(a0 >= 0.0 && a0 < 1.0))
            {
                throw DomainError("custom initial sampler returned an age outside [0, 1)");
            }
        }
        counters_[w] = stream.counter();
        last_jump_[w] = -a0;
        first_birth_[w] = -a0;
        const double age_for_draw = options_.unconditional_first_jump ? 0.0 : a0;
        heap_[w] = Event{draw_waiting_time(w, age_for_draw), w};
    }
    build_heap();
}

double WalkerPopulation::draw_waiting_time(std::uint32_t walker, double age0)
{
    const double u =
        numerics::uniform_at(options_.seed, numerics::walker_stream(options_.replica, walker), counters_[walker]++);
    if (options_.waiting_time_override)
    {
        return options_.waiting_time_override(walker, age0, u);
    }
    if (reference_ && age0 == 0.0)
    {
        return std::expm1(-std::log(u) * inv_mu_);
    }
    return sample_waiting_time(model_, age0, u);
}

void WalkerPopulation::sift_down(std::size_t pos)
{
    const std::size_t n = heap_.size();
    const Event moving = heap_[pos];
    while (true)
    {
        std::size_t child = 2 * pos + 1;
        if (child >= n)
        {
            break;
        }
        if (child + 1 < n && heap_[child + 1].time < heap_[child].time)
        {
            ++child;
        }
        if (!(heap_[child].time < moving.time))
        {
            break;
        }
        heap_[pos] = heap_[child];
        pos = child;
    }
    heap_[pos] = moving;
}

void WalkerPopulation::build_heap()
{
    for (std::size_t i = heap_.size() / 2; i-- > 0;)
    {
        sift_down(i);
    }
}

void WalkerPopulation::advance_to(double t_target)
{
    if (!(t_target >= clock_))
    {
        throw ParameterError("advance_to cannot move the clock backwards");
    }
    while (heap_.front().time <= t_target)
    {
        Event& top = heap_.front();
        const std::uint32_t w = top.walker;
        const double now = top.time;
        if (event_sink_)
        {
            event_sink_->push_back(now);
        }
        last_jump_[w] = now;
        if (never_jumped_[w])
        {
            never_jumped_[w] = 0;
            --never_jumped_count_;
        }
        // Replace-top: the walker's next event overwrites the root, one sift.
        top.time = now + draw_waiting_time(w, 0.0);
        sift_down(0);
        ++events_processed_;
    }
    clock_ = t_target;
}

WalkerPopulation init_population(std::size_t n, const InitialCondition& ic, const JumpRateModel& model,
                                 std::uint64_t seed, std::uint64_t replica)
{
    PopulationOptions options;
    options.seed = seed;
    options.replica = replica;
    return WalkerPopulation(n, ic, model, options);
}

std::vector<double> RescaledHistogram::densities() const
{
    std::vector<double> out(counts.size());
    for (int i = 0; i < n_bins(); ++i)
    {
        out[i] = density(i);
    }
    return out;
}

double RescaledHistogram::tau() const
{
    return std::log1p(clock);
}

RescaledHistogram snapshot_histogram(const WalkerPopulation& pop, int n_bins)
{
    if (n_bins < 2)
    {
        throw ParameterError("snapshot_histogram needs at least 2 bins");
    }
    RescaledHistogram hist;
    hist.counts.assign(n_bins, 0);
    hist.total = pop.size();
    hist.clock = pop.clock();
    const double scale = double(n_bins) / (1.0 + pop.clock());
    for (std::size_t w = 0; w < pop.size(); ++w)
    {
        const double age = pop.age(w);
        auto bin = static_cast<long long>(age * scale);
        if (bin >= n_bins || age < 0.0)
        {
            // Only a never-jumped walker with initial age just below 1 can
            // round onto b = 1; anything else is a bookkeeping bug.
            if (!pop.never_jumped(w) || age < 0.0 || age > (1.0 + pop.clock()) * (1.0 + 1e-12))
            {
                throw std::logic_error("rescaled age outside [0, 1): event bookkeeping is inconsistent");
            }
            bin = n_bins - 1;
        }
        ++hist.counts[bin];
    }
    return hist;
}

} // namespace ctrw
