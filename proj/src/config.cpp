#include "ctrw/config.hpp"

#include "ctrw/errors.hpp"
#include "ctrw/metrics.hpp"
#include "ctrw/pde.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace ctrw
{

using nlohmann::json;

namespace
{

std::string join(const std::vector<std::string>& items)
{
    std::string out = "invalid configuration:";
    for (const auto& s : items)
    {
        out += "\n  - " + s;
    }
    return out;
}

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v)
{
    j[key] = v ? json(*v) : json(nullptr);
}

json to_json(const PerturbationConfig& g)
{
    return {{"name", g.name}, {"exponent", g.exponent}, {"support", g.support}, {"amplitude", g.amplitude}};
}

json to_json(const RateConfig& r)
{
    json j{{"kind", r.kind}, {"mu", r.mu}};
    put_optional(j, "alpha", r.alpha);
    put_optional(j, "K", r.K);
    j["g"] = r.g ? to_json(*r.g) : json(nullptr);
    return j;
}

json to_json(const FitConfig& f)
{
    json j{{"enabled", f.enabled}, {"auto_window", f.auto_window}};
    put_optional(j, "window_lo", f.window_lo);
    put_optional(j, "window_hi", f.window_hi);
    put_optional(j, "fixed_C", f.fixed_C);
    put_optional(j, "fixed_C_if_windowed", f.fixed_C_if_windowed);
    put_optional(j, "fixed_lambda", f.fixed_lambda);
    return j;
}

json to_json(const ExperimentConfig& c)
{
    return {{"name", c.name},
            {"rate", to_json(c.rate)},
            {"engine", c.engine},
            {"n_walkers", c.n_walkers},
            {"n_cells", c.n_cells},
            {"seed", c.seed},
            {"replicas", c.replicas},
            {"tau_max", c.tau_max},
            {"snapshot_dtau", c.snapshot_dtau},
            {"initial", c.initial},
            {"bins", c.bins},
            {"variables", c.variables},
            {"entropy", c.entropy},
            {"dissipation", c.dissipation},
            {"histograms", c.histograms},
            {"unconditional_first_jump", c.unconditional_first_jump},
            {"fit", to_json(c.fit)},
            {"bounds", json{{"H0", c.bounds.H0}, {"K", c.bounds.K}}},
            {"output_dir", c.output_dir}};
}

// Reads known keys, recording type errors and unknown keys as violations.
class Reader
{
public:
    Reader(const json& j, std::string path, std::vector<std::string>& errors) : j_(j), path_(std::move(path)), errors_(errors)
    {
        if (!j_.is_object())
        {
            errors_.push_back(path_ + ": expected an object");
        }
    }

    template <class T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key))
        {
            return;
        }
        read(key, out);
    }

    template <class T>
    void get(const char* key, std::optional<T>& out)
    {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key) || j_.at(key).is_null())
        {
            return;
        }
        T value{};
        if (read(key, value))
        {
            out = value;
        }
    }

    const json* child(const char* key)
    {
        seen_.insert(key);
        if (!j_.is_object() || !j_.contains(key) || j_.at(key).is_null())
        {
            return nullptr;
        }
        return &j_.at(key);
    }

    void finish()
    {
        if (!j_.is_object())
        {
            return;
        }
        for (const auto& item : j_.items())
        {
            if (!seen_.count(item.key()))
            {
                errors_.push_back(path_ + item.key() + ": unknown key");
            }
        }
    }

private:
    // The library converts 1.5 to an integer silently; integer fields must hold integers.
    template <class T>
    bool read(const char* key, T& out)
    {
        const json& v = j_.at(key);
        bool ok = true;
        if constexpr (std::is_same_v<T, bool>)
        {
            ok = v.is_boolean();
        }
        else if constexpr (std::is_unsigned_v<T>)
        {
            ok = v.is_number_unsigned();
        }
        else if constexpr (std::is_integral_v<T>)
        {
            ok = v.is_number_integer();
        }
        else if constexpr (std::is_floating_point_v<T>)
        {
            ok = v.is_number();
        }
        else
        {
            ok = v.is_string();
        }
        if (ok)
        {
            try
            {
                out = v.get<T>();
                return true;
            }
            catch (const json::exception&)
            {
            }
        }
        errors_.push_back(path_ + key + ": wrong type");
        return false;
    }

    const json& j_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

bool writable_directory(const std::string& dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
    {
        return false;
    }
    const fs::path probe = fs::path(dir) / ".write_probe";
    {
        std::ofstream f(probe);
        if (!f)
        {
            return false;
        }
    }
    fs::remove(probe, ec);
    return true;
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument(join(violations)), violations_(std::move(violations))
{
}

JumpRateModel RateConfig::build() const
{
    if (kind == "reference")
    {
        return JumpRateModel::reference(mu);
    }
    Perturbation p;
    if (g)
    {
        if (g->name == "power_tail")
        {
            p = power_tail(g->exponent, g->amplitude);
        }
        else if (g->name == "compact_bump")
        {
            p = compact_bump(g->support, g->amplitude);
        }
        else
        {
            throw ParameterError("unknown perturbation '" + g->name + "'");
        }
    }
    else if (alpha)
    {
        p = power_tail(1.0 + *alpha);
    }
    else
    {
        throw ParameterError("rate kind '" + kind + "' needs g or alpha");
    }
    if (K)
    {
        p.tail_K = *K;
    }
    if (kind == "perturbed")
    {
        return JumpRateModel::perturbed(mu, std::move(p));
    }
    if (kind == "custom")
    {
        const double m = mu;
        auto gf = p.g;
        return JumpRateModel::custom(
            mu, [m, gf](double a) { return m / (1.0 + a) + gf(a); }, "custom:" + p.label);
    }
    throw ParameterError("unknown rate kind '" + kind + "'");
}

std::vector<std::string> ExperimentConfig::violations() const
{
    std::vector<std::string> v;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok)
        {
            v.push_back(what);
        }
    };
    check(!name.empty(), "name: must be non-empty");
    check(rate.kind == "reference" || rate.kind == "perturbed" || rate.kind == "custom",
          "rate.kind: expected reference|perturbed|custom");
    check(rate.mu > 0.0 && rate.mu <= 1.0, "rate.mu: must lie in (0, 1]");
    check(!rate.alpha || *rate.alpha > 0.0, "rate.alpha: must be positive");
    check(!rate.K || *rate.K > 0.0, "rate.K: must be positive");
    if (rate.kind != "reference")
    {
        check(rate.g.has_value() || rate.alpha.has_value(), "rate: perturbed/custom kinds need g or alpha");
    }
    if (rate.g)
    {
        check(rate.g->name == "power_tail" || rate.g->name == "compact_bump",
              "rate.g.name: expected power_tail|compact_bump");
        check(rate.g->name != "power_tail" || rate.g->exponent > 1.0, "rate.g.exponent: must exceed 1");
        check(rate.g->name != "compact_bump" || rate.g->support > 0.0, "rate.g.support: must be positive");
        check(std::isfinite(rate.g->amplitude), "rate.g.amplitude: must be finite");
    }
    check(engine == "montecarlo" || engine == "pde" || engine == "both", "engine: expected montecarlo|pde|both");
    check(n_walkers >= 1 && n_walkers <= (std::uint64_t(1) << 32), "n_walkers: must lie in [1, 2^32]");
    check(n_cells >= 8, "n_cells: must be at least 8");
    check(replicas >= 1 && replicas <= 1000, "replicas: must lie in [1, 1000]");
    check(std::isfinite(tau_max) && tau_max > 0.0 && tau_max <= 40.0, "tau_max: must lie in (0, 40]");
    check(std::isfinite(snapshot_dtau) && snapshot_dtau > 0.0 && snapshot_dtau <= tau_max,
          "snapshot_dtau: must lie in (0, tau_max]");
    check(initial == "dirac" || initial == "uniform", "initial: expected dirac|uniform");
    check(bins >= 1 && bins <= (1 << 20), "bins: must lie in [1, 2^20]");
    check(variables == "natural" || variables == "rescaled", "variables: expected natural|rescaled");
    check(entropy == "abs" || entropy == "kullback", "entropy: expected abs|kullback");
    if (fit.window_lo && fit.window_hi)
    {
        check(*fit.window_lo < *fit.window_hi, "fit.window: lo must be below hi");
    }
    check(!fit.fixed_C || std::isfinite(*fit.fixed_C), "fit.fixed_C: must be finite");
    check(!fit.fixed_lambda || (*fit.fixed_lambda > 0.0 && *fit.fixed_lambda < 1.0),
          "fit.fixed_lambda: must lie in (0, 1)");
    check(bounds.H0 >= 0.0 && std::isfinite(bounds.H0), "bounds.H0: must be finite and >= 0");
    check(bounds.K >= 0.0 && std::isfinite(bounds.K), "bounds.K: must be finite and >= 0");
    check(!output_dir.empty() && writable_directory(output_dir), "output_dir: not a writable directory");
    return v;
}

void ExperimentConfig::validate() const
{
    auto v = violations();
    if (!v.empty())
    {
        throw ValidationError(std::move(v));
    }
}

std::string to_json_string(const ExperimentConfig& config)
{
    return to_json(config).dump(2);
}

ExperimentConfig config_from_json_string(const std::string& text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ValidationError({std::string("not valid JSON: ") + e.what()});
    }
    std::vector<std::string> errors;
    ExperimentConfig c;
    Reader top(j, "", errors);
    top.get("name", c.name);
    if (const json* r = top.child("rate"))
    {
        Reader rr(*r, "rate.", errors);
        rr.get("kind", c.rate.kind);
        rr.get("mu", c.rate.mu);
        rr.get("alpha", c.rate.alpha);
        rr.get("K", c.rate.K);
        if (const json* g = rr.child("g"))
        {
            PerturbationConfig pc;
            Reader gr(*g, "rate.g.", errors);
            gr.get("name", pc.name);
            gr.get("exponent", pc.exponent);
            gr.get("support", pc.support);
            gr.get("amplitude", pc.amplitude);
            gr.finish();
            c.rate.g = pc;
        }
        rr.finish();
    }
    top.get("engine", c.engine);
    top.get("n_walkers", c.n_walkers);
    top.get("n_cells", c.n_cells);
    top.get("seed", c.seed);
    top.get("replicas", c.replicas);
    top.get("tau_max", c.tau_max);
    top.get("snapshot_dtau", c.snapshot_dtau);
    top.get("initial", c.initial);
    top.get("bins", c.bins);
    top.get("variables", c.variables);
    top.get("entropy", c.entropy);
    top.get("dissipation", c.dissipation);
    top.get("histograms", c.histograms);
    top.get("unconditional_first_jump", c.unconditional_first_jump);
    if (const json* f = top.child("fit"))
    {
        Reader fr(*f, "fit.", errors);
        fr.get("enabled", c.fit.enabled);
        fr.get("window_lo", c.fit.window_lo);
        fr.get("window_hi", c.fit.window_hi);
        fr.get("auto_window", c.fit.auto_window);
        fr.get("fixed_C", c.fit.fixed_C);
        fr.get("fixed_C_if_windowed", c.fit.fixed_C_if_windowed);
        fr.get("fixed_lambda", c.fit.fixed_lambda);
        fr.finish();
    }
    if (const json* b = top.child("bounds"))
    {
        Reader br(*b, "bounds.", errors);
        br.get("H0", c.bounds.H0);
        br.get("K", c.bounds.K);
        br.finish();
    }
    top.get("output_dir", c.output_dir);
    top.finish();
    if (!errors.empty())
    {
        throw ValidationError(std::move(errors));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ValidationError({"cannot read config file '" + path + "'"});
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_string(ss.str());
}

std::uint64_t config_hash(const ExperimentConfig& config)
{
    const std::string s = to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

InitialCondition initial_condition_from_string(const std::string& name)
{
    if (name == "dirac")
    {
        return InitialCondition::dirac();
    }
    if (name == "uniform")
    {
        return InitialCondition::uniform();
    }
    throw ParameterError("unknown initial condition '" + name + "' (expected dirac|uniform)");
}

} // namespace ctrw
