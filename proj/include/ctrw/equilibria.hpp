#pragma once

#include "ctrw/numerics.hpp"
#include "ctrw/rates.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <utility>

namespace ctrw
{

/// Evaluator for the limit profile W_inf(b) = c_inf b^-mu (1-b)^(mu-1), the
/// pseudo-equilibrium W(tau, b) = C(tau) e^{-B(e^tau b)} (1-b)^(mu-1) and the
/// natural-variable profiles N(t, a), N_inf(t, a).
///
/// Copies share the C(tau) memo, which is safe for concurrent use.
class EquilibriumHandle
{
public:
    explicit EquilibriumHandle(JumpRateModel model, double abs_tol = 1e-12);

    const JumpRateModel& model() const { return model_; }
    double mu() const { return model_.mu(); }

    /// sin(pi mu)/pi; zero when mu = 1 (no integrable limit profile).
    double c_infinity() const { return c_infinity_; }
    /// 1 / int_0^1 b^-mu (1-b)^(mu-1) db, by quadrature.
    double c_infinity_quadrature() const;

    double w_infinity(double b) const;
    double w_infinity(double b, double one_minus_b) const;

    double pseudo_equilibrium(double tau, double b) const;
    double pseudo_equilibrium(double tau, double b, double one_minus_b) const;

    /// C(tau), normalising W(tau, .) to unit mass.
    double normalizer_C(double tau) const;
    /// c(tau) = e^{-mu tau} C(tau); stays O(1) as tau grows.
    double scaled_normalizer(double tau) const;

    /// C(tau) delta(tau) = int_0^1 [e^tau b beta(e^tau b) - mu] W(tau, b) db.
    double c_delta(double tau) const;
    double delta(double tau) const;

    /// (N(t, a), N_inf(t, a)) with N(t, a) = e^{-tau} W(tau, a/(1+t)), tau = ln(1+t).
    std::pair<double, double> natural_profiles(double t, double a) const;

    /// int_lo^hi W(tau, b) db for 0 <= lo < hi <= 1.
    double integral_W(double tau, double lo, double hi) const;
    double integral_W_infinity(double lo, double hi) const;
    /// int_lo^hi e^tau beta(e^tau b) W(tau, b) db.
    double integral_renewal_weight(double tau, double lo, double hi) const;

    /// ||W(tau, .) - W_inf||_1 by quadrature split at the sign changes.
    double l1_pseudo_to_limit(double tau) const;

    numerics::SingularQuadratureSpec w_spec() const;
    numerics::SingularQuadratureSpec w_infinity_spec() const;

private:
    struct Memo
    {
        std::shared_mutex mutex;
        std::map<double, double> scaled_normalizer;
    };

    double compute_scaled_normalizer(double tau) const;
    double unnormalised_shape(double tau, double b, double one_minus_b) const;
    void require_limit_profile() const;

    JumpRateModel model_;
    double abs_tol_;
    double c_infinity_;
    std::shared_ptr<Memo> memo_;
};

} // namespace ctrw
