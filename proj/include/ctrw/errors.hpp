#pragma once

#include <stdexcept>
#include <string>

namespace ctrw
{

// Argument outside the mathematical domain of an operation (negative age,
// b = 1 where a density blows up, u outside (0,1), ...).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Invalid configuration of an operation: CFL violation, grid mismatch,
// missing sign change in a root bracket.
class ParameterError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical procedure did not reach its tolerance. Carries the best
// estimate and the error bound that was achieved.
class NumericError : public std::runtime_error
{
public:
    NumericError(const std::string& what, double best_estimate, double error_bound)
        : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound)
    {
    }

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

} // namespace ctrw
