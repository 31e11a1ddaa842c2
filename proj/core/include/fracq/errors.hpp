#ifndef FRACQ_ERRORS_HPP
#define FRACQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fracq {

// Invalid argument or configuration value.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Requested evaluation exceeds the working-precision ceiling. Carries the
// largest argument that stays within budget for the offending parameters.
class precision_error : public std::runtime_error {
public:
    precision_error(const std::string& msg, double admissible_x_max)
        : std::runtime_error(msg), admissible_x_max_(admissible_x_max) {}
    double admissible_x_max() const noexcept { return admissible_x_max_; }

private:
    double admissible_x_max_;
};

// Operation requires a stable queue (rho < 1).
class stability_error : public std::runtime_error {
public:
    explicit stability_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (eigensolver non-convergence, singular system, ...).
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A Monte Carlo sampler backend failed its startup moment-validation gate.
class sampler_gate_error : public std::runtime_error {
public:
    explicit sampler_gate_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace fracq

#endif
