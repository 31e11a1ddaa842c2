#ifndef FRACQ_SPECFUN_HPP
#define FRACQ_SPECFUN_HPP

#include <cstddef>
#include <variant>
#include <vector>

#include "fracq/errors.hpp"

namespace fracq::specfun {

// Parameter pair (alpha, gamma) of the stretched operator t^{-gamma} D^alpha
// together with the induced Kilbas-Saigo triple (a, m, l) and the stretched
// exponent beta = alpha + gamma.
//
// Admissible range: 0 < alpha <= 1, gamma >= 0, alpha + gamma <= 1.
struct KSParams {
    double alpha;
    double gamma;
    double a;    // = alpha
    double m;    // = 1 + gamma/alpha
    double l;    // = gamma/alpha
    double beta; // = alpha + gamma

    KSParams(double alpha_, double gamma_);
};

struct Exponential {};
struct MittagLeffler {
    double beta; // in (0, 1]
};
struct KilbasSaigo {
    KSParams params;
};

// Relaxation-kernel family: exp(-theta t), E_beta(-theta t^beta), or the
// Kilbas-Saigo kernel E_{a,m,l}(-theta t^{alpha+gamma}).
using KernelKind = std::variant<Exponential, MittagLeffler, KilbasSaigo>;

// Series coefficients c_0..c_n of E_{a,m,l}. `values[k]` is 0 when c_k is not
// representable as a double; `log_values` always carries log(c_k) and
// `log_domain` flags that at least one coefficient under/overflowed.
struct KSCoefficients {
    std::vector<double> values;
    std::vector<double> log_values;
    bool log_domain = false;
};

KSCoefficients ks_coefficients(const KSParams& params, std::size_t n_terms);

// Evaluation statistics, mostly for tests and diagnostics.
struct EvalInfo {
    double raw = 0.0;       // value before clamping to [0, 1]
    int digits = 0;         // working precision used (0 = plain double)
    std::size_t terms = 0;  // series terms summed
};

// E_{a,m,l}(-x) for x >= 0, clamped to [0, 1]. Throws precision_error when the
// alternating-series cancellation budget exceeds the precision ceiling.
double ks_eval(const KSParams& params, double x, EvalInfo* info = nullptr);

// E_beta(-x) for x >= 0; identical to ks_eval with alpha = beta, gamma = 0.
double ml_eval(double beta, double x, EvalInfo* info = nullptr);

// Relaxation kernel value kappa(theta, t) for theta, t >= 0.
double kernel_eval(const KernelKind& kind, double theta, double t);

// Moments m_k = k! c_k of the time-change multiplier Z whose Laplace transform
// is E_{a,m,l}(-x). Returns m_0..m_{k_max} (m_0 = 1).
std::vector<double> ks_moments(const KSParams& params, std::size_t k_max);

// Largest x whose evaluation stays within the precision ceiling.
double admissible_x_max(const KSParams& params);

// Working-precision ceiling in significant decimal digits (default 512, the
// widest rung available; may be lowered at runtime to bound resource use).
int precision_ceiling();
void set_precision_ceiling(int digits); // clamped to [40, 512]

// Hook invoked when a raw series value falls outside [-1e-9, 1+1e-9] before
// clamping; default writes one line to stderr.
using WarningHandler = void (*)(const char* message);
void set_warning_handler(WarningHandler handler);

} // namespace fracq::specfun

#endif
