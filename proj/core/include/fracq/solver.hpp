#ifndef FRACQ_SOLVER_HPP
#define FRACQ_SOLVER_HPP

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fracq/generator.hpp"
#include "fracq/specfun.hpp"
#include "fracq/transient_table.hpp"

namespace fracq::solver {

using generator::QueueParams;

// Spectral kernel-substitution transient: every exponential e^{theta_j t} in
// the eigen-expansion of the classical semigroup is replaced by the relaxation
// kernel kappa(-theta_j, t). For the exponential kernel this reproduces the
// classical solution; for Mittag-Leffler / Kilbas-Saigo kernels it realizes
// the time-change dynamics.
TransientTable transient(const specfun::KernelKind& kind, const QueueParams& params,
                         std::size_t n_max, const std::vector<double>& times);

enum class InversionMethod { Talbot, GaverStehfest };

// Laplace-domain route: solves (s^beta I - A) p~ = s^{beta-1} e_0 on an
// inversion contour and inverts numerically per time point (fixed Talbot by
// default, Gaver-Stehfest as a cross-check). A time at exactly 0 produces the
// exact delta_{n0} column.
TransientTable laplace_symbol_transient(const QueueParams& params, double beta,
                                        std::size_t n_max, const std::vector<double>& times,
                                        InversionMethod method = InversionMethod::Talbot,
                                        int talbot_nodes = 48);

// Root of mu Phi^2 - (s^beta + lambda + mu) Phi + lambda = 0 with |Phi| <= 1,
// selected by modulus test rather than trusting the closed form's branch.
std::complex<double> phi_of_s(std::complex<double> s, const QueueParams& params, double beta);

// Resolvent-style generating function s^{beta-1} / (s^beta + lambda + mu
// - lambda z - mu / z), taken verbatim (no boundary correction at n = 0).
std::complex<double> generating_function(std::complex<double> z, std::complex<double> s,
                                         const QueueParams& params, double beta);

// Literal product-form solution rho^n E_{a,m,l}(-kappa t^{alpha+gamma}).
// Not a probability distribution (columns sum to K(t)/(1-rho)); evaluated
// as written and audited by the consistency report.
double product_form_pn(const QueueParams& params, const specfun::KSParams& ks, std::size_t n,
                       double t);

// Transform-domain companion s^{beta-1} rho^n / Phi(s), evaluated literally.
std::complex<double> product_form_laplace_pn(const QueueParams& params, double beta,
                                             std::size_t n, std::complex<double> s);

// Full table of the product form over a time grid (route ProductForm).
TransientTable product_form_table(const QueueParams& params, const specfun::KSParams& ks,
                                  std::size_t n_max, const std::vector<double>& times);

// Quantifies the agreement between the three fractional solution routes and
// records the structural discrepancies of the underlying formulas.
struct ConsistencyReport {
    std::vector<double> times;
    std::vector<double> sum_spectral_ks;
    std::vector<double> sum_laplace;
    std::vector<double> sum_product;
    std::vector<double> dist_ks_laplace;      // sup_n difference per time
    std::vector<double> dist_ks_product;
    std::vector<double> dist_laplace_product;
    double max_dist_ks_laplace = 0.0;
    double max_dist_ks_product = 0.0;
    double max_dist_laplace_product = 0.0;
    bool product_sum_deviates = false; // any | column sum - 1 | > 1e-3
    bool gamma_is_zero = false;        // spectral-KS == laplace-symbol expected only then

    struct LaplaceSpot {
        double s;
        std::complex<double> route_value;   // p~_0(s) from the resolvent solve
        std::complex<double> formula_value; // s^{beta-1} / Phi(s)
    };
    std::vector<LaplaceSpot> laplace_spots;
    std::vector<std::string> notes;
};

ConsistencyReport consistency_report(const QueueParams& params, const specfun::KSParams& ks,
                                     std::size_t n_max, const std::vector<double>& times);

namespace detail {
// Solves (sbeta I - A) x = rhs e_0 for the tridiagonal generator A.
std::vector<std::complex<double>> resolvent_solve(const generator::TruncatedGenerator& gen,
                                                  std::complex<double> sbeta,
                                                  std::complex<double> rhs);
// Gaver-Stehfest weights for an even number of terms.
std::vector<double> stehfest_weights(int n_terms);
} // namespace detail

} // namespace fracq::solver

#endif
