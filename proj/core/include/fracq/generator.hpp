#ifndef FRACQ_GENERATOR_HPP
#define FRACQ_GENERATOR_HPP

#include <cstddef>
#include <vector>

#include "fracq/errors.hpp"
#include "fracq/transient_table.hpp"

namespace fracq::generator {

// Arrival/service rates with derived traffic intensity rho = lambda/mu and
// decay constant kappa = mu - lambda.
struct QueueParams {
    double lambda;
    double mu;

    QueueParams(double lambda_, double mu_);
    double rho() const { return lambda / mu; }
    double kappa() const { return mu - lambda; }
    bool stable() const { return rho() < 1.0; }
};

// Truncated birth-death rate matrix A acting on column probability vectors,
// dp/dt = A p. Stored bands: sub[i] = A[i+1][i] (birth rate lambda feeding
// state i+1 from i), super[i] = A[i][i+1] (service rate mu feeding state i
// from i+1). The conservative truncation disables births out of n_max so
// every column sums to zero; the literal variant keeps the untruncated
// -(lambda+mu) diagonal at n = 0, which loses probability and exists only for
// the consistency report.
struct TruncatedGenerator {
    std::size_t n_max = 0;
    std::vector<double> sub;   // length n_max, values lambda
    std::vector<double> diag;  // length n_max + 1
    std::vector<double> super; // length n_max, values mu
    bool literal_boundary = false;
};

TruncatedGenerator build_generator(const QueueParams& params, std::size_t n_max,
                                   bool literal_boundary = false);

// Eigen-decomposition of the generator mapped to initial state delta_{n0}:
// p_n(t) = sum_j init_weights[j][n] * kernel(-eigenvalues[j], t).
// Eigenvalues are sorted descending, so eigenvalues[0] ~ 0.
struct SpectralDecomposition {
    std::size_t n_max = 0;
    std::vector<double> eigenvalues;                // all <= 0 (up to roundoff)
    std::vector<std::vector<double>> init_weights;  // [j][n]
};

SpectralDecomposition spectral_decompose(const TruncatedGenerator& gen, const QueueParams& params);

struct StationaryDist {
    std::vector<double> probs; // renormalized over {0..n_max}
    double tail_mass;          // rho^{n_max+1}, mass beyond the truncation
};

// Geometric stationary law (1-rho) rho^n renormalized to the truncated
// support. Requires rho < 1.
StationaryDist stationary_dist(const QueueParams& params, std::size_t n_max);

// Uniformization (randomization) solution of the truncated forward system
// with initial state delta_{n0}; Poisson series truncated below 1e-13 tail
// mass per time point. This is the deterministic reference all other routes
// are compared against.
TransientTable classical_transient_oracle(const QueueParams& params, std::size_t n_max,
                                          const std::vector<double>& times);

namespace detail {
// Implicit-shift QL eigensolver for a symmetric tridiagonal matrix.
// d: diagonal (length n), e: off-diagonal (length n, e[n-1] scratch).
// On return d holds eigenvalues ascending and z the orthonormal eigenvector
// matrix with z[j][k] = component j of the eigenvector for d[k].
void tridiag_ql(std::vector<double>& d, std::vector<double>& e,
                std::vector<std::vector<double>>& z);
} // namespace detail

} // namespace fracq::generator

#endif
