#include "fracq/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fracq::generator {

QueueParams::QueueParams(double lambda_, double mu_) : lambda(lambda_), mu(mu_) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw parameter_error("QueueParams: lambda must be > 0");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw parameter_error("QueueParams: mu must be > 0");
}

TruncatedGenerator build_generator(const QueueParams& params, std::size_t n_max,
                                   bool literal_boundary) {
    if (n_max < 2) throw parameter_error("build_generator: n_max must be >= 2");
    TruncatedGenerator g;
    g.n_max = n_max;
    g.literal_boundary = literal_boundary;
    g.sub.assign(n_max, params.lambda);
    g.super.assign(n_max, params.mu);
    g.diag.assign(n_max + 1, -(params.lambda + params.mu));
    g.diag[0] = literal_boundary ? -(params.lambda + params.mu) : -params.lambda;
    g.diag[n_max] = -params.mu; // births disabled at the truncation boundary
    return g;
}

SpectralDecomposition spectral_decompose(const TruncatedGenerator& gen,
                                         const QueueParams& params) {
    const std::size_t n = gen.n_max + 1;
    // Similarity transform with D = diag(rho^{n/2}) symmetrizes the
    // birth-death matrix: off-diagonals become sqrt(lambda mu).
    std::vector<double> d = gen.diag;
    std::vector<double> e(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = std::sqrt(gen.sub[i] * gen.super[i]);

    std::vector<std::vector<double>> z;
    detail::tridiag_ql(d, e, z);

    const double half_log_rho = 0.5 * std::log(params.rho());
    SpectralDecomposition out;
    out.n_max = gen.n_max;
    out.eigenvalues.resize(n);
    out.init_weights.assign(n, std::vector<double>(n, 0.0));
    // QL sorts ascending; expose descending so eigenvalue 0 comes first.
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t col = n - 1 - j;
        out.eigenvalues[j] = d[col];
        for (std::size_t row = 0; row < n; ++row) {
            const double scale = std::exp(half_log_rho * static_cast<double>(row));
            out.init_weights[j][row] = z[row][col] * z[0][col] * scale;
        }
    }
    return out;
}

StationaryDist stationary_dist(const QueueParams& params, std::size_t n_max) {
    const double rho = params.rho();
    if (!(rho < 1.0))
        throw stability_error("stationary_dist: requires rho < 1 (rho = " + std::to_string(rho) +
                              ")");
    StationaryDist out;
    out.probs.resize(n_max + 1);
    double mass = 0.0;
    double p = 1.0 - rho;
    for (std::size_t k = 0; k <= n_max; ++k) {
        out.probs[k] = p;
        mass += p;
        p *= rho;
    }
    out.tail_mass = std::pow(rho, static_cast<double>(n_max) + 1.0);
    for (double& v : out.probs) v /= mass;
    return out;
}

namespace {

// Poisson weights exp(-m) m^k / k! for k in [0, k_hi], with k_hi chosen so the
// neglected tail is below `tail_tol`. Started at the mode to stay finite for
// large m, then normalized.
std::vector<double> poisson_weights(double m, double tail_tol, std::size_t& k_hi) {
    if (m <= 0.0) {
        k_hi = 0;
        return {1.0};
    }
    const std::size_t mode = static_cast<std::size_t>(m);
    const double log_wmode =
        -m + static_cast<double>(mode) * std::log(m) - std::lgamma(static_cast<double>(mode) + 1.0);

    // Grow downward to 0 and upward until the unnormalized tail is negligible.
    std::vector<double> up;
    up.push_back(1.0); // relative to the mode weight
    double w = 1.0;
    std::size_t k = mode;
    while (w > tail_tol * 1e-3 || k < mode + 8) {
        ++k;
        w *= m / static_cast<double>(k);
        up.push_back(w);
        if (k > mode + 100000) break;
    }
    k_hi = k;

    std::vector<double> weights(k_hi + 1, 0.0);
    for (std::size_t i = 0; i < up.size(); ++i) weights[mode + i] = up[i];
    w = 1.0;
    for (std::size_t j = mode; j-- > 0;) {
        w *= static_cast<double>(j + 1) / m;
        weights[j] = w;
    }
    const double scale = std::exp(log_wmode);
    double total = 0.0;
    for (double& v : weights) {
        v *= scale;
        total += v;
    }
    // Renormalize the truncated series; keeps column sums exactly 1.
    for (double& v : weights) v /= total;
    return weights;
}

} // namespace

TransientTable classical_transient_oracle(const QueueParams& params, std::size_t n_max,
                                          const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0))
            throw parameter_error("classical_transient_oracle: times must be >= 0");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw parameter_error("classical_transient_oracle: times must be increasing");
    }
    const TruncatedGenerator gen = build_generator(params, n_max);
    const std::size_t n = n_max + 1;
    const double q = params.lambda + params.mu; // uniformization rate

    // P = I + A/q applied to a column vector.
    auto apply_p = [&](const std::vector<double>& v) {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = (1.0 + gen.diag[i] / q) * v[i];
            if (i > 0) acc += (gen.sub[i - 1] / q) * v[i - 1];
            if (i + 1 < n) acc += (gen.super[i] / q) * v[i + 1];
            out[i] = acc;
        }
        return out;
    };

    const double t_max = times.empty() ? 0.0 : times.back();
    std::size_t k_needed = 0;
    poisson_weights(q * t_max, 1e-13, k_needed);

    // Precompute P^k e_0 once; shared across all output times.
    std::vector<std::vector<double>> pk;
    pk.reserve(k_needed + 1);
    std::vector<double> v(n, 0.0);
    v[0] = 1.0;
    pk.push_back(v);
    for (std::size_t k = 1; k <= k_needed; ++k) {
        v = apply_p(v);
        pk.push_back(v);
    }

    TransientTable table;
    table.times = times;
    table.n_max = n_max;
    table.route = Route::ClassicalOracle;
    table.probs.assign(times.size(), std::vector<double>(n, 0.0));
    table.column_sums.assign(times.size(), 0.0);

    for (std::size_t i = 0; i < times.size(); ++i) {
        std::size_t k_hi = 0;
        const std::vector<double> w = poisson_weights(q * times[i], 1e-13, k_hi);
        std::vector<double>& row = table.probs[i];
        for (std::size_t k = 0; k <= k_hi && k < pk.size(); ++k) {
            const double wk = w[k];
            const std::vector<double>& u = pk[k];
            for (std::size_t s = 0; s < n; ++s) row[s] += wk * u[s];
        }
        table.column_sums[i] = std::accumulate(row.begin(), row.end(), 0.0);
    }
    return table;
}

} // namespace fracq::generator
