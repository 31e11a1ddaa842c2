#include <doctest.h>

#include <cmath>
#include <numeric>

#include <fracq/generator.hpp>
#include <fracq/mc.hpp>

using namespace fracq;
using namespace fracq::generator;

namespace {

// Column sums of the banded matrix A (dp/dt = A p).
std::vector<double> column_sums_of(const TruncatedGenerator& g) {
    const std::size_t n = g.n_max + 1;
    std::vector<double> sums(n, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
        sums[col] += g.diag[col];
        if (col < g.n_max) sums[col] += g.sub[col];      // A[col+1][col]
        if (col > 0) sums[col] += g.super[col - 1];      // A[col-1][col]
    }
    return sums;
}

} // namespace

TEST_CASE("QueueParams validation and derived quantities") {
    const QueueParams q(0.8, 1.0);
    CHECK(q.rho() == doctest::Approx(0.8));
    CHECK(q.kappa() == doctest::Approx(0.2));
    CHECK(q.stable());
    CHECK(!QueueParams(2.0, 1.0).stable());
    CHECK_THROWS_AS(QueueParams(0.0, 1.0), parameter_error);
    CHECK_THROWS_AS(QueueParams(1.0, -1.0), parameter_error);
}

TEST_CASE("build_generator: reference values and conservation") {
    const TruncatedGenerator g = build_generator(QueueParams(0.8, 1.0), 2);
    REQUIRE(g.diag.size() == 3);
    CHECK(g.diag[0] == doctest::Approx(-0.8));
    CHECK(g.diag[1] == doctest::Approx(-1.8));
    CHECK(g.diag[2] == doctest::Approx(-1.0));
    for (double v : g.sub) CHECK(v == 0.8);
    for (double v : g.super) CHECK(v == 1.0);
    for (double s : column_sums_of(g)) CHECK(std::fabs(s) < 1e-15);

    const TruncatedGenerator eq = build_generator(QueueParams(1.3, 1.3), 4);
    CHECK(eq.diag[0] == doctest::Approx(-1.3));
    CHECK(eq.diag[1] == doctest::Approx(-2.6));

    mc::Stream rng(12, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const QueueParams q(0.1 + 3.0 * rng.next_double(), 0.1 + 3.0 * rng.next_double());
        const std::size_t n_max = 2 + static_cast<std::size_t>(rng.next_double() * 40);
        for (double s : column_sums_of(build_generator(q, n_max)))
            CHECK(std::fabs(s) < 1e-14);
    }

    CHECK_THROWS_AS(build_generator(QueueParams(1.0, 1.0), 1), parameter_error);
}

TEST_CASE("build_generator: literal boundary loses probability at n = 0") {
    const TruncatedGenerator g = build_generator(QueueParams(0.8, 1.0), 3, true);
    CHECK(g.diag[0] == doctest::Approx(-1.8));
    CHECK(column_sums_of(g)[0] == doctest::Approx(-1.0)); // -mu leaks out
}

TEST_CASE("tridiag_ql: analytic 2x2 and orthogonality") {
    std::vector<double> d{-1.0, -1.0};
    std::vector<double> e{1.0, 0.0};
    std::vector<std::vector<double>> z;
    detail::tridiag_ql(d, e, z);
    CHECK(d[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(0.0).epsilon(1e-14));

    // random symmetric tridiagonal: eigenvector matrix must be orthonormal
    mc::Stream rng(5, 5);
    const std::size_t n = 24;
    std::vector<double> dd(n), ee(n);
    for (std::size_t i = 0; i < n; ++i) {
        dd[i] = 2.0 * rng.next_double() - 1.0;
        ee[i] = rng.next_double();
    }
    std::vector<double> d0 = dd, e0 = ee;
    detail::tridiag_ql(dd, ee, z);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r) dot += z[r][a] * z[r][b];
            CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
        // residual || T v - lambda v ||
        for (std::size_t r = 0; r < n; ++r) {
            double tv = d0[r] * z[r][a];
            if (r > 0) tv += e0[r - 1] * z[r - 1][a];
            if (r + 1 < n) tv += e0[r] * z[r + 1][a];
            CHECK(std::fabs(tv - dd[a] * z[r][a]) < 1e-12);
        }
    }
}

TEST_CASE("spectral_decompose: zero mode, range, reconstruction") {
    const QueueParams q(0.8, 1.0);
    const SpectralDecomposition dec = spectral_decompose(build_generator(q, 35), q);

    CHECK(std::fabs(dec.eigenvalues[0]) < 1e-10);
    for (double ev : dec.eigenvalues) CHECK(ev < 1e-10);

    // delta reconstruction at t = 0: sum_j w_j[n] = delta_{n0}
    for (std::size_t n = 0; n <= 35; ++n) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= 35; ++j) acc += dec.init_weights[j][n];
        CHECK(std::fabs(acc - (n == 0 ? 1.0 : 0.0)) < 1e-10);
    }

    // spectral bound for the large truncation
    const SpectralDecomposition big = spectral_decompose(build_generator(q, 200), q);
    const double bound = -(q.lambda + q.mu + 2.0 * std::sqrt(q.lambda * q.mu));
    for (double ev : big.eigenvalues) CHECK(ev > bound - 1e-9);

    // zero-mode weights are proportional to the stationary distribution
    const StationaryDist pi = stationary_dist(q, 35);
    const double ratio0 = dec.init_weights[0][0] / pi.probs[0];
    for (std::size_t n = 1; n <= 35; ++n)
        CHECK(dec.init_weights[0][n] / pi.probs[n] == doctest::Approx(ratio0).epsilon(1e-9));
}

TEST_CASE("stationary_dist: geometric law, tail mass, detailed balance") {
    const QueueParams q(0.8, 1.0);
    const StationaryDist pi = stationary_dist(q, 35);
    REQUIRE(pi.probs.size() == 36);

    const double sum = std::accumulate(pi.probs.begin(), pi.probs.end(), 0.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pi.tail_mass == doctest::Approx(std::pow(0.8, 36)).epsilon(1e-12));

    // un-renormalized reference values pi_0 = 0.2, pi_1 = 0.16
    const double mass = 1.0 - std::pow(0.8, 36);
    CHECK(pi.probs[0] * mass == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(pi.probs[1] * mass == doctest::Approx(0.16).epsilon(1e-12));

    // detailed balance pi_n lambda = pi_{n+1} mu
    for (std::size_t n = 0; n < 35; ++n)
        CHECK(pi.probs[n] * q.lambda == doctest::Approx(pi.probs[n + 1] * q.mu).epsilon(1e-13));

    const StationaryDist small = stationary_dist(QueueParams(1e-9, 1.0), 10);
    CHECK(small.probs[0] == doctest::Approx(1.0).epsilon(1e-8));

    CHECK_THROWS_AS(stationary_dist(QueueParams(1.0, 1.0), 10), stability_error);
    CHECK_THROWS_AS(stationary_dist(QueueParams(1.5, 1.0), 10), stability_error);
}

TEST_CASE("classical_transient_oracle: delta start, conservation, spectral agreement") {
    const QueueParams q(0.8, 1.0);
    std::vector<double> times{0.0, 0.5, 2.0, 8.0};
    const TransientTable tab = classical_transient_oracle(q, 35, times);

    CHECK(tab.probs[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t n = 1; n <= 35; ++n) CHECK(tab.probs[0][n] == 0.0);
    for (double s : tab.column_sums) CHECK(std::fabs(s - 1.0) < 1e-12);

    // against the spectral-exponential reconstruction
    const SpectralDecomposition dec = spectral_decompose(build_generator(q, 35), q);
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t n = 0; n <= 35; ++n) {
            double p = 0.0;
            for (std::size_t j = 0; j <= 35; ++j)
                p += dec.init_weights[j][n] * std::exp(dec.eigenvalues[j] * times[i]);
            CHECK(std::fabs(p - tab.probs[i][n]) < 1e-8);
        }
    }

    CHECK_THROWS_AS(classical_transient_oracle(q, 35, {1.0, 0.5}), parameter_error);
    CHECK_THROWS_AS(classical_transient_oracle(q, 35, {-1.0}), parameter_error);
}
