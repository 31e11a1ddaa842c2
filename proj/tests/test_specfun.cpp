#include <doctest.h>

#include <array>
#include <cmath>
#include <thread>

#include <fracq/mc.hpp>
#include <fracq/specfun.hpp>

#include "oracles.hpp"

using namespace fracq;
using namespace fracq::specfun;

TEST_CASE("KSParams validates the admissible range and derives the triple") {
    KSParams p(0.6, 0.2);
    CHECK(p.a == 0.6);
    CHECK(p.m == doctest::Approx(1.0 + 0.2 / 0.6).epsilon(1e-15));
    CHECK(p.l == doctest::Approx(0.2 / 0.6).epsilon(1e-15));
    CHECK(p.beta == doctest::Approx(0.8).epsilon(1e-15));

    CHECK_THROWS_AS(KSParams(0.0, 0.0), parameter_error);
    CHECK_THROWS_AS(KSParams(1.2, 0.0), parameter_error);
    CHECK_THROWS_AS(KSParams(0.5, -0.1), parameter_error);
    CHECK_THROWS_AS(KSParams(0.9, 0.2), parameter_error); // alpha + gamma > 1
}

TEST_CASE("ks_coefficients: factorial reduction at (1,0)") {
    const KSCoefficients c = ks_coefficients(KSParams(1.0, 0.0), 5);
    REQUIRE(c.values.size() == 6);
    double factorial = 1.0;
    for (std::size_t n = 0; n <= 5; ++n) {
        if (n > 0) factorial *= static_cast<double>(n);
        CHECK(c.values[n] == doctest::Approx(1.0 / factorial).epsilon(1e-14));
    }
    CHECK(!c.log_domain);
}

TEST_CASE("ks_coefficients: gamma=0 telescoping to 1/Gamma(1+n alpha)") {
    const KSCoefficients c = ks_coefficients(KSParams(0.5, 0.0), 2);
    CHECK(c.values[0] == 1.0);
    CHECK(c.values[1] == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(c.values[2] == doctest::Approx(1.0).epsilon(1e-13));

    for (double alpha : {0.3, 0.5, 0.8}) {
        const KSCoefficients cc = ks_coefficients(KSParams(alpha, 0.0), 50);
        for (std::size_t n = 1; n <= 50; ++n) {
            const double resid = cc.log_values[n] + oracle::lgamma(1.0 + n * alpha);
            CHECK(std::fabs(resid) < 1e-12);
        }
    }
}

TEST_CASE("ks_coefficients: c_1 at (0.6,0.2) against the independent log-gamma") {
    const KSCoefficients c = ks_coefficients(KSParams(0.6, 0.2), 1);
    const double want = std::exp(oracle::lgamma(1.2) - oracle::lgamma(1.8));
    CHECK(c.values[1] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("ks_coefficients: literal triple equals the stretched form to 12 digits") {
    for (auto [alpha, gamma] : {std::pair{0.6, 0.2}, {0.8, 0.2}, {0.9, 0.05}, {0.45, 0.3}}) {
        const KSParams p(alpha, gamma);
        const KSCoefficients c = ks_coefficients(p, 40);
        double log_c = 0.0;
        for (std::size_t n = 1; n <= 40; ++n) {
            const double k = static_cast<double>(n - 1);
            log_c += oracle::lgamma(1.0 + k * p.beta + gamma) -
                     oracle::lgamma(1.0 + (k + 1.0) * p.beta);
            CHECK(c.log_values[n] == doctest::Approx(log_c).epsilon(1e-12));
        }
    }
}

TEST_CASE("ks_coefficients: underflow sets the log-domain flag") {
    const KSCoefficients c = ks_coefficients(KSParams(0.5, 0.0), 400);
    CHECK(c.log_domain);
    CHECK(c.values.back() == 0.0);
    CHECK(std::isfinite(c.log_values.back()));
}

TEST_CASE("ks_eval: exponential special case") {
    const KSParams p(1.0, 0.0);
    CHECK(ks_eval(p, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
    CHECK(ks_eval(p, 0.0) == 1.0);
    for (double x = 0.0; x <= 20.0; x += 0.5)
        CHECK(std::fabs(ks_eval(p, x) - std::exp(-x)) < 1e-12);
}

TEST_CASE("ks_eval: alpha=1/2 erfc identity") {
    const KSParams p(0.5, 0.0);
    const double got = ks_eval(p, 1.0);
    CHECK(got == doctest::Approx(oracle::erfcx(1.0)).epsilon(1e-12));
}

TEST_CASE("ml_eval: special values and erfc oracle") {
    CHECK(ml_eval(1.0, 3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
    CHECK(ml_eval(0.8, 0.0) == 1.0);
    CHECK(ml_eval(0.5, 2.0) == doctest::Approx(oracle::erfcx(2.0)).epsilon(1e-11));
    CHECK_THROWS_AS(ml_eval(0.0, 1.0), parameter_error);
    CHECK_THROWS_AS(ml_eval(1.5, 1.0), parameter_error);
}

TEST_CASE("reduction chain: ks(alpha,0) equals ml(alpha) on [0,20]") {
    for (double alpha : {0.5, 0.8}) {
        const KSParams p(alpha, 0.0);
        for (double x = 0.0; x <= 20.0; x += 1.0)
            CHECK(std::fabs(ks_eval(p, x) - ml_eval(alpha, x)) < 1e-10);
    }
}

TEST_CASE("kernel_eval dispatches the three families") {
    CHECK(kernel_eval(KernelKind(Exponential{}), 0.2, 5.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

    const KernelKind ks10{KilbasSaigo{KSParams(1.0, 0.0)}};
    for (double xt : {0.5, 1.0, 2.0})
        CHECK(std::fabs(kernel_eval(ks10, 1.0, xt) - std::exp(-xt)) < 1e-12);

    // stretched kernel against the independent double-double series
    const KernelKind ks82{KilbasSaigo{KSParams(0.8, 0.2)}};
    const double got = kernel_eval(ks82, 0.2, 1.0);
    const double want = oracle::ks_series_dd(0.8, 0.2, 0.2);
    CHECK(got == doctest::Approx(want).epsilon(1e-13));

    const KernelKind ml{MittagLeffler{0.5}};
    CHECK(kernel_eval(ml, 1.0, 4.0) == doctest::Approx(oracle::erfcx(2.0)).epsilon(1e-11));

    CHECK(kernel_eval(ks82, 0.7, 0.0) == 1.0);
    CHECK_THROWS_AS(kernel_eval(ks82, -1.0, 1.0), parameter_error);
}

TEST_CASE("complete-monotonicity proxy: decreasing in x, range (0,1]") {
    mc::Stream rng(2024, 7);
    for (int rep = 0; rep < 16; ++rep) {
        const double alpha = 0.05 + 0.95 * rng.next_double();
        const double gamma = (1.0 - alpha) * rng.next_double();
        const KSParams p(alpha, gamma);
        // stay well below the precision ceiling: the sweep is about shape,
        // not about exercising the widest rungs
        const double x_hi = std::min(30.0, 0.3 * admissible_x_max(p));
        double prev = 1.0;
        for (double x = 0.0; x <= x_hi; x += x_hi / 80.0) {
            const double v = ks_eval(p, x);
            CHECK(v <= prev + 1e-12);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
}

TEST_CASE("ks_moments: degenerate, telescoped and oracle values") {
    const std::vector<double> m10 = ks_moments(KSParams(1.0, 0.0), 5);
    for (std::size_t k = 0; k <= 5; ++k) CHECK(m10[k] == doctest::Approx(1.0).epsilon(1e-13));

    const std::vector<double> m50 = ks_moments(KSParams(0.5, 0.0), 1);
    CHECK(m50[1] == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-13));

    // m_2 = 2 c_2 with c_2 = [Gamma(1.2)/Gamma(1.8)] [Gamma(2.0)/Gamma(2.6)]
    // straight from the defining Gamma-ratio product (Gamma(2) = 1).
    const std::vector<double> m62 = ks_moments(KSParams(0.6, 0.2), 2);
    const double want = 2.0 * std::exp(oracle::lgamma(1.2) - oracle::lgamma(1.8) -
                                       oracle::lgamma(2.6));
    CHECK(m62[2] == doctest::Approx(want).epsilon(1e-12));

    // m_1 = c_1 exactly (Gamma(2) = 1)
    const KSCoefficients c = ks_coefficients(KSParams(0.6, 0.2), 1);
    CHECK(ks_moments(KSParams(0.6, 0.2), 1)[1] == c.values[1]);

    CHECK_THROWS_AS(ks_moments(KSParams(0.5, 0.0), 0), parameter_error);
}

TEST_CASE("precision ceiling raises a ranged error") {
    const KSParams p(0.6, 0.2);
    CHECK_THROWS_AS(ks_eval(p, 200.0), precision_error);
    try {
        ks_eval(p, 200.0);
    } catch (const precision_error& e) {
        CHECK(e.admissible_x_max() > 70.0);
        CHECK(e.admissible_x_max() < 90.0);
        CHECK(ks_eval(p, e.admissible_x_max() * 0.99) > 0.0);
    }
}

TEST_CASE("adaptive precision: wide path matches exponential deep in the tail") {
    const KSParams p(1.0, 0.0);
    EvalInfo info;
    const double v = ks_eval(p, 70.0, &info);
    CHECK(info.digits >= 50);
    CHECK(v == doctest::Approx(std::exp(-70.0)).epsilon(1e-12));
}

TEST_CASE("precision ceiling is runtime-configurable") {
    const KSParams p(0.8, 0.0);
    const double wide_x = 30.0; // needs ~80 digits
    CHECK(ks_eval(p, wide_x) > 0.0);
    set_precision_ceiling(50);
    CHECK(precision_ceiling() == 50);
    CHECK_THROWS_AS(ks_eval(p, wide_x), precision_error);
    const double xmax_small = admissible_x_max(p);
    set_precision_ceiling(512);
    CHECK(admissible_x_max(p) > xmax_small);
    CHECK(ks_eval(p, wide_x) > 0.0);
}

TEST_CASE("concurrent evaluation: shared coefficient tables are race-free") {
    // fresh parameter pair so the threads genuinely grow the tables together
    const KSParams p(0.75, 0.15);
    std::vector<double> expected(48);
    std::vector<std::thread> pool;
    std::array<std::vector<double>, 4> got;
    for (std::size_t t = 0; t < 4; ++t) {
        got[t].resize(48);
        pool.emplace_back([&, t] {
            for (int i = 0; i < 48; ++i) {
                const double x = 40.0 * (t % 2 == 0 ? i : 47 - i) / 47.0;
                got[t][static_cast<std::size_t>(t % 2 == 0 ? i : 47 - i)] = ks_eval(p, x);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (int i = 0; i < 48; ++i) expected[static_cast<std::size_t>(i)] = ks_eval(p, 40.0 * i / 47.0);
    for (std::size_t t = 0; t < 4; ++t)
        for (int i = 0; i < 48; ++i)
            CHECK(got[t][static_cast<std::size_t>(i)] == expected[static_cast<std::size_t>(i)]);
}
