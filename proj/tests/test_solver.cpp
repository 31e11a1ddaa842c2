#include <doctest.h>

#include <cmath>
#include <complex>

#include <fracq/mc.hpp>
#include <fracq/solver.hpp>

using namespace fracq;
using namespace fracq::solver;
using specfun::Exponential;
using specfun::KernelKind;
using specfun::KilbasSaigo;
using specfun::KSParams;
using specfun::MittagLeffler;

namespace {

const QueueParams ref_queue{0.8, 1.0};

std::vector<double> coarse_times() {
    std::vector<double> t;
    for (double v = 0.0; v <= 20.0; v += 2.5) t.push_back(v == 0.0 ? 1e-6 : v);
    return t;
}

double max_table_diff(const TransientTable& a, const TransientTable& b, std::size_t n_hi) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.times.size(); ++i)
        for (std::size_t n = 0; n <= n_hi; ++n)
            d = std::max(d, std::fabs(a.probs[i][n] - b.probs[i][n]));
    return d;
}

} // namespace

TEST_CASE("transient: exponential kernel reproduces the uniformization oracle") {
    const std::vector<double> times = coarse_times();
    const TransientTable oracle = generator::classical_transient_oracle(ref_queue, 60, times);
    const TransientTable spec = transient(KernelKind(Exponential{}), ref_queue, 60, times);
    CHECK(spec.route == Route::SpectralExp);
    CHECK(max_table_diff(oracle, spec, 60) < 1e-8);
}

TEST_CASE("transient: Kilbas-Saigo at (1,0) equals the exponential route") {
    const std::vector<double> times = coarse_times();
    const TransientTable exp_t = transient(KernelKind(Exponential{}), ref_queue, 40, times);
    const TransientTable ks_t =
        transient(KernelKind(KilbasSaigo{KSParams(1.0, 0.0)}), ref_queue, 40, times);
    CHECK(ks_t.route == Route::SpectralKS);
    CHECK(max_table_diff(exp_t, ks_t, 40) < 1e-10);
}

TEST_CASE("transient: delta column at t = 0 for every kernel") {
    const std::vector<double> t0{0.0};
    for (const KernelKind kind :
         {KernelKind(Exponential{}), KernelKind(MittagLeffler{0.8}),
          KernelKind(KilbasSaigo{KSParams(0.6, 0.2)})}) {
        const TransientTable tab = transient(kind, ref_queue, 25, t0);
        CHECK(std::fabs(tab.probs[0][0] - 1.0) < 1e-10);
        for (std::size_t n = 1; n <= 25; ++n) CHECK(std::fabs(tab.probs[0][n]) < 1e-10);
    }
}

TEST_CASE("transient: spectral routes stay normalized and nonnegative") {
    const std::vector<double> times = coarse_times();
    for (const KernelKind kind :
         {KernelKind(MittagLeffler{0.8}), KernelKind(KilbasSaigo{KSParams(0.8, 0.2)})}) {
        const TransientTable tab = transient(kind, ref_queue, 80, times);
        for (double s : tab.column_sums) CHECK(std::fabs(s - 1.0) < 1e-6);
        for (const auto& row : tab.probs)
            for (double p : row) CHECK(p >= 0.0);
    }
}

TEST_CASE("laplace_symbol_transient: beta = 1 matches the classical oracle") {
    const std::vector<double> times = coarse_times();
    const TransientTable oracle = generator::classical_transient_oracle(ref_queue, 60, times);
    const TransientTable lap = laplace_symbol_transient(ref_queue, 1.0, 60, times);
    CHECK(lap.route == Route::LaplaceSymbol);
    CHECK(max_table_diff(oracle, lap, 60) < 1e-6);
    for (double s : lap.column_sums) CHECK(std::fabs(s - 1.0) < 1e-5);
}

TEST_CASE("laplace_symbol_transient: beta = 0.8 matches the Mittag-Leffler spectral route") {
    const std::vector<double> times = coarse_times();
    const TransientTable ml = transient(KernelKind(MittagLeffler{0.8}), ref_queue, 100, times);
    const TransientTable lap = laplace_symbol_transient(ref_queue, 0.8, 100, times);
    CHECK(max_table_diff(ml, lap, 35) < 1e-5);
}

TEST_CASE("laplace_symbol_transient: Gaver-Stehfest cross-check mode") {
    std::vector<double> times{1.0, 4.0, 10.0};
    const TransientTable talbot = laplace_symbol_transient(ref_queue, 0.8, 40, times);
    const TransientTable gs =
        laplace_symbol_transient(ref_queue, 0.8, 40, times, InversionMethod::GaverStehfest);
    CHECK(max_table_diff(talbot, gs, 20) < 2e-3);
}

TEST_CASE("laplace_symbol_transient: exact delta column when the grid contains 0") {
    const TransientTable lap = laplace_symbol_transient(ref_queue, 0.8, 20, {0.0, 1.0});
    CHECK(lap.probs[0][0] == 1.0);
    CHECK(lap.probs[0][5] == 0.0);
}

TEST_CASE("phi_of_s: limits, quadratic residual and branch choice") {
    using cplx = std::complex<double>;
    const double beta = 0.8;

    // large |s|: Phi ~ lambda / s^beta
    const cplx s_big(1e8, 0.0);
    const cplx want = ref_queue.lambda / std::pow(s_big, beta);
    CHECK(std::abs(phi_of_s(s_big, ref_queue, beta) - want) < 1e-9);

    // s -> 0+, beta = 1: Phi -> rho
    CHECK(std::abs(phi_of_s(cplx(1e-12, 0.0), ref_queue, 1.0) - cplx(0.8, 0.0)) < 1e-5);

    // defining quadratic mu Phi^2 - (s^b + lambda + mu) Phi + lambda = 0
    const cplx s(1.0, 0.0);
    const cplx phi = phi_of_s(s, ref_queue, beta);
    const cplx a = std::pow(s, beta) + ref_queue.lambda + ref_queue.mu;
    CHECK(std::abs(ref_queue.mu * phi * phi - a * phi + ref_queue.lambda) < 1e-12);

    // |Phi| <= 1 across the right half-plane
    mc::Stream rng(17, 3);
    for (int rep = 0; rep < 50; ++rep) {
        const cplx sv(0.05 + 5.0 * rng.next_double(), 10.0 * (rng.next_double() - 0.5));
        CHECK(std::abs(phi_of_s(sv, ref_queue, beta)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("generating_function: normalization pole structure at z = 1") {
    using cplx = std::complex<double>;
    for (double beta : {1.0, 0.8, 0.6}) {
        for (double sv : {0.5, 1.0, 3.0}) {
            const cplx g = generating_function(cplx(1.0, 0.0), cplx(sv, 0.0), ref_queue, beta);
            CHECK(std::abs(g - 1.0 / cplx(sv, 0.0)) < 1e-12);
        }
    }
    CHECK_THROWS_AS(generating_function(std::complex<double>(0.0, 0.0),
                                        std::complex<double>(1.0, 0.0), ref_queue, 0.8),
                    parameter_error);
}

TEST_CASE("generating_function: coefficients vs the literal-boundary resolvent") {
    // The closed form drops the mu p~_0 / z boundary term, so its expansion in
    // the annulus z- < |z| < z+ carries the literal-boundary solution's
    // geometric decay 1/z+ but with amplitude inflated by exactly
    // z+ / (z+ - z-), plus pure negative powers from the inner root. Both
    // facts are asserted here; the raw coefficients do NOT equal the solve.
    using cplx = std::complex<double>;
    const double beta = 0.8;
    const cplx s(1.0, 0.0);
    const std::size_t n_nodes = 512;
    const double r = 0.5;
    std::vector<cplx> g_vals(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double th = 2.0 * M_PI * static_cast<double>(k) / n_nodes;
        g_vals[k] = generating_function(std::polar(r, th), s, ref_queue, beta);
    }
    auto extract = [&](int n) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < n_nodes; ++k) {
            const double th = 2.0 * M_PI * static_cast<double>(k) / n_nodes;
            acc += g_vals[k] * std::polar(1.0, -th * static_cast<double>(n));
        }
        return acc / (static_cast<double>(n_nodes) * std::pow(r, static_cast<double>(n)));
    };

    const generator::TruncatedGenerator literal = generator::build_generator(ref_queue, 220, true);
    const std::vector<cplx> ref =
        solver::detail::resolvent_solve(literal, std::pow(s, beta), std::pow(s, beta - 1.0));

    // roots of lambda z^2 - (s^b + lambda + mu) z + mu
    const double A = std::pow(1.0, beta) + ref_queue.lambda + ref_queue.mu;
    const double disc = std::sqrt(A * A - 4.0 * ref_queue.lambda * ref_queue.mu);
    const double z_minus = (A - disc) / (2.0 * ref_queue.lambda);
    const double z_plus = (A + disc) / (2.0 * ref_queue.lambda);
    const double amplitude = z_plus / (z_plus - z_minus);

    for (std::size_t n = 0; n <= 10; ++n)
        CHECK(std::abs(extract(static_cast<int>(n)) - amplitude * ref[n]) < 1e-8);

    // inner root contributes the negative-power residue chain
    const cplx a_m1 = extract(-1);
    const double residue = z_minus / (ref_queue.lambda * (z_plus - z_minus));
    CHECK(a_m1.real() == doctest::Approx(residue).epsilon(1e-8));
}

TEST_CASE("product_form_pn: literal evaluation") {
    const KSParams ks82(0.8, 0.2);
    // t = 0 gives the unnormalized geometric rho^n
    for (std::size_t n = 0; n <= 5; ++n)
        CHECK(product_form_pn(ref_queue, ks82, n, 0.0) ==
              doctest::Approx(std::pow(0.8, static_cast<double>(n))).epsilon(1e-14));

    // classical reduction rho^n e^{-kappa t}
    const KSParams ks10(1.0, 0.0);
    for (double t : {0.5, 2.0, 8.0})
        CHECK(product_form_pn(ref_queue, ks10, 3, t) ==
              doctest::Approx(std::pow(0.8, 3.0) * std::exp(-0.2 * t)).epsilon(1e-11));

    // composition with the validated kernel at the reference rates
    CHECK(product_form_pn(ref_queue, ks82, 0, 8.0) ==
          doctest::Approx(specfun::ks_eval(ks82, 0.2 * 8.0)).epsilon(1e-14));

    CHECK_THROWS_AS(product_form_pn(QueueParams(1.0, 1.0), ks82, 0, 1.0), stability_error);
}

TEST_CASE("product_form_laplace_pn: positivity and finiteness on the real axis") {
    using cplx = std::complex<double>;
    for (double sv : {0.25, 0.5, 1.0, 2.0, 8.0}) {
        const cplx v = product_form_laplace_pn(ref_queue, 0.8, 0, cplx(sv, 0.0));
        CHECK(std::isfinite(v.real()));
        CHECK(v.real() > 0.0);
        CHECK(std::fabs(v.imag()) < 1e-14);
    }
}

TEST_CASE("mean_curve: boundary values") {
    const std::vector<double> times{0.0, 5.0, 20.0};
    const TransientTable tab = generator::classical_transient_oracle(ref_queue, 150, times);
    const std::vector<double> m = mean_curve(tab);
    CHECK(m[0] == 0.0);
    CHECK(m[1] > 0.0);
    CHECK(m[2] > m[1]);
    CHECK(m[2] < 4.0); // below the untruncated stationary mean rho/(1-rho)

    // stationary input reproduces the truncated stationary mean
    const generator::StationaryDist pi = generator::stationary_dist(ref_queue, 150);
    TransientTable st;
    st.times = {0.0};
    st.n_max = 150;
    st.probs = {pi.probs};
    st.column_sums = {1.0};
    double want = 0.0;
    for (std::size_t n = 0; n <= 150; ++n) want += static_cast<double>(n) * pi.probs[n];
    CHECK(mean_curve(st)[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("stationary approach: |p0 - 0.2| non-increasing, slowest for smallest alpha+gamma") {
    const std::vector<double> times{5.0, 10.0, 15.0, 20.0};
    const std::vector<TransientTable> routes = {
        transient(KernelKind(Exponential{}), ref_queue, 120, times),
        transient(KernelKind(MittagLeffler{0.8}), ref_queue, 120, times),
        transient(KernelKind(KilbasSaigo{KSParams(0.8, 0.2)}), ref_queue, 120, times),
        transient(KernelKind(KilbasSaigo{KSParams(0.6, 0.2)}), ref_queue, 120, times),
    };
    for (const TransientTable& t : routes) {
        double prev = 1.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double dev = std::fabs(t.probs[i][0] - 0.2);
            CHECK(dev <= prev + 1e-12);
            prev = dev;
        }
    }
    // at t = 20: classical closest to stationarity, smallest alpha+gamma farthest
    const auto dev_at = [&](std::size_t route) {
        return std::fabs(routes[route].probs[3][0] - 0.2);
    };
    CHECK(dev_at(0) < dev_at(2));
    CHECK(dev_at(2) < dev_at(3));
    CHECK(dev_at(0) < dev_at(1));

    // the most probable state of the initial column is the empty system
    for (const TransientTable& t : routes) {
        std::size_t argmax = 0;
        for (std::size_t n = 1; n <= t.n_max; ++n)
            if (t.probs[0][n] > t.probs[0][argmax]) argmax = n;
        CHECK(argmax == 0);
    }
}

TEST_CASE("consistency_report: gamma = 0 routes coincide; product form documented") {
    std::vector<double> times{1e-6, 2.0, 8.0, 16.0};
    const ConsistencyReport rep =
        consistency_report(ref_queue, KSParams(0.8, 0.0), 120, times);
    CHECK(rep.gamma_is_zero);
    CHECK(rep.max_dist_ks_laplace < 1e-5);
    CHECK(rep.product_sum_deviates);
    CHECK(rep.sum_product[0] == doctest::Approx(5.0).epsilon(1e-4));
    REQUIRE(rep.laplace_spots.size() == 3);
    CHECK(!rep.notes.empty());

    // classical pair: everything except the product form agrees with the oracle
    const ConsistencyReport rep10 =
        consistency_report(ref_queue, KSParams(1.0, 0.0), 120, times);
    CHECK(rep10.max_dist_ks_laplace < 1e-6);
}

TEST_CASE("consistency_report: gamma > 0 routes genuinely diverge") {
    std::vector<double> times{1e-6, 2.0, 8.0};
    const ConsistencyReport rep =
        consistency_report(ref_queue, KSParams(0.6, 0.2), 80, times);
    CHECK(!rep.gamma_is_zero);
    // the two fractional semantics measurably differ away from gamma = 0
    CHECK(rep.max_dist_ks_laplace > 1e-3);
}
