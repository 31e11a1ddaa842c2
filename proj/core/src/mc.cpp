#include "fracq/mc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

namespace fracq::mc {

using cplx = std::complex<double>;

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Fixed internal stream key for sampler calibration; independent of the user
// seed so a backend's gate verdict is a property of (params, backend) alone.
constexpr std::uint64_t kCalibrationSeed = 0x5EEDCA11B7A7E5ULL;
constexpr std::size_t kCalibrationDraws = 100000;

} // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t stream_index)
    : base_(mix64(seed + mix64(stream_index * kGolden + 1))) {}

std::uint64_t Stream::next_u64() { return mix64(base_ + (++counter_) * kGolden); }

double Stream::next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::string backend_name(SamplerBackend backend) {
    switch (backend) {
        case SamplerBackend::DegenerateOne: return "degenerate-one";
        case SamplerBackend::StableInverse: return "stable-inverse";
        case SamplerBackend::BetaProduct: return "beta-product";
        case SamplerBackend::InverseCDF: return "inverse-cdf";
    }
    return "unknown";
}

SamplerBackend backend_from_name(const std::string& name) {
    if (name == "degenerate-one") return SamplerBackend::DegenerateOne;
    if (name == "stable-inverse") return SamplerBackend::StableInverse;
    if (name == "beta-product") return SamplerBackend::BetaProduct;
    if (name == "inverse-cdf") return SamplerBackend::InverseCDF;
    throw parameter_error("unknown sampler backend: " + name);
}

namespace {

// Kanter's representation: U uniform on (0, pi), W standard exponential.
double stable_from_uniforms(double alpha, double u1, double u2) {
    const double u = M_PI * u1;
    const double w = -std::log(u2);
    const double lead = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    const double tail = std::pow(std::sin((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
    return lead * tail;
}

} // namespace

double sample_stable(double alpha, Stream& rng) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw parameter_error("sample_stable: alpha must lie in (0, 1)");
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    return stable_from_uniforms(alpha, u1, u2);
}

std::string MomentGateReport::to_string() const {
    std::ostringstream os;
    os << "sampler gate [" << backend_name(backend) << "]:";
    for (std::size_t k = 0; k < 4; ++k) {
        os << " m" << (k + 1) << " target=" << target[k] << " empirical=" << empirical[k]
           << " rel_err=" << rel_err[k] << ";";
    }
    os << (passed ? " passed" : " REJECTED (tolerance 1%)");
    return os.str();
}

namespace {

class DegenerateSampler final : public ZSampler {
public:
    double sample(Stream&) const override { return 1.0; }
    SamplerBackend backend() const override { return SamplerBackend::DegenerateOne; }
    double high_quantile() const override { return 1.0; }
};

class StableInverseSampler final : public ZSampler {
public:
    explicit StableInverseSampler(double alpha) : alpha_(alpha) {}
    double sample(Stream& rng) const override {
        return std::pow(sample_stable(alpha_, rng), -alpha_);
    }
    int uniform_dims() const override { return 2; }
    double sample_from_uniforms(const double* u) const override {
        return std::pow(stable_from_uniforms(alpha_, u[0], u[1]), -alpha_);
    }
    SamplerBackend backend() const override { return SamplerBackend::StableInverse; }
    double high_quantile() const override {
        // P(S^-a > z) = P(S < z^{-1/a}); crude but sufficient cap via the
        // left-tail behaviour exp(-c s^{-a/(1-a)}) of the stable density.
        const double c = (1.0 - alpha_) * std::pow(alpha_, alpha_ / (1.0 - alpha_));
        const double s_small = std::pow(-std::log(1e-6) / c, -(1.0 - alpha_) / alpha_);
        return std::pow(s_small, -alpha_);
    }

private:
    double alpha_;
};

// Marsaglia-Tsang gamma variate; shape < 1 boosted through G(a+1) U^{1/a}.
double sample_gamma(double shape, Stream& rng) {
    if (shape < 1.0) {
        const double u = rng.next_double();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        // Box-Muller normal from two uniforms.
        const double u1 = rng.next_double();
        const double u2 = rng.next_double();
        const double x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = rng.next_double();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_beta(double a, double b, Stream& rng) {
    const double g1 = sample_gamma(a, rng);
    const double g2 = sample_gamma(b, rng);
    return g1 / (g1 + g2);
}

// Truncated beta-product backend. The factor laws are a documented
// implementer choice (Beta(1 + gamma + (k-1) beta, alpha) raised to beta,
// scaled so E[Z] matches m_1); the startup moment gate decides whether the
// resulting law is usable for given parameters.
class BetaProductSampler final : public ZSampler {
public:
    BetaProductSampler(const specfun::KSParams& p, std::size_t m_z) : p_(p), m_z_(m_z) {
        double log_ev = 0.0; // log E[prod B_k^beta]
        for (std::size_t k = 1; k <= m_z_; ++k) {
            const double a = 1.0 + p.gamma + (static_cast<double>(k) - 1.0) * p.beta;
            const double b = p.alpha;
            log_ev += std::lgamma(a + p.beta) + std::lgamma(a + b) - std::lgamma(a) -
                      std::lgamma(a + b + p.beta);
        }
        const double m1 = specfun::ks_moments(p, 1)[1];
        scale_ = m1 * std::exp(-log_ev);
    }
    double sample(Stream& rng) const override {
        double log_v = 0.0;
        for (std::size_t k = 1; k <= m_z_; ++k) {
            const double a = 1.0 + p_.gamma + (static_cast<double>(k) - 1.0) * p_.beta;
            log_v += p_.beta * std::log(sample_beta(a, p_.alpha, rng));
        }
        const double w = -std::log(rng.next_double());
        return scale_ * w * std::exp(log_v);
    }
    SamplerBackend backend() const override { return SamplerBackend::BetaProduct; }
    double high_quantile() const override { return scale_ * (-std::log(1e-6)); }

private:
    specfun::KSParams p_;
    std::size_t m_z_;
    double scale_ = 1.0;
};

// Lanczos log-gamma for complex arguments (g = 7, 9 terms).
cplx complex_lgamma(cplx z) {
    static const double coef[9] = {0.99999999999980993, 676.5203681218851,
                                   -1259.1392167224028, 771.32342877765313,
                                   -176.61502916214059, 12.507343278686905,
                                   -0.13857109526572012, 9.9843695780195716e-6,
                                   1.5056327351493116e-7};
    if (z.real() < 0.5) return std::log(M_PI / std::sin(M_PI * z)) - complex_lgamma(1.0 - z);
    z -= 1.0;
    cplx x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (z + static_cast<double>(i));
    const cplx t = z + 7.5;
    return 0.918938533204672742 + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Mellin transform of the multiplier Z: E[Z^s] = Gamma(1+s) c(s), where c(s)
// analytically continues the series coefficients c_n through the regularized
// Gamma-ratio product
//   c(s) = lim_M (M beta)^{-alpha s} prod_{j<M} g(j)/g(j+s),
//   g(j) = Gamma(1+j beta+gamma)/Gamma(1+j beta+beta),
// evaluated with Richardson extrapolation over M in {256, 512, 1024}. Along
// a vertical contour the Gamma factor decays exponentially in Im s, so a
// single set of contour values inverts to the density at every z.
class MellinDensity {
public:
    MellinDensity(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {
        const int max_nodes = 4000;
        values_.reserve(512);
        double peak = 0.0;
        for (int k = 0; k < max_nodes; ++k) {
            const cplx s(sigma_, h_ * k);
            const cplx v = std::exp(complex_lgamma(1.0 + s) + log_c_continued(s));
            values_.push_back(v);
            peak = std::max(peak, std::abs(v));
            if (k > 8 && std::abs(v) < 1e-14 * peak) break;
        }
    }

    // f(z) = (1/pi) Int_0^inf Re[z^{-s-1} M(s)] dt along s = sigma + i t.
    double density(double z) const {
        const double lz = std::log(z);
        const cplx step = std::exp(cplx(0.0, -h_ * lz));
        cplx zp = std::pow(z, -sigma_ - 1.0);
        double acc = 0.5 * (zp * values_[0]).real();
        for (std::size_t k = 1; k < values_.size(); ++k) {
            zp *= step;
            acc += (zp * values_[k]).real();
        }
        return acc * h_ / M_PI;
    }

    // Continuation error certificate: the continued c(s) must reproduce the
    // exact ladder coefficients at integer orders.
    double max_integer_rel_err(const specfun::KSParams& p) const {
        const specfun::KSCoefficients c = specfun::ks_coefficients(p, 6);
        double worst = 0.0;
        for (int k = 1; k <= 6; ++k) {
            const double cont = std::exp(log_c_continued(cplx(k, 0.0)).real());
            worst = std::max(worst, std::fabs(cont - c.values[k]) / c.values[k]);
        }
        return worst;
    }

private:
    cplx log_c_continued(cplx s) const {
        const double beta = alpha_ + gamma_;
        auto lg_real = [&](int j) {
            return std::lgamma(1.0 + j * beta + gamma_) - std::lgamma(1.0 + j * beta + beta);
        };
        auto lg_cplx = [&](cplx j) {
            return complex_lgamma(1.0 + j * beta + gamma_) - complex_lgamma(1.0 + j * beta + beta);
        };
        cplx p256{}, p512{}, p1024{};
        cplx acc{};
        for (int j = 0; j < 1024; ++j) {
            acc += lg_real(j) - lg_cplx(s + static_cast<double>(j));
            if (j == 255) p256 = acc;
            if (j == 511) p512 = acc;
        }
        p1024 = acc;
        const cplx f1 = p256 - alpha_ * s * std::log(256.0 * beta);
        const cplx f2 = p512 - alpha_ * s * std::log(512.0 * beta);
        const cplx f4 = p1024 - alpha_ * s * std::log(1024.0 * beta);
        return (8.0 * f4 - 6.0 * f2 + f1) / 3.0; // kills 1/M and 1/M^2 terms
    }

    double alpha_, gamma_;
    double sigma_ = 1.0;
    double h_ = 0.25;
    std::vector<cplx> values_;
};

// Inverse-transform sampler for gamma > 0. The density of Z is tabulated by
// numerical inversion of its exactly-known transform (the Mellin route above;
// a Talbot inversion of x -> ks_eval(x) needs |s| ~ 2M^2/(5z), which blows
// past the series precision ceiling for every z of interest, and real-node
// Gaver-Stehfest inversion mollifies the sharply decaying flank to useless
// accuracy). Below the table the density follows its small-z power law
// A z^{alpha/beta-1}; the two head coefficients are pinned by the exact total
// mass and first moment. The far tail is completed by a fitted algebraic
// decay of the last trusted decade.
class InverseCdfSampler final : public ZSampler {
public:
    explicit InverseCdfSampler(const specfun::KSParams& p) : p_(p) { build(); }

    double sample(Stream& rng) const override { return quantile(rng.next_double()); }
    int uniform_dims() const override { return 1; }
    double sample_from_uniforms(const double* u) const override { return quantile(u[0]); }
    SamplerBackend backend() const override { return SamplerBackend::InverseCDF; }
    double high_quantile() const override { return quantile(1.0 - 1e-6); }

    double quantile(double u) const {
        if (u <= head_mass_) {
            // Solve a z^{d}/d + b z^{2d}/(2d) = u for z via w = z^d.
            const double A = a_head_ / d1_;
            const double B = b_head_ / (2.0 * d1_);
            double w;
            if (std::fabs(B) < 1e-300) {
                w = u / A;
            } else {
                w = (-A + std::sqrt(A * A + 4.0 * B * u)) / (2.0 * B);
                if (!(w > 0.0)) w = u / A;
            }
            return std::pow(w, 1.0 / d1_);
        }
        if (u >= cdf_.back()) {
            const double rem = std::max(1.0 - u, 1e-15);
            return std::pow(rem * (eta_tail_ - 1.0) / c_tail_, 1.0 / (1.0 - eta_tail_));
        }
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t hi = static_cast<std::size_t>(it - cdf_.begin());
        const std::size_t lo = hi - 1;
        const double span = cdf_[hi] - cdf_[lo];
        if (span <= 0.0) return z_[lo];
        const double frac = (u - cdf_[lo]) / span;
        return z_[lo] + frac * (z_[hi] - z_[lo]);
    }

private:
    void build();

    specfun::KSParams p_;
    double d1_ = 1.0;                   // head exponent alpha/beta
    double a_head_ = 0.0, b_head_ = 0.0;
    double head_mass_ = 0.0;
    std::vector<double> z_, cdf_;       // 4096-point tabulated CDF
    double c_tail_ = 0.0, eta_tail_ = 6.0;
};

void InverseCdfSampler::build() {
    const double beta = p_.beta;
    d1_ = p_.alpha / beta;

    const MellinDensity mellin(p_.alpha, p_.gamma);
    const double cert = mellin.max_integer_rel_err(p_);
    if (cert > 1e-5)
        throw numeric_error("inverse-cdf: Mellin continuation certificate failed (rel err " +
                            std::to_string(cert) + ")");
    const std::vector<double> m = specfun::ks_moments(p_, 4);

    // Coarse scan to bracket the support and locate the density scale.
    const double z0 = 1e-3 * std::min(1.0, m[1]);
    double z_hi = 16.0 * std::max(1.0, std::pow(m[4], 0.25));
    double f_max = 0.0;
    {
        const int n_scan = 256;
        const double lr = std::log(z_hi / z0) / (n_scan - 1);
        std::vector<double> fs(n_scan);
        for (int i = 0; i < n_scan; ++i)
            fs[i] = std::max(0.0, mellin.density(z0 * std::exp(lr * i)));
        f_max = *std::max_element(fs.begin(), fs.end());
        if (!(f_max > 0.0))
            throw numeric_error("inverse-cdf: density inversion produced no mass");
        int hi = n_scan - 1;
        while (hi > 8 && fs[hi] < 1e-12 * f_max) --hi;
        z_hi = z0 * std::exp(lr * std::min(hi + 2, n_scan - 1));
    }

    // 4096-point log-spaced tabulation grid.
    constexpr int table_n = 4096;
    z_.resize(table_n);
    std::vector<double> fg(table_n);
    const double lr = std::log(z_hi / z0) / (table_n - 1);
    for (int i = 0; i < table_n; ++i) {
        z_[i] = z0 * std::exp(lr * i);
        fg[i] = std::max(0.0, mellin.density(z_[i]));
    }
    const double z_back = z_.back();

    // Algebraic tail completion fitted over the last trusted decade.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int fit_n = 0;
    for (int i = 0; i < table_n; ++i) {
        if (fg[i] <= 1e-12 * f_max || fg[i] > 1e-8 * f_max || z_[i] < m[1]) continue;
        const double lx = std::log(z_[i]);
        const double ly = std::log(fg[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++fit_n;
    }
    eta_tail_ = 40.0;
    if (fit_n >= 6) {
        const double slope = (fit_n * sxy - sx * sy) / (fit_n * sxx - sx * sx);
        eta_tail_ = std::clamp(-slope, 6.0, 600.0);
    }
    c_tail_ = std::max(fg.back(), 1e-300) * std::pow(z_back, eta_tail_);
    const double tail_mass = c_tail_ * std::pow(z_back, 1.0 - eta_tail_) / (eta_tail_ - 1.0);
    const double tail_mu = c_tail_ * std::pow(z_back, 2.0 - eta_tail_) / (eta_tail_ - 2.0);

    // Bulk integrals with the density linear between nodes.
    double bulk_mass = 0.0, bulk_mu = 0.0;
    for (int i = 0; i + 1 < table_n; ++i) {
        const double dz = z_[i + 1] - z_[i];
        bulk_mass += 0.5 * (fg[i] + fg[i + 1]) * dz;
        bulk_mu +=
            (fg[i] * (2.0 * z_[i] + z_[i + 1]) + fg[i + 1] * (z_[i] + 2.0 * z_[i + 1])) * dz / 6.0;
    }

    // Head on [0, z0]: f = a z^{d-1} + b z^{2d-1}, pinned by the exact total
    // mass and first moment so the head contributes no low-order bias.
    double mass_target = 1.0 - bulk_mass - tail_mass;
    double mu_target = m[1] - bulk_mu - tail_mu;
    if (mass_target < 0.0) {
        const double scale = (1.0 - tail_mass) / bulk_mass;
        for (double& v : fg) v *= scale;
        bulk_mass *= scale;
        bulk_mu *= scale;
        mass_target = 0.0;
        mu_target = 0.0;
    }
    const double d2 = 2.0 * d1_;
    const double i1 = std::pow(z0, d1_) / d1_, i2 = std::pow(z0, d2) / d2;
    const double j1 = std::pow(z0, d1_ + 1.0) / (d1_ + 1.0),
                 j2 = std::pow(z0, d2 + 1.0) / (d2 + 1.0);
    const double det = i1 * j2 - i2 * j1;
    a_head_ = 0.0;
    b_head_ = 0.0;
    if (mass_target > 0.0 && std::fabs(det) > 1e-300) {
        a_head_ = (mass_target * j2 - i2 * mu_target) / det;
        b_head_ = (i1 * mu_target - mass_target * j1) / det;
        if (a_head_ < 0.0 || a_head_ + b_head_ * std::pow(z0, d2 - d1_) < 0.0) {
            a_head_ = mass_target * d1_ / std::pow(z0, d1_);
            b_head_ = 0.0;
        }
    }
    head_mass_ = a_head_ * i1 + b_head_ * i2;

    // Cumulative table; isotonic by construction (density clamped >= 0),
    // renormalized so the tail completes the law to exactly 1.
    cdf_.resize(table_n);
    double cum = head_mass_;
    cdf_[0] = cum;
    for (int i = 1; i < table_n; ++i) {
        cum += 0.5 * (fg[i - 1] + fg[i]) * (z_[i] - z_[i - 1]);
        cdf_[i] = cum;
    }
    const double correction = (1.0 - tail_mass) / cdf_.back();
    for (double& v : cdf_) v *= correction;
    head_mass_ *= correction;
    a_head_ *= correction;
    b_head_ *= correction;
    for (int i = 1; i < table_n; ++i) cdf_[i] = std::max(cdf_[i], cdf_[i - 1]);
}

} // namespace

SamplerBackend default_backend(const specfun::KSParams& params) {
    if (params.alpha == 1.0 && params.gamma == 0.0) return SamplerBackend::DegenerateOne;
    if (params.gamma == 0.0) return SamplerBackend::StableInverse;
    return SamplerBackend::InverseCDF;
}

namespace {

MomentGateReport run_moment_gate(const ZSampler& sampler, const specfun::KSParams& params) {
    MomentGateReport rep;
    rep.backend = sampler.backend();
    const std::vector<double> m = specfun::ks_moments(params, 4);
    for (std::size_t k = 0; k < 4; ++k) rep.target[k] = m[k + 1];

    std::array<double, 4> sums{};
    const int dims = sampler.uniform_dims();
    if (dims >= 1 && dims <= 3) {
        // Fixed-dimension transforms are driven with a Kronecker
        // low-discrepancy sequence: at 1e5 draws a plain pseudo-random
        // fourth-moment estimate carries >1% noise of its own for some
        // admissible parameters, which would turn the 1% gate into a coin
        // flip. The quasi-random estimate resolves the sampler's actual bias
        // well below the gate tolerance, deterministically.
        static constexpr double alphas1[] = {0.6180339887498949};
        static constexpr double alphas2[] = {0.7548776662466927, 0.5698402909980532};
        static constexpr double alphas3[] = {0.8191725133961645, 0.6710436067037893,
                                             0.5497004779019703};
        const double* alphas = dims == 1 ? alphas1 : dims == 2 ? alphas2 : alphas3;
        double u[3];
        for (std::size_t i = 0; i < kCalibrationDraws; ++i) {
            for (int d = 0; d < dims; ++d) {
                double v = std::fma(static_cast<double>(i + 1), alphas[d], 0.5);
                v -= std::floor(v);
                u[d] = std::min(std::max(v, 1e-13), 1.0 - 1e-13);
            }
            const double zv = sampler.sample_from_uniforms(u);
            double p = 1.0;
            for (std::size_t k = 0; k < 4; ++k) {
                p *= zv;
                sums[k] += p;
            }
        }
    } else {
        for (std::size_t i = 0; i < kCalibrationDraws; ++i) {
            Stream s(kCalibrationSeed, i);
            const double zv = sampler.sample(s);
            double p = 1.0;
            for (std::size_t k = 0; k < 4; ++k) {
                p *= zv;
                sums[k] += p;
            }
        }
    }
    rep.passed = true;
    for (std::size_t k = 0; k < 4; ++k) {
        rep.empirical[k] = sums[k] / static_cast<double>(kCalibrationDraws);
        rep.rel_err[k] = std::fabs(rep.empirical[k] - rep.target[k]) / rep.target[k];
        if (rep.rel_err[k] > 0.01) rep.passed = false;
    }
    return rep;
}

} // namespace

std::unique_ptr<ZSampler> make_sampler(SamplerBackend backend, const specfun::KSParams& params,
                                       std::size_t m_z, MomentGateReport* report) {
    std::unique_ptr<ZSampler> sampler;
    switch (backend) {
        case SamplerBackend::DegenerateOne:
            if (params.alpha != 1.0 || params.gamma != 0.0)
                throw parameter_error("degenerate-one backend requires (alpha, gamma) = (1, 0)");
            sampler = std::make_unique<DegenerateSampler>();
            if (report) {
                *report = MomentGateReport{};
                report->backend = backend;
                for (std::size_t k = 0; k < 4; ++k) {
                    report->target[k] = 1.0;
                    report->empirical[k] = 1.0;
                }
            }
            return sampler;
        case SamplerBackend::StableInverse:
            if (params.gamma != 0.0)
                throw parameter_error("stable-inverse backend requires gamma = 0");
            if (params.alpha >= 1.0)
                throw parameter_error("stable-inverse backend requires alpha < 1");
            sampler = std::make_unique<StableInverseSampler>(params.alpha);
            break;
        case SamplerBackend::BetaProduct:
            sampler = std::make_unique<BetaProductSampler>(params, m_z);
            break;
        case SamplerBackend::InverseCDF:
            if (params.alpha >= 1.0)
                throw parameter_error("inverse-cdf backend requires alpha < 1");
            sampler = std::make_unique<InverseCdfSampler>(params);
            break;
    }
    const MomentGateReport rep = run_moment_gate(*sampler, params);
    if (report) *report = rep;
    if (!rep.passed) throw sampler_gate_error(rep.to_string());
    return sampler;
}

namespace {

struct SamplerCacheKey {
    std::uint64_t alpha_bits, gamma_bits;
    SamplerBackend backend;
    std::size_t m_z;
    bool operator<(const SamplerCacheKey& o) const {
        return std::tie(alpha_bits, gamma_bits, backend, m_z) <
               std::tie(o.alpha_bits, o.gamma_bits, o.backend, o.m_z);
    }
};

struct CachedSampler {
    std::shared_ptr<ZSampler> sampler;
    MomentGateReport gate;
};

CachedSampler cached_sampler(SamplerBackend backend, const specfun::KSParams& params,
                             std::size_t m_z) {
    static std::mutex mu;
    static std::map<SamplerCacheKey, CachedSampler> cache;
    SamplerCacheKey key{0, 0, backend, m_z};
    std::memcpy(&key.alpha_bits, &params.alpha, 8);
    std::memcpy(&key.gamma_bits, &params.gamma, 8);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    CachedSampler entry;
    MomentGateReport rep;
    entry.sampler = make_sampler(backend, params, m_z, &rep);
    entry.gate = rep;
    cache.emplace(key, entry);
    return entry;
}

} // namespace

int ClassicalPath::state_at(double u) const {
    const auto it = std::upper_bound(event_times.begin(), event_times.end(), u);
    if (it == event_times.begin()) return 0;
    return states[static_cast<std::size_t>(it - event_times.begin()) - 1];
}

ClassicalPath simulate_classical_path(const generator::QueueParams& queue, double horizon,
                                      Stream& rng) {
    if (!(horizon >= 0.0)) throw parameter_error("simulate_classical_path: horizon must be >= 0");
    ClassicalPath path;
    path.horizon = horizon;
    const double lambda = queue.lambda, mu = queue.mu;
    const double birth_prob = lambda / (lambda + mu);
    double t = 0.0;
    int state = 0;
    while (true) {
        const double rate = state == 0 ? lambda : lambda + mu;
        t += -std::log(rng.next_double()) / rate;
        if (!(t <= horizon)) break;
        if (state == 0) {
            state = 1;
        } else {
            state += rng.next_double() < birth_prob ? 1 : -1;
        }
        path.event_times.push_back(t);
        path.states.push_back(state);
    }
    return path;
}

std::vector<double> SimConfig::default_time_grid(double t_max, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    t[0] = 1e-6; // avoid the singular stretched power term at t = 0
    return t;
}

void SimConfig::validate() const {
    if (times.empty()) throw parameter_error("SimConfig: empty time grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) throw parameter_error("SimConfig: times must be > 0");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw parameter_error("SimConfig: times must be increasing");
    }
    if (replications < 1) throw parameter_error("SimConfig: replications must be >= 1");
    if (!(t_star >= times.front()) || !(t_star <= times.back()))
        throw parameter_error("SimConfig: t_star must lie inside the time grid");
    if (n_max < 1) throw parameter_error("SimConfig: n_max must be >= 1");
}

double sample_Z(const SimConfig& config, Stream& rng) {
    const SamplerBackend backend = config.backend.value_or(default_backend(config.ks));
    return cached_sampler(backend, config.ks, config.beta_truncation).sampler->sample(rng);
}

SimResult run_simulation(const SimConfig& config) {
    config.validate();
    const SamplerBackend backend = config.backend.value_or(default_backend(config.ks));
    const CachedSampler cached = cached_sampler(backend, config.ks, config.beta_truncation);

    const std::size_t nt = config.times.size();
    const std::size_t R = config.replications;
    const double beta = config.ks.beta;

    std::vector<double> sum_p0(nt, 0.0);
    std::vector<double> sum_n(nt, 0.0), sum_n2(nt, 0.0);
    std::vector<std::size_t> snapshot_counts(config.n_max + 2, 0); // last = overflow
    std::array<double, 4> z_sums{};
    std::size_t retries = 0;

    const double z_cap = cached.sampler->high_quantile();
    const double t_big = std::max(config.times.back(), config.t_star);
    const double horizon_cap = std::pow(t_big, beta) * z_cap;

    std::vector<double> op_times(nt);
    for (std::size_t r = 0; r < R; ++r) {
        Stream rng(config.seed, r);
        const double z = cached.sampler->sample(rng);
        double p = 1.0;
        for (std::size_t k = 0; k < 4; ++k) {
            p *= z;
            z_sums[k] += p;
        }
        for (std::size_t i = 0; i < nt; ++i) op_times[i] = std::pow(config.times[i], beta) * z;
        const double u_star = std::pow(config.t_star, beta) * z;
        const double horizon = std::max(op_times.back(), u_star);
        if (horizon > horizon_cap) ++retries; // cap exceeded: rerun with the larger horizon

        const ClassicalPath path = simulate_classical_path(config.queue, horizon, rng);

        std::size_t ev = 0;
        const std::size_t n_events = path.event_times.size();
        for (std::size_t i = 0; i < nt; ++i) {
            while (ev < n_events && path.event_times[ev] <= op_times[i]) ++ev;
            const int state = ev == 0 ? 0 : path.states[ev - 1];
            if (state == 0) sum_p0[i] += 1.0;
            sum_n[i] += state;
            sum_n2[i] += static_cast<double>(state) * state;
        }
        const int s_star = path.state_at(u_star);
        if (static_cast<std::size_t>(s_star) > config.n_max)
            ++snapshot_counts[config.n_max + 1];
        else
            ++snapshot_counts[static_cast<std::size_t>(s_star)];
    }

    SimResult res;
    res.times = config.times;
    res.gate = cached.gate;
    res.horizon_cap_retries = retries;
    res.p0_mean.resize(nt);
    res.p0_se.resize(nt);
    res.mean_curve.resize(nt);
    res.mean_se.resize(nt);
    const double dr = static_cast<double>(R);
    for (std::size_t i = 0; i < nt; ++i) {
        const double p = sum_p0[i] / dr;
        res.p0_mean[i] = p;
        res.p0_se[i] = R > 1 ? std::sqrt(std::max(0.0, p * (1.0 - p) / (dr - 1.0))) : 0.0;
        const double mean = sum_n[i] / dr;
        res.mean_curve[i] = mean;
        const double var = R > 1 ? std::max(0.0, (sum_n2[i] - dr * mean * mean) / (dr - 1.0)) : 0.0;
        res.mean_se[i] = std::sqrt(var / dr);
    }
    res.snapshot_p.resize(config.n_max + 1);
    res.snapshot_se.resize(config.n_max + 1);
    for (std::size_t n = 0; n <= config.n_max; ++n) {
        const double p = static_cast<double>(snapshot_counts[n]) / dr;
        res.snapshot_p[n] = p;
        res.snapshot_se[n] = R > 1 ? std::sqrt(std::max(0.0, p * (1.0 - p) / (dr - 1.0))) : 0.0;
    }
    {
        const double p = static_cast<double>(snapshot_counts[config.n_max + 1]) / dr;
        res.overflow_p = p;
        res.overflow_se = R > 1 ? std::sqrt(std::max(0.0, p * (1.0 - p) / (dr - 1.0))) : 0.0;
    }
    for (std::size_t k = 0; k < 4; ++k) res.z_moments[k] = z_sums[k] / dr;
    return res;
}

} // namespace fracq::mc
