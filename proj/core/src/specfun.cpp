#include "fracq/specfun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace fracq::specfun {

namespace mp = boost::multiprecision;

namespace {

constexpr double kLn10 = 2.302585092994045684;

void default_warning(const char* message) { std::fprintf(stderr, "fracq: %s\n", message); }

std::atomic<WarningHandler> g_warning_handler{&default_warning};

void warn(const std::string& msg) {
    if (WarningHandler h = g_warning_handler.load(std::memory_order_relaxed)) h(msg.c_str());
}

template <unsigned Digits>
using Wide = mp::number<mp::cpp_bin_float<Digits>, mp::et_off>;

// The coefficient ratios c_n/c_{n-1} = Gamma(1+(n-1)beta+gamma) / Gamma(1+n beta)
// are built from gamma-function values on the lattice {1 + j/q} whenever alpha
// and gamma share a small common denominator q. Successive lattice values obey
// Gamma(1+j/q) = (j/q) Gamma(1+(j-q)/q), so the table needs only q+1 seed
// calls to tgamma and one wide multiply per step afterwards.
struct LatticeInfo {
    bool rational = false;
    long q = 0;
    long p_alpha = 0;
    long p_gamma = 0;
    long p_beta = 0;
};

LatticeInfo detect_lattice(double alpha, double gamma) {
    for (long q = 1; q <= 64; ++q) {
        const double pa = alpha * static_cast<double>(q);
        const double pg = gamma * static_cast<double>(q);
        const long ipa = std::llround(pa);
        const long ipg = std::llround(pg);
        if (ipa >= 1 && std::fabs(pa - ipa) < 1e-9 * q && std::fabs(pg - ipg) < 1e-9 * q) {
            return LatticeInfo{true, q, ipa, ipg, ipa + ipg};
        }
    }
    return LatticeInfo{};
}

// Ratio table at one working precision. `ratios[n-1]` holds c_n/c_{n-1}.
// Growth happens under the owning ParamTables mutex; readers access the
// published prefix lock-free (deque elements are address-stable).
template <unsigned Digits>
struct RungTable {
    using Real = Wide<Digits>;

    std::deque<Real> ratios;
    std::atomic<std::size_t> ready{0};

    std::vector<Real> ring; // ring[j % (q+1)] = Gamma(1 + j/q)
    long j_cur = -1;
    std::size_t n_done = 0;

    void extend(const KSParams& p, const LatticeInfo& lat, std::size_t n_target) {
        if (n_target <= n_done) return;
        if (lat.rational) {
            const long q = lat.q;
            const Real qr(static_cast<double>(q));
            if (j_cur < 0) {
                ring.resize(static_cast<std::size_t>(q) + 1);
                for (long j = 0; j <= q; ++j) {
                    ring[static_cast<std::size_t>(j % (q + 1))] =
                        boost::math::tgamma(Real(1) + Real(static_cast<double>(j)) / qr);
                }
                j_cur = q;
            }
            for (std::size_t n = n_done + 1; n <= n_target; ++n) {
                const long jB = static_cast<long>(n) * lat.p_beta;
                const long jA = jB - lat.p_alpha;
                while (j_cur < jB) {
                    ++j_cur;
                    // Gamma(1+j/q) = (j/q) Gamma(1+(j-q)/q); the source slot
                    // differs from the destination, so no aliasing.
                    const Real& prev = ring[static_cast<std::size_t>((j_cur - q) % (q + 1))];
                    ring[static_cast<std::size_t>(j_cur % (q + 1))] =
                        prev * (Real(static_cast<double>(j_cur)) / qr);
                }
                const Real& gA = ring[static_cast<std::size_t>(jA % (q + 1))];
                const Real& gB = ring[static_cast<std::size_t>(jB % (q + 1))];
                ratios.push_back(gA / gB);
            }
        } else {
            // Slow generic path for parameters off any small rational lattice.
            const Real beta = Real(p.alpha) + Real(p.gamma);
            const Real gamma(p.gamma);
            for (std::size_t n = n_done + 1; n <= n_target; ++n) {
                const Real A = Real(1) + Real(static_cast<double>(n - 1)) * beta + gamma;
                const Real B = Real(1) + Real(static_cast<double>(n)) * beta;
                ratios.push_back(exp(boost::math::lgamma(A) - boost::math::lgamma(B)));
            }
        }
        n_done = n_target;
        ready.store(n_target, std::memory_order_release);
    }
};

struct ParamTables {
    KSParams p;
    LatticeInfo lat;
    std::mutex mu;

    std::deque<double> log_c; // log c_0, log c_1, ...
    std::atomic<std::size_t> log_ready{0};

    RungTable<30> t30;
    RungTable<50> t50;
    RungTable<100> t100;
    RungTable<150> t150;
    RungTable<200> t200;
    RungTable<250> t250;
    RungTable<350> t350;
    RungTable<512> t512;

    explicit ParamTables(const KSParams& params)
        : p(params), lat(detect_lattice(params.alpha, params.gamma)) {
        log_c.push_back(0.0);
        log_ready.store(1, std::memory_order_release);
    }

    double ratio_arg_low(std::size_t n) const {
        if (lat.rational) {
            return 1.0 + static_cast<double>((static_cast<long>(n) - 1) * lat.p_beta + lat.p_gamma) /
                             static_cast<double>(lat.q);
        }
        return 1.0 + static_cast<double>(n - 1) * p.beta + p.gamma;
    }
    double ratio_arg_high(std::size_t n) const {
        if (lat.rational) {
            return 1.0 + static_cast<double>(static_cast<long>(n) * lat.p_beta) /
                             static_cast<double>(lat.q);
        }
        return 1.0 + static_cast<double>(n) * p.beta;
    }

    void ensure_log_c(std::size_t n) {
        if (log_ready.load(std::memory_order_acquire) > n) return;
        std::lock_guard<std::mutex> lock(mu);
        for (std::size_t k = log_c.size(); k <= n; ++k) {
            const double lr = std::lgamma(ratio_arg_low(k)) - std::lgamma(ratio_arg_high(k));
            log_c.push_back(log_c[k - 1] + lr);
        }
        log_ready.store(log_c.size(), std::memory_order_release);
    }
};

std::shared_ptr<ParamTables> tables_for(const KSParams& p) {
    static std::mutex cache_mu;
    static std::map<std::pair<std::uint64_t, std::uint64_t>, std::shared_ptr<ParamTables>> cache;

    std::uint64_t ka, kg;
    static_assert(sizeof(double) == 8);
    std::memcpy(&ka, &p.alpha, 8);
    std::memcpy(&kg, &p.gamma, 8);

    std::lock_guard<std::mutex> lock(cache_mu);
    auto& slot = cache[{ka, kg}];
    if (!slot) slot = std::make_shared<ParamTables>(p);
    return slot;
}

struct ScanResult {
    double ln_peak = 0.0;   // log of the largest-magnitude term
    std::size_t n_peak = 0; // index of that term
    std::size_t n_cap = 0;  // safe summation length
};

// Walks the term magnitudes log|T_n| = log c_n + n log x to find the
// cancellation peak and a summation cap where terms are negligible at the
// ceiling precision.
ScanResult scan_terms(ParamTables& T, double x) {
    const double lnx = std::log(x);
    const double drop = (512 + 40) * kLn10;
    ScanResult r;
    std::size_t n = 0;
    while (true) {
        ++n;
        if (n > 2'000'000) throw numeric_error("specfun: series term scan did not terminate");
        T.ensure_log_c(n);
        const double lt = T.log_c[n] + static_cast<double>(n) * lnx;
        if (lt > r.ln_peak) {
            r.ln_peak = lt;
            r.n_peak = n;
        } else if (n > r.n_peak && lt < r.ln_peak - drop) {
            r.n_cap = n;
            break;
        }
    }
    return r;
}

// Direct double-precision summation; used when the cancellation budget is
// negligible. Terms are computed independently from the log-coefficient table.
double sum_double(ParamTables& T, double x, const ScanResult& sc, EvalInfo* info) {
    const double lnx = std::log(x);
    double sum = 1.0, comp = 0.0;
    std::size_t terms = 1;
    for (std::size_t n = 1; n <= sc.n_cap; ++n) {
        const double mag = std::exp(T.log_c[n] + static_cast<double>(n) * lnx);
        const double term = (n % 2 == 0) ? mag : -mag;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        ++terms;
        if (n > sc.n_peak && mag < 1e-22) break;
    }
    if (info) {
        info->raw = sum;
        info->digits = 0;
        info->terms = terms;
    }
    return sum;
}

template <unsigned Digits>
double sum_wide(ParamTables& T, RungTable<Digits>& R, double x, const ScanResult& sc,
                EvalInfo* info) {
    using Real = Wide<Digits>;
    if (R.ready.load(std::memory_order_acquire) < sc.n_cap) {
        std::lock_guard<std::mutex> lock(T.mu);
        R.extend(T.p, T.lat, sc.n_cap + 16);
    }
    const Real xneg(-x);
    Real S(1), Tn(1);
    auto it = R.ratios.cbegin();
    std::size_t terms = 1;
    // Stop once terms fall below the rung's achievable absolute accuracy
    // (rounding floor ~ 10^{peak - Digits}, with guard digits to spare).
    const double stop_threshold =
        std::pow(10.0, sc.ln_peak / kLn10 - static_cast<double>(Digits) + 8.0);
    for (std::size_t n = 1; n <= sc.n_cap; ++n, ++it) {
        Tn *= xneg;
        Tn *= *it;
        S += Tn;
        ++terms;
        if (n > sc.n_peak) {
            const double td = std::fabs(static_cast<double>(Tn));
            if (td < stop_threshold) break;
        }
    }
    if (info) {
        info->raw = static_cast<double>(S);
        info->digits = static_cast<int>(Digits);
        info->terms = terms;
    }
    return static_cast<double>(S);
}

int digits_required(const ScanResult& sc) {
    const double peak10 = sc.ln_peak / kLn10;
    return static_cast<int>(std::ceil(peak10 + 36.0));
}

double eval_series(const KSParams& p, double x, EvalInfo* info) {
    auto T = tables_for(p);
    const ScanResult sc = scan_terms(*T, x);

    // Plain double suffices when almost nothing cancels.
    if (sc.ln_peak / kLn10 + 16.0 <= 17.0) return sum_double(*T, x, sc, info);

    const int need = digits_required(sc);
    if (need > precision_ceiling()) {
        std::ostringstream os;
        const double xmax = admissible_x_max(p);
        os << "ks_eval(alpha=" << p.alpha << ", gamma=" << p.gamma << "): x = " << x
           << " needs " << need << " digits, above the " << precision_ceiling()
           << "-digit ceiling; admissible range is x <= " << xmax;
        throw precision_error(os.str(), xmax);
    }
    if (need <= 30) return sum_wide(*T, T->t30, x, sc, info);
    if (need <= 50) return sum_wide(*T, T->t50, x, sc, info);
    if (need <= 100) return sum_wide(*T, T->t100, x, sc, info);
    if (need <= 150) return sum_wide(*T, T->t150, x, sc, info);
    if (need <= 200) return sum_wide(*T, T->t200, x, sc, info);
    if (need <= 250) return sum_wide(*T, T->t250, x, sc, info);
    if (need <= 350) return sum_wide(*T, T->t350, x, sc, info);
    return sum_wide(*T, T->t512, x, sc, info);
}

double clamp_result(const KSParams& p, double x, double raw) {
    if (raw < -1e-9 || raw > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "ks_eval(alpha=" << p.alpha << ", gamma=" << p.gamma << ", x=" << x
           << "): raw series value " << raw << " lies outside [0,1] beyond tolerance";
        warn(os.str());
    }
    if (raw < 0.0) return 0.0;
    if (raw > 1.0) return 1.0;
    return raw;
}

} // namespace

KSParams::KSParams(double alpha_, double gamma_) : alpha(alpha_), gamma(gamma_) {
    if (!(alpha > 0.0) || alpha > 1.0 || !std::isfinite(alpha))
        throw parameter_error("KSParams: alpha must lie in (0, 1]");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw parameter_error("KSParams: gamma must be >= 0");
    beta = alpha + gamma;
    if (beta > 1.0 + 1e-12) throw parameter_error("KSParams: alpha + gamma must be <= 1");
    a = alpha;
    l = gamma / alpha;
    m = 1.0 + l;
}

KSCoefficients ks_coefficients(const KSParams& params, std::size_t n_terms) {
    KSCoefficients out;
    out.values.reserve(n_terms + 1);
    out.log_values.reserve(n_terms + 1);
    out.values.push_back(1.0);
    out.log_values.push_back(0.0);
    double lc = 0.0;
    for (std::size_t n = 1; n <= n_terms; ++n) {
        const double k = static_cast<double>(n - 1);
        // Literal Gamma-ratio product over the induced (a, m, l) triple.
        lc += std::lgamma(1.0 + params.a * (k * params.m + params.l)) -
              std::lgamma(1.0 + params.a * (k * params.m + params.l + 1.0));
        out.log_values.push_back(lc);
        const double v = std::exp(lc);
        if (v == 0.0 || !std::isfinite(v)) {
            out.log_domain = true;
            out.values.push_back(0.0);
        } else {
            out.values.push_back(v);
        }
    }
    return out;
}

double ks_eval(const KSParams& params, double x, EvalInfo* info) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw parameter_error("ks_eval: x must be finite and >= 0");
    if (x == 0.0) {
        if (info) *info = EvalInfo{1.0, 0, 1};
        return 1.0;
    }
    EvalInfo local;
    const double raw = eval_series(params, x, info ? info : &local);
    return clamp_result(params, x, raw);
}

double ml_eval(double beta, double x, EvalInfo* info) {
    if (!(beta > 0.0) || beta > 1.0) throw parameter_error("ml_eval: beta must lie in (0, 1]");
    return ks_eval(KSParams(beta, 0.0), x, info);
}

double kernel_eval(const KernelKind& kind, double theta, double t) {
    if (!(theta >= 0.0) || !std::isfinite(theta))
        throw parameter_error("kernel_eval: theta must be >= 0");
    if (!(t >= 0.0) || !std::isfinite(t)) throw parameter_error("kernel_eval: t must be >= 0");
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Exponential>) {
                return std::exp(-theta * t);
            } else if constexpr (std::is_same_v<K, MittagLeffler>) {
                return ml_eval(k.beta, theta * std::pow(t, k.beta));
            } else {
                return ks_eval(k.params, theta * std::pow(t, k.params.beta));
            }
        },
        kind);
}

std::vector<double> ks_moments(const KSParams& params, std::size_t k_max) {
    if (k_max < 1) throw parameter_error("ks_moments: k_max must be >= 1");
    const KSCoefficients c = ks_coefficients(params, k_max);
    std::vector<double> m(k_max + 1);
    m[0] = 1.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        m[k] = std::exp(std::lgamma(static_cast<double>(k) + 1.0) + c.log_values[k]);
    }
    return m;
}

double admissible_x_max(const KSParams& params) {
    auto T = tables_for(params);
    const int ceiling = precision_ceiling();
    auto digits_at = [&](double x) {
        const ScanResult sc = scan_terms(*T, x);
        return digits_required(sc);
    };
    double lo = 1.0, hi = 1.0;
    if (digits_at(lo) > ceiling) {
        lo = 1e-3;
        hi = 1.0;
    } else {
        while (digits_at(hi) <= ceiling) {
            hi *= 2.0;
            if (hi > 1e12) return hi;
        }
    }
    for (int i = 0; i < 80 && (hi - lo) > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (digits_at(mid) <= ceiling)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

namespace {
std::atomic<int> g_precision_ceiling{512};
} // namespace

int precision_ceiling() { return g_precision_ceiling.load(std::memory_order_relaxed); }

void set_precision_ceiling(int digits) {
    g_precision_ceiling.store(std::clamp(digits, 40, 512), std::memory_order_relaxed);
}

void set_warning_handler(WarningHandler handler) {
    g_warning_handler.store(handler ? handler : &default_warning, std::memory_order_relaxed);
}

} // namespace fracq::specfun
