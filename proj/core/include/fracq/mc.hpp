#ifndef FRACQ_MC_HPP
#define FRACQ_MC_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracq/generator.hpp"
#include "fracq/specfun.hpp"

namespace fracq::mc {

// Counter-based splittable stream (SplitMix64 output function). Streams are
// keyed by (seed, stream index), so results are reproducible regardless of
// scheduling or evaluation order.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t next_u64();
    // Uniform double in the open interval (0, 1).
    double next_double();

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

enum class SamplerBackend { DegenerateOne, StableInverse, BetaProduct, InverseCDF };

std::string backend_name(SamplerBackend backend);
SamplerBackend backend_from_name(const std::string& name);

// One-sided alpha-stable variate with Laplace transform exp(-u^alpha)
// (Kanter's representation), 0 < alpha < 1.
double sample_stable(double alpha, Stream& rng);

// Startup validation of a sampler backend: empirical moments of 1e5
// fixed-stream calibration draws against the analytic targets k! c_k.
struct MomentGateReport {
    SamplerBackend backend = SamplerBackend::DegenerateOne;
    std::array<double, 4> target{};    // m_1..m_4
    std::array<double, 4> empirical{};
    std::array<double, 4> rel_err{};
    bool passed = true;
    std::string to_string() const;
};

class ZSampler {
public:
    virtual ~ZSampler() = default;
    virtual double sample(Stream& rng) const = 0;
    virtual SamplerBackend backend() const = 0;
    // Approximate 1 - 1e-6 quantile of Z, used for horizon capping.
    virtual double high_quantile() const = 0;
    // Number of uniforms one draw consumes when fixed, else -1. Fixed-dim
    // samplers expose the direct transform so the calibration gate can drive
    // them with low-discrepancy points.
    virtual int uniform_dims() const { return -1; }
    virtual double sample_from_uniforms(const double*) const { return 0.0; }
};

// Builds a sampler for the given backend and runs the moment gate (except for
// the degenerate backend). Throws sampler_gate_error when any k <= 4 moment is
// off by more than 1%; `report`, when given, is filled either way.
std::unique_ptr<ZSampler> make_sampler(SamplerBackend backend, const specfun::KSParams& params,
                                       std::size_t m_z, MomentGateReport* report = nullptr);

// DegenerateOne at (1,0); StableInverse for gamma = 0; InverseCDF otherwise.
SamplerBackend default_backend(const specfun::KSParams& params);

// Classical M/M/1 sample path: competing exponential clocks, recorded up to
// the horizon in operational-time units. states[k] is the queue length after
// event k; the state before the first event is 0.
struct ClassicalPath {
    std::vector<double> event_times;
    std::vector<int> states;
    double horizon = 0.0;

    int state_at(double u) const;
};

ClassicalPath simulate_classical_path(const generator::QueueParams& queue, double horizon,
                                      Stream& rng);

// Reference experiment description.
struct SimConfig {
    generator::QueueParams queue{0.8, 1.0};
    specfun::KSParams ks{0.8, 0.2};
    std::vector<double> times = default_time_grid();
    std::size_t replications = 3000;
    double t_star = 8.0;
    std::size_t n_max = 35;
    std::size_t beta_truncation = 250; // M_Z, beta-product factor count
    std::uint64_t seed = 20260117;
    std::optional<SamplerBackend> backend; // default: default_backend(ks)

    // t_i = t_max i/(n-1) with t_0 floored at 1e-6.
    static std::vector<double> default_time_grid(double t_max = 20.0, std::size_t n = 250);
    void validate() const;
};

struct SimResult {
    std::vector<double> times;
    std::vector<double> p0_mean, p0_se;
    std::vector<double> mean_curve, mean_se;
    std::vector<double> snapshot_p, snapshot_se; // states 0..n_max at t_star
    double overflow_p = 0.0, overflow_se = 0.0;  // mass above n_max at t_star
    std::array<double, 4> z_moments{};           // empirical E[Z^k] over replications
    MomentGateReport gate;
    std::size_t horizon_cap_retries = 0;
};

// Time-change Monte Carlo: one multiplier Z per replication, one classical
// path evaluated at the operational times t_i^{alpha+gamma} Z.
SimResult run_simulation(const SimConfig& config);

// Draws one multiplier using the configured backend (sampler construction and
// its gate run once per (params, backend) and are cached).
double sample_Z(const SimConfig& config, Stream& rng);

} // namespace fracq::mc

#endif
