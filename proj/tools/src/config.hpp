#ifndef FRACQ_TOOLS_CONFIG_HPP
#define FRACQ_TOOLS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <fracq/mc.hpp>

namespace fracq::cli {

// Flat key=value run configuration; defaults reproduce the reference
// experiment setup (lambda=0.8, mu=1.0, 250-point grid to t=20, R=3000,
// t*=8, n_max=35, M_Z=250, seed=20260117).
struct RunConfig {
    double lambda = 0.8;
    double mu = 1.0;
    double alpha = 0.8;
    double gamma = 0.2;
    double t_max = 20.0;
    std::size_t n_times = 250;
    std::size_t replications = 3000;
    double t_star = 8.0;
    std::size_t n_max = 35;
    std::size_t m_z = 250;
    std::uint64_t seed = 20260117;
    std::string sampler_backend = "auto";
    std::string out_dir = "out";

    bool operator==(const RunConfig&) const = default;

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    std::string serialize() const;

    // t_i = t_max i/(n-1) with the first point floored at 1e-6.
    std::vector<double> time_grid() const;
    mc::SimConfig sim_config() const;
    specfun::KSParams ks_params() const { return specfun::KSParams(alpha, gamma); }
    generator::QueueParams queue_params() const { return generator::QueueParams(lambda, mu); }
    // Support size used by the deterministic solvers (display keeps n_max).
    std::size_t solver_n_max() const { return std::max<std::size_t>(200, n_max); }
};

} // namespace fracq::cli

#endif
