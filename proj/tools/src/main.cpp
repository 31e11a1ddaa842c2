#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <fracq/errors.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace {

// Exit codes: 0 ok, 1 usage/config, 2 precision, 3 model/stability, 4 sampler gate.
constexpr int kExitUsage = 1;
constexpr int kExitPrecision = 2;
constexpr int kExitModel = 3;
constexpr int kExitSamplerGate = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    double lambda = -1, mu = -1, alpha = -1, gamma = -1, t_max = -1, t_star = -1;
    long long n_times = -1, replications = -1, n_max = -1, m_z = -1, seed = -1;
    std::string backend;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "flat key=value configuration file");
    cmd->add_option("--out-dir", o.out_dir, "output directory (default: out)");
    cmd->add_option("--lambda", o.lambda, "arrival rate");
    cmd->add_option("--mu", o.mu, "service rate");
    cmd->add_option("--alpha", o.alpha, "fractional order alpha in (0,1]");
    cmd->add_option("--gamma", o.gamma, "stretching exponent gamma >= 0");
    cmd->add_option("--t-max", o.t_max, "time horizon");
    cmd->add_option("--t-star", o.t_star, "snapshot time");
    cmd->add_option("--n-times", o.n_times, "number of grid times");
    cmd->add_option("--replications", o.replications, "Monte Carlo replications");
    cmd->add_option("--n-max", o.n_max, "displayed truncation level");
    cmd->add_option("--m-z", o.m_z, "beta-product factor count");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--backend", o.backend,
                    "sampler backend: auto, degenerate-one, stable-inverse, beta-product, "
                    "inverse-cdf");
}

fracq::cli::RunConfig make_config(const CommonOpts& o) {
    fracq::cli::RunConfig cfg;
    if (!o.config_path.empty()) cfg = fracq::cli::RunConfig::load(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.lambda >= 0) cfg.lambda = o.lambda;
    if (o.mu >= 0) cfg.mu = o.mu;
    if (o.alpha >= 0) cfg.alpha = o.alpha;
    if (o.gamma >= 0) cfg.gamma = o.gamma;
    if (o.t_max >= 0) cfg.t_max = o.t_max;
    if (o.t_star >= 0) cfg.t_star = o.t_star;
    if (o.n_times >= 0) cfg.n_times = static_cast<std::size_t>(o.n_times);
    if (o.replications >= 0) cfg.replications = static_cast<std::size_t>(o.replications);
    if (o.n_max >= 0) cfg.n_max = static_cast<std::size_t>(o.n_max);
    if (o.m_z >= 0) cfg.m_z = static_cast<std::size_t>(o.m_z);
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.backend.empty()) cfg.sampler_backend = o.backend;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracq: transient analysis of the stretched-fractional M/M/1 queue"};
    app.require_subcommand(1);

    fracq::cli::KsOptions ks_opt;
    CLI::App* ks = app.add_subcommand("ks", "evaluate the relaxation kernel E_{a,m,l}(-x)");
    ks->add_option("--alpha", ks_opt.alpha, "fractional order alpha in (0,1]")->required();
    ks->add_option("--gamma", ks_opt.gamma, "stretching exponent gamma >= 0");
    ks->add_option("--x", ks_opt.x_values, "evaluation point (repeatable)");
    ks->add_option("--x-grid", ks_opt.x_grid, "start:stop:count evaluation grid");
    std::size_t coeffs_n = 0;
    CLI::Option* coeffs_opt =
        ks->add_option("--coeffs", coeffs_n, "print series coefficients c_0..c_N");

    CommonOpts solve_opts, sim_opts, fig_opts, cons_opts;
    std::string route = "spectral-ks";
    CLI::App* solve = app.add_subcommand("solve", "deterministic transient solution");
    solve->add_option("--route", route,
                      "solution route: spectral-ks, spectral-ml, laplace, classical");
    add_common(solve, solve_opts);

    CLI::App* simulate = app.add_subcommand("simulate", "time-change Monte Carlo experiment");
    add_common(simulate, sim_opts);

    std::string figure;
    CLI::App* figures = app.add_subcommand("figures", "reproduce a reference figure");
    figures->add_option("figure", figure, "p0, pn or mean")->required();
    add_common(figures, fig_opts);

    CLI::App* consistency =
        app.add_subcommand("consistency", "cross-route consistency report");
    add_common(consistency, cons_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (ks->parsed()) {
            if (*coeffs_opt) ks_opt.coeffs = coeffs_n;
            fracq::cli::cmd_ks(ks_opt, std::cout);
        } else if (solve->parsed()) {
            fracq::cli::cmd_solve(make_config(solve_opts), route);
        } else if (simulate->parsed()) {
            fracq::cli::cmd_simulate(make_config(sim_opts));
        } else if (figures->parsed()) {
            fracq::cli::cmd_figures(make_config(fig_opts), figure);
        } else if (consistency->parsed()) {
            fracq::cli::cmd_consistency(make_config(cons_opts), std::cout);
        }
    } catch (const fracq::precision_error& e) {
        std::fprintf(stderr, "precision error: %s\n", e.what());
        return kExitPrecision;
    } catch (const fracq::stability_error& e) {
        std::fprintf(stderr, "stability error: %s\n", e.what());
        return kExitModel;
    } catch (const fracq::sampler_gate_error& e) {
        std::fprintf(stderr, "sampler gate: %s\n", e.what());
        return kExitSamplerGate;
    } catch (const fracq::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return kExitModel;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return 0;
}
