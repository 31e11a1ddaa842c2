#include "fracq/fracops.hpp"

#include <algorithm>
#include <cmath>

#include "fracq/errors.hpp"

namespace fracq::fracops {

SampledFunction::SampledFunction(std::vector<double> grid_, std::vector<double> values_)
    : grid(std::move(grid_)), values(std::move(values_)) {
    if (grid.size() != values.size())
        throw parameter_error("SampledFunction: grid and values lengths differ");
    if (grid.empty()) throw parameter_error("SampledFunction: empty grid");
    if (grid.front() < 0.0) throw parameter_error("SampledFunction: t_0 must be >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1]))
            throw parameter_error("SampledFunction: grid must be strictly increasing");
    }
}

MeshSpec::MeshSpec(double t_min_, double t_max_, std::size_t n_points_, double grading_exponent_)
    : t_min(t_min_), t_max(t_max_), n_points(n_points_), grading_exponent(grading_exponent_) {
    if (!(t_min > 0.0)) throw parameter_error("MeshSpec: t_min must be > 0");
    if (!(t_min < t_max)) throw parameter_error("MeshSpec: t_min must be < t_max");
    if (n_points < 8) throw parameter_error("MeshSpec: n_points must be >= 8");
    if (!(grading_exponent >= 1.0)) throw parameter_error("MeshSpec: grading exponent must be >= 1");
}

double default_grading_exponent(const specfun::KSParams& params) {
    return std::min(2.0 / params.beta, 5.0);
}

double caputo_l1(const SampledFunction& f, double alpha, std::size_t i) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw parameter_error("caputo_l1: alpha must lie in (0, 1)");
    if (i < 1 || i >= f.size()) throw parameter_error("caputo_l1: index out of range");

    const double ti = f.grid[i];
    double acc = 0.0;
    // sum_k slope_k * [(t_i - t_k)^{1-alpha} - (t_i - t_{k+1})^{1-alpha}]
    double pow_left = std::pow(ti - f.grid[0], 1.0 - alpha);
    for (std::size_t k = 0; k < i; ++k) {
        const double dt = f.grid[k + 1] - f.grid[k];
        const double slope = (f.values[k + 1] - f.values[k]) / dt;
        const double pow_right = (k + 1 == i) ? 0.0 : std::pow(ti - f.grid[k + 1], 1.0 - alpha);
        acc += slope * (pow_left - pow_right);
        pow_left = pow_right;
    }
    return acc / std::tgamma(2.0 - alpha);
}

double stretched_apply(const SampledFunction& f, const specfun::KSParams& params, std::size_t i) {
    if (i >= f.size()) throw parameter_error("stretched_apply: index out of range");
    const double ti = f.grid[i];
    if (ti == 0.0)
        throw parameter_error("stretched_apply: singular prefactor t^{-gamma} at t = 0");
    if (params.alpha == 1.0) {
        // Degenerate operator d/dt; L1 collapses to the backward difference.
        if (i < 1) throw parameter_error("stretched_apply: index out of range");
        const double slope = (f.values[i] - f.values[i - 1]) / (f.grid[i] - f.grid[i - 1]);
        return std::pow(ti, -params.gamma) * slope;
    }
    return std::pow(ti, -params.gamma) * caputo_l1(f, params.alpha, i);
}

RelaxationResidual relaxation_residual(const specfun::KSParams& params, double theta,
                                       const MeshSpec& mesh) {
    if (!(theta >= 0.0)) throw parameter_error("relaxation_residual: theta must be >= 0");

    const std::size_t n = mesh.n_points;
    std::vector<double> grid(n + 1), values(n + 1);
    const specfun::KilbasSaigo kernel{params};
    for (std::size_t i = 0; i <= n; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n);
        grid[i] = mesh.t_max * std::pow(frac, mesh.grading_exponent);
        values[i] = specfun::kernel_eval(specfun::KernelKind(kernel), theta, grid[i]);
    }
    SampledFunction f(std::move(grid), std::move(values));

    std::vector<double> rg, rv;
    double max_res = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (f.grid[i] < mesh.t_min) continue;
        const double r = stretched_apply(f, params, i) + theta * f.values[i];
        rg.push_back(f.grid[i]);
        rv.push_back(r);
        max_res = std::max(max_res, std::fabs(r));
    }
    return RelaxationResidual{max_res, SampledFunction(std::move(rg), std::move(rv))};
}

} // namespace fracq::fracops
