#ifndef FRACQ_FRACOPS_HPP
#define FRACQ_FRACOPS_HPP

#include <cstddef>
#include <vector>

#include "fracq/specfun.hpp"

namespace fracq::fracops {

// A real function sampled on a strictly increasing time grid with t_0 >= 0.
struct SampledFunction {
    std::vector<double> grid;
    std::vector<double> values;

    SampledFunction() = default;
    SampledFunction(std::vector<double> grid_, std::vector<double> values_);
    std::size_t size() const { return grid.size(); }
};

// Graded-mesh description for the relaxation residual. The mesh itself is
// anchored at t = 0 (t_i = t_max (i/N)^grading_exponent); t_min is the
// reporting threshold below which the singular prefactor makes the residual
// meaningless.
struct MeshSpec {
    double t_min;
    double t_max;
    std::size_t n_points;
    double grading_exponent;

    MeshSpec(double t_min_, double t_max_, std::size_t n_points_, double grading_exponent_);
};

// Default mesh grading 2/(alpha+gamma), capped at 5; compensates the
// 1 - O(t^{alpha+gamma}) behaviour of the kernel near zero.
double default_grading_exponent(const specfun::KSParams& params);

// L1 approximation of the Caputo derivative of order alpha at grid index i,
// using piecewise-linear interpolation of f between grid points. Exact for
// constant f and (when t_0 = 0) for linear f.
double caputo_l1(const SampledFunction& f, double alpha, std::size_t i);

// t_i^{-gamma} * caputo_l1(f, alpha, i). Undefined at t_i = 0.
double stretched_apply(const SampledFunction& f, const specfun::KSParams& params, std::size_t i);

struct RelaxationResidual {
    double max_residual;
    SampledFunction residual_curve; // restricted to t >= mesh.t_min
};

// Discrete residual of the relaxation equation: builds the kernel
// f(t) = E_{a,m,l}(-theta t^{alpha+gamma}) on the graded mesh and returns
// r_i = stretched_apply(f, i) + theta f(t_i) over t_i >= t_min.
RelaxationResidual relaxation_residual(const specfun::KSParams& params, double theta,
                                       const MeshSpec& mesh);

} // namespace fracq::fracops

#endif
