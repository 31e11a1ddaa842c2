#ifndef FRACQ_TRANSIENT_TABLE_HPP
#define FRACQ_TRANSIENT_TABLE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace fracq {

enum class Route {
    SpectralExp,
    SpectralML,
    SpectralKS,
    LaplaceSymbol,
    ProductForm,     // literal product-form p_n(t) = rho^n K(t)
    ClassicalOracle, // uniformization reference
};

std::string route_name(Route route);

// State probabilities p_n(t_i) over a truncated support, plus the raw column
// sums recorded before any clamping.
struct TransientTable {
    std::vector<double> times;
    std::size_t n_max = 0;
    std::vector<std::vector<double>> probs; // probs[i][n], i indexes times
    std::vector<double> column_sums;        // per time, pre-clamp
    Route route = Route::ClassicalOracle;

    double at(std::size_t time_index, std::size_t n) const { return probs[time_index][n]; }
};

// Per-time expectation sum_n n p_n(t) over the truncated support.
std::vector<double> mean_curve(const TransientTable& table);

} // namespace fracq

#endif
