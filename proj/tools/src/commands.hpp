#ifndef FRACQ_TOOLS_COMMANDS_HPP
#define FRACQ_TOOLS_COMMANDS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace fracq::cli {

struct KsOptions {
    double alpha = 1.0;
    double gamma = 0.0;
    std::vector<double> x_values;
    std::string x_grid;      // "start:stop:count"
    std::optional<std::size_t> coeffs;
};

// Kernel/coefficient evaluation printed as CSV to `out`.
void cmd_ks(const KsOptions& opt, std::ostream& out);

// Deterministic transient solve; writes transient.csv (t,n,p for n <= n_max)
// and sums.csv (t,column_sum over the full solver support).
void cmd_solve(const RunConfig& cfg, const std::string& route);

// Time-change Monte Carlo; writes p0_curve.csv, snapshot.csv, mean_curve.csv
// and moments.csv.
void cmd_simulate(const RunConfig& cfg);

// Reproduces one of the reference figures (p0 | pn | mean) as SVG + CSV.
void cmd_figures(const RunConfig& cfg, const std::string& figure);

// Route-consistency report: text to `out` plus consistency.csv.
void cmd_consistency(const RunConfig& cfg, std::ostream& out);

} // namespace fracq::cli

#endif
