#ifndef FRACQ_TOOLS_CSV_HPP
#define FRACQ_TOOLS_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

namespace fracq::cli {

// Minimal CSV emitter: locale-independent, full double precision (%.17g),
// one header row. Values never contain separators, so no quoting is needed.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);
    // Convenience for all-numeric rows.
    void row_values(const std::vector<double>& values);

    static std::string num(double v);

private:
    std::ofstream out_;
    std::size_t columns_;
};

} // namespace fracq::cli

#endif
