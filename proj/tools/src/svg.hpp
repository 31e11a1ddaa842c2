#ifndef FRACQ_TOOLS_SVG_HPP
#define FRACQ_TOOLS_SVG_HPP

#include <string>
#include <vector>

namespace fracq::cli {

// Static SVG charts (fixed 960x540 viewBox, deterministic bytes).

struct LineSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#000000";
    bool dashed = false;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<LineSeries> series;
    double reference_y = 0.0; // dashed horizontal guide
    bool has_reference = false;
};

void write_line_chart(const std::string& path, const LineChart& chart);

struct BarSeries {
    std::string name;
    std::vector<double> values; // one per group
    std::string color = "#000000";
};

struct BarChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> groups;
    std::vector<BarSeries> series;
};

void write_bar_chart(const std::string& path, const BarChart& chart);

} // namespace fracq::cli

#endif
