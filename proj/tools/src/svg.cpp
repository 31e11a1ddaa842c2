#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <fracq/errors.hpp>

namespace fracq::cli {

namespace {

constexpr double kWidth = 960.0, kHeight = 540.0;
constexpr double kLeft = 70.0, kRight = 930.0, kTop = 50.0, kBottom = 490.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Scale {
    double lo, hi, px_lo, px_hi;
    double operator()(double v) const {
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

void open_svg(std::ofstream& out, const std::string& path, const std::string& title) {
    out.open(path, std::ios::binary);
    if (!out) throw parameter_error("cannot open output file '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 960 540\" "
           "font-family=\"sans-serif\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"960\" height=\"540\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"480\" y=\"28\" font-size=\"18\" text-anchor=\"middle\">" << title
        << "</text>\n";
}

void draw_axes(std::ofstream& out, const Scale& sx, const Scale& sy, const std::string& x_label,
               const std::string& y_label) {
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(kRight)
        << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"#000000\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"#000000\"/>\n";
    const double xstep = nice_step(sx.hi - sx.lo);
    for (double v = std::ceil(sx.lo / xstep) * xstep; v <= sx.hi + 1e-9 * xstep; v += xstep) {
        const double px = sx(v);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << fmt(kBottom + 5) << "\" stroke=\"#000000\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kBottom + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(v) << "</text>\n";
    }
    const double ystep = nice_step(sy.hi - sy.lo);
    for (double v = std::ceil(sy.lo / ystep) * ystep; v <= sy.hi + 1e-9 * ystep; v += ystep) {
        const double py = sy(v);
        out << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(kLeft)
            << "\" y2=\"" << fmt(py) << "\" stroke=\"#000000\"/>\n";
        out << "<text x=\"" << fmt(kLeft - 9) << "\" y=\"" << fmt(py + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(v) << "</text>\n";
    }
    out << "<text x=\"" << fmt(0.5 * (kLeft + kRight)) << "\" y=\"" << fmt(kHeight - 14)
        << "\" font-size=\"14\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(0.5 * (kTop + kBottom))
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << fmt(0.5 * (kTop + kBottom)) << ")\">" << y_label << "</text>\n";
}

} // namespace

void write_line_chart(const std::string& path, const LineChart& chart) {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    bool first = true;
    for (const LineSeries& s : chart.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                first = false;
            }
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    if (chart.has_reference) {
        ylo = std::min(ylo, chart.reference_y);
        yhi = std::max(yhi, chart.reference_y);
    }
    ylo = std::min(0.0, ylo);
    const double pad = 0.05 * (yhi - ylo);
    yhi += pad;
    const Scale sx{xlo, xhi, kLeft, kRight};
    const Scale sy{ylo, yhi, kBottom, kTop};

    std::ofstream out;
    open_svg(out, path, chart.title);
    draw_axes(out, sx, sy, chart.x_label, chart.y_label);

    if (chart.has_reference) {
        out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(sy(chart.reference_y))
            << "\" x2=\"" << fmt(kRight) << "\" y2=\"" << fmt(sy(chart.reference_y))
            << "\" stroke=\"#888888\" stroke-dasharray=\"8,5\"/>\n";
    }

    double legend_y = kTop + 8.0;
    for (const LineSeries& s : chart.series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\"";
        if (s.dashed) out << " stroke-dasharray=\"5,4\"";
        out << " stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i]));
        }
        out << "\"/>\n";
        out << "<line x1=\"" << fmt(kRight - 190) << "\" y1=\"" << fmt(legend_y) << "\" x2=\""
            << fmt(kRight - 160) << "\" y2=\"" << fmt(legend_y) << "\" stroke=\"" << s.color
            << "\"";
        if (s.dashed) out << " stroke-dasharray=\"5,4\"";
        out << " stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << fmt(kRight - 152) << "\" y=\"" << fmt(legend_y + 4)
            << "\" font-size=\"12\">" << s.name << "</text>\n";
        legend_y += 18.0;
    }
    out << "</svg>\n";
}

void write_bar_chart(const std::string& path, const BarChart& chart) {
    double yhi = 0.0;
    for (const BarSeries& s : chart.series)
        for (double v : s.values) yhi = std::max(yhi, v);
    if (yhi <= 0.0) yhi = 1.0;
    yhi *= 1.08;
    const Scale sy{0.0, yhi, kBottom, kTop};

    const std::size_t n_groups = chart.groups.size();
    const std::size_t n_series = chart.series.size();
    const double group_w = (kRight - kLeft) / static_cast<double>(n_groups);
    const double bar_w = 0.8 * group_w / static_cast<double>(n_series);

    std::ofstream out;
    open_svg(out, path, chart.title);
    const Scale sx{0.0, static_cast<double>(n_groups), kLeft, kRight};
    draw_axes(out, sx, sy, chart.x_label, chart.y_label);

    for (std::size_t g = 0; g < n_groups; ++g) {
        const double x0 = kLeft + (static_cast<double>(g) + 0.1) * group_w;
        for (std::size_t s = 0; s < n_series; ++s) {
            const double v = chart.series[s].values[g];
            const double top = sy(v);
            out << "<rect x=\"" << fmt(x0 + static_cast<double>(s) * bar_w) << "\" y=\""
                << fmt(top) << "\" width=\"" << fmt(bar_w) << "\" height=\""
                << fmt(kBottom - top) << "\" fill=\"" << chart.series[s].color << "\"/>\n";
        }
        if (g % 5 == 0) {
            out << "<text x=\"" << fmt(x0 + 0.4 * group_w) << "\" y=\"" << fmt(kBottom + 20)
                << "\" font-size=\"11\" text-anchor=\"middle\">" << chart.groups[g]
                << "</text>\n";
        }
    }
    double legend_y = kTop + 8.0;
    for (const BarSeries& s : chart.series) {
        out << "<rect x=\"" << fmt(kRight - 190) << "\" y=\"" << fmt(legend_y - 8)
            << "\" width=\"22\" height=\"10\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << fmt(kRight - 160) << "\" y=\"" << fmt(legend_y + 2)
            << "\" font-size=\"12\">" << s.name << "</text>\n";
        legend_y += 18.0;
    }
    out << "</svg>\n";
}

} // namespace fracq::cli
