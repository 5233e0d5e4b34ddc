#include "degan/plot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace degan {
namespace plot {

namespace {

constexpr double kWidth = 1000, kPanelHeight = 220, kMargin = 40;

struct Axis {
    Scalar lo, hi;
    double px_lo, px_hi;
    double map(Scalar v) const {
        if (hi == lo) return (px_lo + px_hi) / 2;
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

std::string polyline(const Vector& x, const Vector& y, const Axis& ax, const Axis& ay,
                     const std::string& color) {
    std::ostringstream s;
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (Eigen::Index i = 0; i < x.size(); ++i)
        s << ax.map(x[i]) << ',' << ay.map(y[i]) << ' ';
    s << "\"/>\n";
    return s.str();
}

} // namespace

std::string detection_svg(const TimeSeries& series, const detector::DetectionReport& report,
                          const std::optional<LabeledAnomalies>& labels) {
    const double total_h = 2 * kPanelHeight + 3 * kMargin;
    Axis ax{series.positions.minCoeff(), series.positions.maxCoeff(), kMargin,
            kWidth - kMargin};

    // normalize both panels to [0, 1]
    const Scalar vmin = series.values.minCoeff(), vmax = series.values.maxCoeff();
    Vector vnorm = (series.values.array() - vmin) / std::max<Scalar>(vmax - vmin, 1e-30);
    Axis ay_top{0.0, 1.0, kMargin + kPanelHeight, kMargin};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << total_h << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << polyline(series.positions, vnorm, ax, ay_top, "#444444");

    auto value_at = [&](Scalar pos) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < series.positions.size(); ++i)
            if (std::abs(series.positions[i] - pos) <
                std::abs(series.positions[best] - pos))
                best = i;
        return vnorm[best];
    };

    if (labels)
        for (Scalar d : labels->positions) {
            const double x = ax.map(d), y = ay_top.map(value_at(d));
            svg << "<path d=\"M" << x - 5 << ' ' << y - 5 << " L" << x + 5 << ' ' << y + 5
                << " M" << x - 5 << ' ' << y + 5 << " L" << x + 5 << ' ' << y - 5
                << "\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
        }
    for (Scalar m : report.flagged_midpoints)
        svg << "<circle cx=\"" << ax.map(m) << "\" cy=\"" << ay_top.map(value_at(m))
            << "\" r=\"2.5\" fill=\"green\"/>\n";

    if (report.density.size() > 0) {
        const Scalar dmin = report.density.minCoeff(), dmax = report.density.maxCoeff();
        const Scalar span = std::max<Scalar>(dmax - dmin, 1e-30);
        Vector dnorm = (report.density.array() - dmin) / span;
        Axis ay_bot{0.0, 1.0, total_h - kMargin, total_h - kMargin - kPanelHeight};
        svg << polyline(report.grid, dnorm, ax, ay_bot, "#7744cc");
        const double ty = ay_bot.map((report.peak_threshold - dmin) / span);
        svg << "<line x1=\"" << kMargin << "\" y1=\"" << ty << "\" x2=\"" << kWidth - kMargin
            << "\" y2=\"" << ty
            << "\" stroke=\"#aaaaaa\" stroke-dasharray=\"4 3\"/>\n";
        for (Scalar p : report.predicted_anomalies) {
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < report.grid.size(); ++i)
                if (std::abs(report.grid[i] - p) < std::abs(report.grid[best] - p)) best = i;
            svg << "<circle cx=\"" << ax.map(p) << "\" cy=\"" << ay_bot.map(dnorm[best])
                << "\" r=\"4\" fill=\"blue\"/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_detection_svg(const TimeSeries& series, const detector::DetectionReport& report,
                         const std::string& path,
                         const std::optional<LabeledAnomalies>& labels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("plot: cannot write " + path);
    out << detection_svg(series, report, labels);
}

} // namespace plot
} // namespace degan
