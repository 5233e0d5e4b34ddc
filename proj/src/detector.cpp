#include "degan/detector.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace degan {
namespace detector {

Vector fake_scores(const nn::Network& d, const Matrix& windows) {
    const Matrix out = nn::forward(d, windows, nn::Mode::Infer);
    return out.col(1);  // unit 0 = real score, unit 1 = fake score
}

ScoredWindows score_windows(const nn::Network& d, const TimeSeries& test) {
    const WindowMatrix wm = extract_windows(test, d.wl);
    ScoredWindows sw;
    sw.fake_scores = fake_scores(d, wm.rows);
    for (Eigen::Index i = 0; i < sw.fake_scores.size(); ++i)
        if (sw.fake_scores[i] > 0.5)
            sw.flagged_midpoints.push_back(window_midpoint(i, d.wl, test));
    return sw;
}

Vector kde_density(const std::vector<Scalar>& flagged, const Vector& grid, Scalar bandwidth) {
    if (flagged.empty())
        throw std::runtime_error("detector: kde_density needs at least one flagged point");
    if (!(bandwidth > 0))
        throw std::runtime_error("detector: bandwidth must be positive");
    const Scalar norm = 1.0 / (static_cast<Scalar>(flagged.size()) * bandwidth *
                               std::sqrt(2.0 * M_PI));
    Vector density = Vector::Zero(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        Scalar acc = 0;
        for (Scalar xi : flagged) {
            const Scalar u = (grid[j] - xi) / bandwidth;
            acc += std::exp(-0.5 * u * u);
        }
        density[j] = norm * acc;
    }
    return density;
}

Scalar peak_threshold(const Vector& density) {
    if (density.size() == 0)
        throw std::runtime_error("detector: peak_threshold on empty density");
    const Scalar lo = density.minCoeff();
    const Scalar hi = density.maxCoeff();
    return lo + 10.0 * (hi - lo) / 21.0;
}

std::vector<Eigen::Index> find_peaks(const Vector& density, Scalar min_height) {
    std::vector<Eigen::Index> peaks;
    const Eigen::Index n = density.size();
    Eigen::Index i = 1;
    while (i + 1 < n) {
        if (density[i] <= density[i - 1]) {
            ++i;
            continue;
        }
        // density[i] > density[i-1]; scan the plateau starting here
        Eigen::Index j = i;
        while (j + 1 < n && density[j + 1] == density[i]) ++j;
        if (j + 1 < n && density[j + 1] < density[i]) {
            if (density[i] >= min_height) peaks.push_back(i);
            i = j + 1;
        } else {
            i = j + 1;  // plateau rises at its right flank or hits the end
        }
    }
    return peaks;
}

DetectionReport detect_from_scores(const Vector& scores, const TimeSeries& test,
                                   Eigen::Index wl, const KdeConfig& kde) {
    DetectionReport rep;
    rep.d_scores = scores;
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        if (scores[i] > 0.5)
            rep.flagged_midpoints.push_back(window_midpoint(i, wl, test));

    rep.grid = kde.grid ? *kde.grid : test.positions;
    if (rep.flagged_midpoints.empty()) {
        rep.density = Vector();
        rep.peak_threshold = 0;
        return rep;
    }
    rep.density = kde_density(rep.flagged_midpoints, rep.grid, kde.bandwidth);
    rep.peak_threshold =
        kde.threshold_override ? *kde.threshold_override : peak_threshold(rep.density);
    for (Eigen::Index j : find_peaks(rep.density, rep.peak_threshold))
        rep.predicted_anomalies.push_back(rep.grid[j]);
    return rep;
}

DetectionReport detect(const nn::Network& d, const TimeSeries& test, const KdeConfig& kde) {
    const WindowMatrix wm = extract_windows(test, d.wl);
    return detect_from_scores(fake_scores(d, wm.rows), test, d.wl, kde);
}

std::string report_to_json(const DetectionReport& report) {
    nlohmann::ordered_json j;
    j["flagged_midpoints"] = report.flagged_midpoints;
    j["grid"] = std::vector<Scalar>(report.grid.begin(), report.grid.end());
    j["density"] = std::vector<Scalar>(report.density.begin(), report.density.end());
    j["peak_threshold"] = report.peak_threshold;
    j["predicted_anomalies"] = report.predicted_anomalies;
    j["d_scores"] = std::vector<Scalar>(report.d_scores.begin(), report.d_scores.end());
    return j.dump(2);
}

void write_report(const DetectionReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("detector: cannot write " + path);
    out << report_to_json(report) << '\n';
}

} // namespace detector
} // namespace degan
