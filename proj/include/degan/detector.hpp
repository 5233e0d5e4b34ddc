#pragma once

#include "degan/nn.hpp"
#include "degan/timeseries.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degan {
namespace detector {

struct KdeConfig {
    std::string kernel = "gaussian";
    Scalar bandwidth = 50.0;
    // Evaluation grid; defaults to the test series' sample positions.
    std::optional<Vector> grid;
    // Fixed peak height instead of the histogram-derived one.
    std::optional<Scalar> threshold_override;
};

struct ScoredWindows {
    Vector fake_scores;                   // sigmoid fake-unit output per window
    std::vector<Scalar> flagged_midpoints;  // midpoints of windows with score > 0.5
};

struct DetectionReport {
    std::vector<Scalar> flagged_midpoints;
    Vector grid;
    Vector density;
    Scalar peak_threshold = 0;
    std::vector<Scalar> predicted_anomalies;
    Vector d_scores;
};

/// Scores every stride-1 window of the series with the discriminator
/// (inference mode); a window is flagged iff its fake score exceeds 0.5.
ScoredWindows score_windows(const nn::Network& d, const TimeSeries& test);

/// Same decision rule on pre-built (zero-meaned) windows.
Vector fake_scores(const nn::Network& d, const Matrix& windows);

/// Gaussian KDE over the grid: (1/(n h)) sum phi((x - x_i)/h).
Vector kde_density(const std::vector<Scalar>& flagged, const Vector& grid, Scalar bandwidth);

/// Lower edge of the middle bin of a 21-bin histogram over the density's
/// value range: min + 10*(max-min)/21.
Scalar peak_threshold(const Vector& density);

/// Interior strict local maxima with height >= min_height; a maximal
/// plateau flanked by lower values counts once at its left edge.
std::vector<Eigen::Index> find_peaks(const Vector& density, Scalar min_height);

DetectionReport detect(const nn::Network& d, const TimeSeries& test, const KdeConfig& kde);

/// KDE + thresholding + peak selection on externally produced scores
/// (shared by the plain and motif pipelines).
DetectionReport detect_from_scores(const Vector& scores, const TimeSeries& test,
                                   Eigen::Index wl, const KdeConfig& kde);

std::string report_to_json(const DetectionReport& report);
void write_report(const DetectionReport& report, const std::string& path);

} // namespace detector
} // namespace degan
