#pragma once

#include "degan/types.hpp"

#include <string>
#include <vector>

namespace degan {

/// One inspection pass over one segment: uniformly spaced positions and
/// the scalar measurement at each position.
struct TimeSeries {
    std::string segment_id;
    std::string inspection_id;
    Vector positions;
    Vector values;

    Eigen::Index length() const { return values.size(); }
    Scalar spacing() const { return positions[1] - positions[0]; }

    /// Validates monotone uniform spacing and matching lengths. Throws on violation.
    void validate() const;
};

/// Ground-truth anomaly locations for one (segment, inspection).
struct LabeledAnomalies {
    std::string segment_id;
    std::string inspection_id;
    std::vector<Scalar> positions;
};

/// Stride-1 sliding windows, each row zero-meaned.
struct WindowMatrix {
    Matrix rows;            // N x wl
    std::vector<Eigen::Index> start_indices;
    Eigen::Index wl = 0;
    std::string source;     // "<segment>/<inspection>" of the originating series

    Eigen::Index count() const { return rows.rows(); }
};

TimeSeries load_series(const std::string& path);
void save_series(const TimeSeries& ts, const std::string& path);

LabeledAnomalies load_labels(const std::string& path);
void save_labels(const LabeledAnomalies& labels, const std::string& path);

/// Subtracts the row mean from every row in place.
void zero_mean_rows(Matrix& m);

/// Extracts all L-wl+1 stride-1 windows and zero-means each.
WindowMatrix extract_windows(const TimeSeries& series, Eigen::Index wl);

/// Position of the sample at start_index + floor(wl/2).
Scalar window_midpoint(Eigen::Index start_index, Eigen::Index wl, const TimeSeries& series);

} // namespace degan
