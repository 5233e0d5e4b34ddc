#pragma once

#include "degan/detector.hpp"
#include "degan/timeseries.hpp"

#include <optional>
#include <string>

namespace degan {
namespace plot {

/// Static SVG: normalized series with flagged midpoints (green), ground
/// truth (red crosses, when given), and the normalized density curve with
/// accepted peaks (blue).
std::string detection_svg(const TimeSeries& series, const detector::DetectionReport& report,
                          const std::optional<LabeledAnomalies>& labels = {});

void write_detection_svg(const TimeSeries& series, const detector::DetectionReport& report,
                         const std::string& path,
                         const std::optional<LabeledAnomalies>& labels = {});

} // namespace plot
} // namespace degan
