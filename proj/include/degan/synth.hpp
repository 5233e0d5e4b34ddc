#pragma once

#include "degan/timeseries.hpp"

#include <string>
#include <vector>

namespace degan {
namespace synth {

enum class SineMode { Dispersed, Clustered };

/// Parameters for the sine-wave benchmark set. Frequencies are cycles per
/// sample window; each generated wave has exactly `length` samples.
struct SineSpec {
    Eigen::Index count = 10000;
    Eigen::Index length = 100;
    Scalar freq_min = 0.5, freq_max = 5.0;   // cycles per window
    Scalar phase_min = 0.0, phase_max = 2.0 * M_PI;
    Scalar amp_min = 0.5, amp_max = 1.5;
    SineMode mode = SineMode::Dispersed;
    uint64_t seed = 0;

    /// Tight parameter spreads around the dispersed-range centres.
    static SineSpec clustered(Eigen::Index count, Eigen::Index length, uint64_t seed);
    static SineSpec dispersed(Eigen::Index count, Eigen::Index length, uint64_t seed);
};

/// Zero-meaned sine windows (the all-normal class).
Matrix gen_sine_set(const SineSpec& spec);

/// Zero-meaned linear ramps with slopes drawn from [slope_min, slope_max]
/// (the anomaly class of the sine benchmark).
Matrix gen_line_set(Eigen::Index count, Eigen::Index length, Scalar slope_min,
                    Scalar slope_max, uint64_t seed);

enum class AnomalyKind { Spike, LevelShift, Burst };

struct AnomalyPlan {
    Scalar position = 0;  // centre, in position units
    AnomalyKind kind = AnomalyKind::Spike;
    Scalar magnitude = 10.0;  // in units of the base-process noise sigma
};

struct TrackSpec {
    Eigen::Index miles = 5;
    Eigen::Index samples_per_mile = 5280;
    Eigen::Index inspections = 3;
    // anomaly plan per inspection index (empty plan = clean inspection)
    std::vector<std::vector<AnomalyPlan>> plans;
    Scalar noise_sigma = 0.1;
    uint64_t seed = 0;
};

struct TrackData {
    std::vector<TimeSeries> series;          // miles * inspections entries
    std::vector<LabeledAnomalies> labels;    // one per series, possibly empty
};

/// Smooth low-frequency base process (shared per segment across
/// inspections) plus white noise and the planned injections.
TrackData gen_track(const TrackSpec& spec);

/// Writes `<segment>_<inspection>.csv` series and `<segment>_<inspection>_labels.csv`
/// files plus a manifest.json listing every emitted file.
std::vector<std::string> write_track(const TrackData& data, const std::string& dir);

} // namespace synth
} // namespace degan
