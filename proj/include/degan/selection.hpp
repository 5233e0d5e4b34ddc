#pragma once

#include "degan/detector.hpp"
#include "degan/gan.hpp"
#include "degan/timeseries.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degan {
namespace selection {

struct NaRatio {
    Scalar value = 0;  // kInf iff anomalous_count == 0
    Eigen::Index normal_count = 0;
    Eigen::Index anomalous_count = 0;
};

NaRatio na_ratio(const nn::Network& d, const TimeSeries& clean_series);
NaRatio na_ratio_windows(const nn::Network& d, const Matrix& clean_windows);

enum class SelectionMode { UnlabeledNa, LabeledF1 };

struct SelectionResult {
    Eigen::Index epoch = 0;
    nn::Network d_params;
    SelectionMode mode = SelectionMode::UnlabeledNa;
    Scalar score = 0;
};

/// Labeled-selection inputs: a held-out series with ground truth, scored
/// by tolerance-based F1 through the full detection pipeline.
struct LabeledValidation {
    TimeSeries series;
    LabeledAnomalies labels;
    detector::KdeConfig kde;
    Scalar r_t = 100;
};

/// UnlabeledNa: checkpoint with the highest finite N/A ratio (ties ->
/// earliest epoch). LabeledF1: checkpoint with the highest F1 on the
/// labeled series.
SelectionResult select_discriminator(const gan::CheckpointSeries& checkpoints,
                                     SelectionMode mode,
                                     const std::optional<LabeledValidation>& labeled = {});

struct GridSearchRow {
    Scalar g_lr = 0;
    Scalar d_lr = 0;
    Scalar na_ratio_at_50 = 0;
    bool selected = false;
};

struct GridSearchResult {
    Scalar best_g_lr = 0;
    Scalar best_d_lr = 0;
    std::vector<GridSearchRow> table;
};

/// Trains one GAN per (g_lr, d_lr) pair for 50 epochs and picks the pair
/// with the highest finite N/A ratio at epoch 50.
GridSearchResult grid_search_lr(const WindowMatrix& train_windows,
                                const TimeSeries& validation_series,
                                const gan::GanConfig& base_config,
                                const std::vector<Scalar>& g_lr_grid,
                                const std::vector<Scalar>& d_lr_grid,
                                int jobs = 1);

void write_grid_report(const GridSearchResult& result, const std::string& path);

inline const std::vector<Scalar> kDefaultGLrGrid{1e-4, 5e-4, 1e-3, 2e-3, 6e-3};
inline const std::vector<Scalar> kDefaultDLrGrid{1e-4, 5e-4};

} // namespace selection
} // namespace degan
