#pragma once

#include "degan/timeseries.hpp"

#include <optional>
#include <string>
#include <vector>

namespace degan {
namespace eval {

struct MatchRow {
    Scalar defect = 0;
    std::optional<Scalar> closest_prediction;
    bool matched = false;
};

struct EvalReport {
    Scalar r_t = 0;
    Eigen::Index tp = 0;
    Eigen::Index fn = 0;
    Eigen::Index fp = 0;
    std::optional<Scalar> recall;     // absent when there are no defects
    std::optional<Scalar> precision;  // absent when there are no predictions
    std::optional<Scalar> f1;
    std::vector<MatchRow> matches;
    // macro means across aggregated runs (set by aggregate)
    std::optional<Scalar> macro_recall;
    std::optional<Scalar> macro_precision;
};

/// Tolerance matching by nearest neighbour: a defect is a TP iff some
/// prediction lies within r_t of it; a prediction is an FP iff no defect
/// lies within r_t of it. One prediction may certify several defects.
EvalReport match_and_score(const LabeledAnomalies& defects,
                           const std::vector<Scalar>& predictions, Scalar r_t);

/// Micro-aggregation (summed counts, recomputed rates) plus macro means
/// of the per-run scores.
EvalReport aggregate(const std::vector<EvalReport>& reports);

/// Table-style CSV: one row per labelled configuration, recall/precision/F1
/// columns per tolerance.
void write_eval_csv(const std::vector<std::pair<std::string, std::vector<EvalReport>>>& rows,
                    const std::string& path);

} // namespace eval
} // namespace degan
