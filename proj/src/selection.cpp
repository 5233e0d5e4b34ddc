#include "degan/selection.hpp"

#include "degan/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace degan {
namespace selection {

NaRatio na_ratio_windows(const nn::Network& d, const Matrix& clean_windows) {
    const Vector scores = detector::fake_scores(d, clean_windows);
    NaRatio r;
    r.anomalous_count = (scores.array() > 0.5).count();
    r.normal_count = scores.size() - r.anomalous_count;
    r.value = r.anomalous_count == 0
                  ? kInf
                  : static_cast<Scalar>(r.normal_count) / static_cast<Scalar>(r.anomalous_count);
    return r;
}

NaRatio na_ratio(const nn::Network& d, const TimeSeries& clean_series) {
    const WindowMatrix wm = extract_windows(clean_series, d.wl);
    return na_ratio_windows(d, wm.rows);
}

SelectionResult select_discriminator(const gan::CheckpointSeries& checkpoints,
                                     SelectionMode mode,
                                     const std::optional<LabeledValidation>& labeled) {
    if (checkpoints.records.empty())
        throw std::runtime_error("model_selection: no checkpoints to select from");

    const gan::CheckpointRecord* best = nullptr;
    Scalar best_score = 0;
    if (mode == SelectionMode::UnlabeledNa) {
        for (const auto& rec : checkpoints.records) {
            if (std::isinf(rec.na_ratio)) continue;
            if (!best || rec.na_ratio > best_score ||
                (rec.na_ratio == best_score && rec.epoch < best->epoch)) {
                best = &rec;
                best_score = rec.na_ratio;
            }
        }
        if (!best)
            throw std::runtime_error(
                "model_selection: degenerate: every checkpoint predicts all-normal; "
                "retune learning rates");
    } else {
        if (!labeled)
            throw std::runtime_error("model_selection: labeled_f1 mode needs labeled data");
        for (const auto& rec : checkpoints.records) {
            const auto report = detector::detect(rec.d_params, labeled->series, labeled->kde);
            const auto scored =
                eval::match_and_score(labeled->labels, report.predicted_anomalies, labeled->r_t);
            const Scalar f1 = scored.f1.value_or(0.0);
            if (!best || f1 > best_score || (f1 == best_score && rec.epoch < best->epoch)) {
                best = &rec;
                best_score = f1;
            }
        }
    }

    SelectionResult res;
    res.epoch = best->epoch;
    res.d_params = best->d_params;
    res.mode = mode;
    res.score = best_score;
    return res;
}

GridSearchResult grid_search_lr(const WindowMatrix& train_windows,
                                const TimeSeries& validation_series,
                                const gan::GanConfig& base_config,
                                const std::vector<Scalar>& g_lr_grid,
                                const std::vector<Scalar>& d_lr_grid,
                                int jobs) {
    if (g_lr_grid.empty() || d_lr_grid.empty())
        throw std::runtime_error("model_selection: learning-rate grids must be non-empty");

    const WindowMatrix vw = extract_windows(validation_series, base_config.wl);

    std::vector<std::pair<Scalar, Scalar>> pairs;
    for (Scalar g : g_lr_grid)
        for (Scalar d : d_lr_grid) pairs.emplace_back(g, d);

    std::vector<GridSearchRow> table(pairs.size());
    auto run_one = [&](size_t i) {
        gan::GanConfig cfg = base_config;
        cfg.g_lr = pairs[i].first;
        cfg.d_lr = pairs[i].second;
        cfg.max_epochs = 50;
        cfg.checkpoint_interval = 5;
        const auto series = gan::train_gan(train_windows, vw.rows, cfg);
        table[i] = {cfg.g_lr, cfg.d_lr, series.records.back().na_ratio, false};
    };

    if (jobs <= 1) {
        for (size_t i = 0; i < pairs.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (size_t i = next++; i < pairs.size(); i = next++) run_one(i);
            });
        for (auto& t : pool) t.join();
    }

    GridSearchResult res;
    res.table = std::move(table);
    GridSearchRow* best = nullptr;
    for (auto& row : res.table) {
        if (std::isinf(row.na_ratio_at_50)) continue;
        if (!best || row.na_ratio_at_50 > best->na_ratio_at_50) best = &row;
    }
    if (!best) {
        std::string msg = "model_selection: every pair has infinite N/A at epoch 50:";
        for (const auto& row : res.table)
            msg += "\n  g_lr=" + format_scalar(row.g_lr) + " d_lr=" + format_scalar(row.d_lr) +
                   " na=inf";
        throw std::runtime_error(msg);
    }
    best->selected = true;
    res.best_g_lr = best->g_lr;
    res.best_d_lr = best->d_lr;
    return res;
}

void write_grid_report(const GridSearchResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("model_selection: cannot write " + path);
    out << "g_lr,d_lr,na_ratio_at_50,selected\n";
    for (const auto& row : result.table)
        out << format_scalar(row.g_lr) << ',' << format_scalar(row.d_lr) << ','
            << (std::isinf(row.na_ratio_at_50) ? "inf" : format_scalar(row.na_ratio_at_50))
            << ',' << (row.selected ? 1 : 0) << '\n';
}

} // namespace selection
} // namespace degan
