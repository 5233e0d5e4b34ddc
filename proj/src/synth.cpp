#include "degan/synth.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace degan {
namespace synth {

SineSpec SineSpec::clustered(Eigen::Index count, Eigen::Index length, uint64_t seed) {
    SineSpec s;
    s.count = count;
    s.length = length;
    s.mode = SineMode::Clustered;
    s.seed = seed;
    s.freq_min = 2.0 * 0.95;  // +-5% around 2 cycles per window
    s.freq_max = 2.0 * 1.05;
    s.phase_min = M_PI / 2 - 0.1;
    s.phase_max = M_PI / 2 + 0.1;
    s.amp_min = 0.95;
    s.amp_max = 1.05;
    return s;
}

SineSpec SineSpec::dispersed(Eigen::Index count, Eigen::Index length, uint64_t seed) {
    SineSpec s;
    s.count = count;
    s.length = length;
    s.mode = SineMode::Dispersed;
    s.seed = seed;
    return s;
}

Matrix gen_sine_set(const SineSpec& spec) {
    if (spec.count < 1 || spec.length < 2)
        throw std::runtime_error("synth_data: invalid sine spec");
    if (!(spec.freq_min <= spec.freq_max) || !(spec.amp_min <= spec.amp_max) ||
        !(spec.phase_min <= spec.phase_max))
        throw std::runtime_error("synth_data: empty parameter range");

    Rng rng(spec.seed);
    std::uniform_real_distribution<Scalar> freq(spec.freq_min, spec.freq_max);
    std::uniform_real_distribution<Scalar> phase(spec.phase_min, spec.phase_max);
    std::uniform_real_distribution<Scalar> amp(spec.amp_min, spec.amp_max);

    Matrix rows(spec.count, spec.length);
    for (Eigen::Index i = 0; i < spec.count; ++i) {
        const Scalar f = freq(rng), p = phase(rng), a = amp(rng);
        for (Eigen::Index t = 0; t < spec.length; ++t)
            rows(i, t) = a * std::sin(2.0 * M_PI * f * static_cast<Scalar>(t) /
                                          static_cast<Scalar>(spec.length) +
                                      p);
    }
    zero_mean_rows(rows);
    return rows;
}

Matrix gen_line_set(Eigen::Index count, Eigen::Index length, Scalar slope_min,
                    Scalar slope_max, uint64_t seed) {
    if (count < 1 || length < 2)
        throw std::runtime_error("synth_data: invalid line spec");
    Rng rng(seed);
    std::uniform_real_distribution<Scalar> slope(slope_min, slope_max);
    Matrix rows(count, length);
    for (Eigen::Index i = 0; i < count; ++i) {
        const Scalar s = slope(rng);
        const Scalar mid = static_cast<Scalar>(length - 1) / 2.0;
        for (Eigen::Index t = 0; t < length; ++t)
            rows(i, t) = s * (static_cast<Scalar>(t) - mid);
    }
    zero_mean_rows(rows);
    return rows;
}

namespace {

struct BaseProcess {
    std::vector<Scalar> amp, freq, phase;  // low-frequency harmonics
    Scalar eval(Scalar pos, Scalar mile_len) const {
        Scalar v = 0;
        for (size_t h = 0; h < amp.size(); ++h)
            v += amp[h] * std::sin(2.0 * M_PI * freq[h] * pos / mile_len + phase[h]);
        return v;
    }
};

BaseProcess make_base(Rng& rng) {
    BaseProcess bp;
    std::uniform_real_distribution<Scalar> a(0.3, 0.8);
    std::uniform_real_distribution<Scalar> f(1.0, 6.0);
    std::uniform_real_distribution<Scalar> p(0.0, 2.0 * M_PI);
    for (int h = 1; h <= 5; ++h) {
        bp.amp.push_back(a(rng) / static_cast<Scalar>(h));
        bp.freq.push_back(f(rng) * static_cast<Scalar>(h));
        bp.phase.push_back(p(rng));
    }
    return bp;
}

Eigen::Index anomaly_extent(AnomalyKind kind) {
    switch (kind) {
        case AnomalyKind::Spike: return 3;
        case AnomalyKind::LevelShift: return 50;
        case AnomalyKind::Burst: return 30;
    }
    return 0;
}

void inject(Vector& values, Eigen::Index center, const AnomalyPlan& plan, Scalar sigma) {
    const Eigen::Index extent = anomaly_extent(plan.kind);
    const Eigen::Index lo = center - extent / 2;
    const Scalar a = plan.magnitude * sigma;
    for (Eigen::Index t = 0; t < extent; ++t) {
        const Eigen::Index idx = lo + t;
        if (idx < 0 || idx >= values.size()) continue;
        switch (plan.kind) {
            case AnomalyKind::Spike: {
                const Scalar w[3] = {0.5, 1.0, 0.5};
                values[idx] += a * w[t];
                break;
            }
            case AnomalyKind::LevelShift:
                values[idx] += a;
                break;
            case AnomalyKind::Burst: {
                // Hann-windowed high-frequency packet
                const Scalar win =
                    0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<Scalar>(t) /
                                          static_cast<Scalar>(extent - 1)));
                values[idx] += a * win *
                               std::sin(2.0 * M_PI * 0.4 * static_cast<Scalar>(t));
                break;
            }
        }
    }
}

} // namespace

TrackData gen_track(const TrackSpec& spec) {
    if (spec.miles < 1 || spec.samples_per_mile < 2 || spec.inspections < 1)
        throw std::runtime_error("synth_data: invalid track spec");
    if (static_cast<Eigen::Index>(spec.plans.size()) > spec.inspections)
        throw std::runtime_error("synth_data: more anomaly plans than inspections");

    const Scalar mile_len = static_cast<Scalar>(spec.samples_per_mile);
    TrackData data;

    std::vector<BaseProcess> bases;
    for (Eigen::Index m = 0; m < spec.miles; ++m) {
        Rng rng(spec.seed * 1000003 + static_cast<uint64_t>(m));
        bases.push_back(make_base(rng));
    }

    for (Eigen::Index m = 0; m < spec.miles; ++m) {
        for (Eigen::Index i = 0; i < spec.inspections; ++i) {
            TimeSeries ts;
            ts.segment_id = "mile" + std::to_string(m);
            ts.inspection_id = "insp" + std::to_string(i);
            ts.positions.resize(spec.samples_per_mile);
            ts.values.resize(spec.samples_per_mile);
            Rng noise_rng(spec.seed * 1000003 + static_cast<uint64_t>(m) * 977 +
                          static_cast<uint64_t>(i) + 1);
            std::normal_distribution<Scalar> noise(0.0, spec.noise_sigma);
            const Scalar offset = static_cast<Scalar>(m) * mile_len;
            for (Eigen::Index t = 0; t < spec.samples_per_mile; ++t) {
                const Scalar pos = offset + static_cast<Scalar>(t);
                ts.positions[t] = pos;
                ts.values[t] = bases[static_cast<size_t>(m)].eval(pos - offset, mile_len) +
                               noise(noise_rng);
            }

            LabeledAnomalies labels;
            labels.segment_id = ts.segment_id;
            labels.inspection_id = ts.inspection_id;
            if (static_cast<size_t>(i) < spec.plans.size()) {
                std::vector<std::pair<Eigen::Index, Eigen::Index>> spans;
                for (const AnomalyPlan& plan : spec.plans[static_cast<size_t>(i)]) {
                    if (plan.position < offset || plan.position >= offset + mile_len) continue;
                    const Eigen::Index center =
                        static_cast<Eigen::Index>(std::llround(plan.position - offset));
                    const Eigen::Index ext = anomaly_extent(plan.kind);
                    for (const auto& [lo, hi] : spans)
                        if (center - ext / 2 <= hi && center + ext / 2 >= lo)
                            throw std::runtime_error("synth_data: overlapping anomalies in " +
                                                     ts.segment_id + "/" + ts.inspection_id);
                    spans.emplace_back(center - ext / 2, center + ext / 2);
                    inject(ts.values, center, plan, spec.noise_sigma);
                    labels.positions.push_back(plan.position);
                }
            }
            ts.validate();
            data.series.push_back(std::move(ts));
            data.labels.push_back(std::move(labels));
        }
    }
    return data;
}

std::vector<std::string> write_track(const TrackData& data, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> files;
    for (size_t i = 0; i < data.series.size(); ++i) {
        const TimeSeries& ts = data.series[i];
        const std::string stem = ts.segment_id + "_" + ts.inspection_id;
        const std::string series_path = (fs::path(dir) / (stem + ".csv")).string();
        save_series(ts, series_path);
        files.push_back(series_path);
        if (!data.labels[i].positions.empty()) {
            const std::string label_path = (fs::path(dir) / (stem + "_labels.csv")).string();
            save_labels(data.labels[i], label_path);
            files.push_back(label_path);
        }
    }
    nlohmann::ordered_json manifest;
    manifest["files"] = std::vector<std::string>();
    for (const auto& f : files)
        manifest["files"].push_back(fs::path(f).filename().string());
    const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
    std::ofstream out(manifest_path);
    out << manifest.dump(2) << '\n';
    files.push_back(manifest_path);
    return files;
}

} // namespace synth
} // namespace degan
