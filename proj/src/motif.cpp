#include "degan/motif.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace degan {
namespace motif {

Metric metric_from_string(const std::string& s) {
    if (s == "euclidean") return Metric::Euclidean;
    if (s == "dtw") return Metric::Dtw;
    throw std::runtime_error("motif_clustering: unknown metric '" + s + "'");
}

std::string to_string(Metric m) {
    return m == Metric::Euclidean ? "euclidean" : "dtw";
}

namespace {

Scalar dtw_cost(const Vector& a, const Vector& b) {
    const Eigen::Index n = a.size(), m = b.size();
    std::vector<Scalar> prev(static_cast<size_t>(m)), cur(static_cast<size_t>(m));
    for (Eigen::Index j = 0; j < m; ++j) {
        const Scalar d = (a[0] - b[j]) * (a[0] - b[j]);
        prev[static_cast<size_t>(j)] = d + (j > 0 ? prev[static_cast<size_t>(j - 1)] : 0.0);
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const Scalar d = (a[i] - b[j]) * (a[i] - b[j]);
            Scalar best = prev[static_cast<size_t>(j)];
            if (j > 0) {
                best = std::min(best, cur[static_cast<size_t>(j - 1)]);
                best = std::min(best, prev[static_cast<size_t>(j - 1)]);
            }
            cur[static_cast<size_t>(j)] = d + best;
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<size_t>(m - 1)];
}

/// Alignment pairs (i, j) of the optimal DTW path between a and b.
std::vector<std::pair<Eigen::Index, Eigen::Index>> dtw_path(const Vector& a, const Vector& b) {
    const Eigen::Index n = a.size(), m = b.size();
    Matrix acc(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            const Scalar d = (a[i] - b[j]) * (a[i] - b[j]);
            Scalar best = 0;
            if (i > 0 && j > 0) best = std::min({acc(i - 1, j), acc(i, j - 1), acc(i - 1, j - 1)});
            else if (i > 0) best = acc(i - 1, j);
            else if (j > 0) best = acc(i, j - 1);
            acc(i, j) = d + best;
        }
    std::vector<std::pair<Eigen::Index, Eigen::Index>> path;
    Eigen::Index i = n - 1, j = m - 1;
    path.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) --j;
        else if (j == 0) --i;
        else {
            const Scalar diag = acc(i - 1, j - 1);
            const Scalar up = acc(i - 1, j);
            const Scalar left = acc(i, j - 1);
            if (diag <= up && diag <= left) { --i; --j; }
            else if (up <= left) --i;
            else --j;
        }
        path.emplace_back(i, j);
    }
    return path;
}

/// DTW barycenter averaging refinement of a centroid over its members.
Vector dba_update(const Matrix& windows, const std::vector<Eigen::Index>& members,
                  Vector centroid, int iterations) {
    for (int it = 0; it < iterations; ++it) {
        Vector sums = Vector::Zero(centroid.size());
        Vector counts = Vector::Zero(centroid.size());
        for (Eigen::Index w : members) {
            const Vector row = windows.row(w).transpose();
            for (const auto& [ci, wi] : dtw_path(centroid, row)) {
                sums[ci] += row[wi];
                counts[ci] += 1.0;
            }
        }
        for (Eigen::Index i = 0; i < centroid.size(); ++i)
            if (counts[i] > 0) centroid[i] = sums[i] / counts[i];
    }
    return centroid;
}

} // namespace

Scalar dtw_distance(const Vector& a, const Vector& b) {
    if (a.size() == 0 || b.size() == 0)
        throw std::runtime_error("motif_clustering: dtw_distance needs non-empty vectors");
    return std::sqrt(dtw_cost(a, b));
}

Scalar cluster_distance(const Vector& a, const Vector& b, Metric metric) {
    return metric == Metric::Euclidean ? (a - b).norm() : dtw_distance(a, b);
}

ClusterModel kmeans_fit(const WindowMatrix& windows, Eigen::Index k, Metric metric,
                        uint64_t seed) {
    const Eigen::Index n = windows.count();
    if (k < 1 || k > n)
        throw std::runtime_error("motif_clustering: k must be in [1, window count]");

    Rng rng(seed);
    Matrix centroids(k, windows.wl);

    // k-means++ seeding
    {
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        centroids.row(0) = windows.rows.row(pick(rng));
        Vector d2(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar d = cluster_distance(windows.rows.row(i).transpose(),
                                              centroids.row(0).transpose(), metric);
            d2[i] = d * d;
        }
        for (Eigen::Index c = 1; c < k; ++c) {
            const Scalar total = d2.sum();
            Eigen::Index chosen = 0;
            if (total > 0) {
                std::uniform_real_distribution<Scalar> u(0.0, total);
                Scalar r = u(rng);
                for (Eigen::Index i = 0; i < n; ++i) {
                    r -= d2[i];
                    if (r <= 0) { chosen = i; break; }
                }
            } else {
                chosen = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
            }
            centroids.row(c) = windows.rows.row(chosen);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Scalar d = cluster_distance(windows.rows.row(i).transpose(),
                                                  centroids.row(c).transpose(), metric);
                d2[i] = std::min(d2[i], d * d);
            }
        }
    }

    std::vector<Eigen::Index> assign(static_cast<size_t>(n), -1);
    Scalar prev_inertia = kInf;
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        Scalar inertia = 0;
        std::vector<Scalar> dist_to_own(static_cast<size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            Scalar best_d = kInf;
            for (Eigen::Index c = 0; c < k; ++c) {
                const Scalar d = cluster_distance(windows.rows.row(i).transpose(),
                                                  centroids.row(c).transpose(), metric);
                if (d < best_d) { best_d = d; best = c; }
            }
            if (assign[static_cast<size_t>(i)] != best) changed = true;
            assign[static_cast<size_t>(i)] = best;
            dist_to_own[static_cast<size_t>(i)] = best_d;
            inertia += best_d * best_d;
        }
        if (metric == Metric::Euclidean) {
            assert(inertia <= prev_inertia * (1 + 1e-12) && "k-means inertia increased");
            prev_inertia = inertia;
        }
        if (!changed) break;

        std::vector<std::vector<Eigen::Index>> members(static_cast<size_t>(k));
        for (Eigen::Index i = 0; i < n; ++i)
            members[static_cast<size_t>(assign[static_cast<size_t>(i)])].push_back(i);

        for (Eigen::Index c = 0; c < k; ++c) {
            auto& mem = members[static_cast<size_t>(c)];
            if (mem.empty()) {
                // re-seed from the point farthest from its centroid
                const Eigen::Index far = static_cast<Eigen::Index>(
                    std::max_element(dist_to_own.begin(), dist_to_own.end()) -
                    dist_to_own.begin());
                centroids.row(c) = windows.rows.row(far);
                dist_to_own[static_cast<size_t>(far)] = 0;
                continue;
            }
            Vector mean = Vector::Zero(windows.wl);
            for (Eigen::Index w : mem) mean += windows.rows.row(w).transpose();
            mean /= static_cast<Scalar>(mem.size());
            if (metric == Metric::Euclidean)
                centroids.row(c) = mean.transpose();
            else
                centroids.row(c) = dba_update(windows.rows, mem, mean, 10).transpose();
        }
    }

    ClusterModel model;
    model.k = k;
    model.metric = metric;
    model.centroids = std::move(centroids);
    model.assignment_counts.assign(static_cast<size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i)
        ++model.assignment_counts[static_cast<size_t>(assign[static_cast<size_t>(i)])];
    return model;
}

Eigen::Index assign_cluster(const ClusterModel& model, const Vector& window) {
    if (window.size() != model.centroids.cols())
        throw std::runtime_error("motif_clustering: window length mismatch");
    Eigen::Index best = 0;
    Scalar best_d = kInf;
    for (Eigen::Index c = 0; c < model.k; ++c) {
        const Scalar d = cluster_distance(window, model.centroids.row(c).transpose(),
                                          model.metric);
        if (d < best_d) { best_d = d; best = c; }
    }
    return best;
}

MotifDetector motif_train(const WindowMatrix& train_windows,
                          const TimeSeries& validation_series,
                          Eigen::Index k, Metric metric, const gan::GanConfig& config) {
    MotifDetector md;
    md.clusters = kmeans_fit(train_windows, k, metric, config.seed);

    // route training windows by final assignment, validation windows by centroid
    std::vector<std::vector<Eigen::Index>> train_members(static_cast<size_t>(k));
    for (Eigen::Index i = 0; i < train_windows.count(); ++i) {
        const Eigen::Index c =
            assign_cluster(md.clusters, train_windows.rows.row(i).transpose());
        train_members[static_cast<size_t>(c)].push_back(i);
    }
    const WindowMatrix vw = extract_windows(validation_series, config.wl);
    std::vector<std::vector<Eigen::Index>> val_members(static_cast<size_t>(k));
    for (Eigen::Index i = 0; i < vw.count(); ++i)
        val_members[static_cast<size_t>(assign_cluster(md.clusters, vw.rows.row(i).transpose()))]
            .push_back(i);

    for (Eigen::Index c = 0; c < k; ++c) {
        const auto& mem = train_members[static_cast<size_t>(c)];
        if (static_cast<Eigen::Index>(mem.size()) < 2 * config.batch_size)
            throw std::runtime_error("motif_clustering: cluster " + std::to_string(c) +
                                     " too small (" + std::to_string(mem.size()) +
                                     " windows, need >= " +
                                     std::to_string(2 * config.batch_size) + ")");
        WindowMatrix sub;
        sub.wl = train_windows.wl;
        sub.source = train_windows.source;
        sub.rows.resize(static_cast<Eigen::Index>(mem.size()), train_windows.wl);
        for (size_t r = 0; r < mem.size(); ++r) {
            sub.rows.row(static_cast<Eigen::Index>(r)) = train_windows.rows.row(mem[r]);
            sub.start_indices.push_back(train_windows.start_indices[static_cast<size_t>(mem[r])]);
        }

        Matrix vsub(static_cast<Eigen::Index>(val_members[static_cast<size_t>(c)].size()),
                    config.wl);
        for (size_t r = 0; r < val_members[static_cast<size_t>(c)].size(); ++r)
            vsub.row(static_cast<Eigen::Index>(r)) =
                vw.rows.row(val_members[static_cast<size_t>(c)][r]);

        gan::GanConfig cfg = config;
        cfg.seed = config.seed + static_cast<uint64_t>(c);
        const auto checkpoints = gan::train_gan(sub, vsub, cfg);
        selection::SelectionResult sel;
        try {
            sel = selection::select_discriminator(checkpoints, selection::SelectionMode::UnlabeledNa);
        } catch (const std::exception& e) {
            throw std::runtime_error("motif_clustering: cluster " + std::to_string(c) + ": " +
                                     e.what());
        }
        md.discriminators.push_back(std::move(sel.d_params));
        md.selected_epochs.push_back(sel.epoch);
    }
    return md;
}

detector::DetectionReport motif_detect(const MotifDetector& md, const TimeSeries& test,
                                       const detector::KdeConfig& kde) {
    const Eigen::Index wl = md.clusters.centroids.cols();
    const WindowMatrix wm = extract_windows(test, wl);
    Vector scores(wm.count());

    std::vector<std::vector<Eigen::Index>> members(static_cast<size_t>(md.clusters.k));
    for (Eigen::Index i = 0; i < wm.count(); ++i)
        members[static_cast<size_t>(assign_cluster(md.clusters, wm.rows.row(i).transpose()))]
            .push_back(i);
    for (Eigen::Index c = 0; c < md.clusters.k; ++c) {
        const auto& mem = members[static_cast<size_t>(c)];
        if (mem.empty()) continue;
        Matrix batch(static_cast<Eigen::Index>(mem.size()), wl);
        for (size_t r = 0; r < mem.size(); ++r)
            batch.row(static_cast<Eigen::Index>(r)) = wm.rows.row(mem[r]);
        const Vector s =
            detector::fake_scores(md.discriminators[static_cast<size_t>(c)], batch);
        for (size_t r = 0; r < mem.size(); ++r) scores[mem[r]] = s[static_cast<Eigen::Index>(r)];
    }
    return detector::detect_from_scores(scores, test, wl, kde);
}

std::string cluster_model_to_json(const ClusterModel& model) {
    nlohmann::ordered_json j;
    j["k"] = model.k;
    j["metric"] = to_string(model.metric);
    j["sizes"] = model.assignment_counts;
    auto& cents = j["centroids"] = nlohmann::json::array();
    for (Eigen::Index c = 0; c < model.k; ++c)
        cents.push_back(std::vector<Scalar>(model.centroids.row(c).begin(),
                                            model.centroids.row(c).end()));
    return j.dump(2);
}

ClusterModel cluster_model_from_json(const std::string& json) {
    const auto j = nlohmann::json::parse(json);
    ClusterModel model;
    model.k = j.at("k").get<Eigen::Index>();
    model.metric = metric_from_string(j.at("metric").get<std::string>());
    model.assignment_counts = j.at("sizes").get<std::vector<Eigen::Index>>();
    const auto cents = j.at("centroids");
    if (cents.empty() || static_cast<Eigen::Index>(cents.size()) != model.k)
        throw std::runtime_error("motif_clustering: centroid count mismatch in model JSON");
    model.centroids.resize(model.k, static_cast<Eigen::Index>(cents[0].size()));
    for (Eigen::Index c = 0; c < model.k; ++c) {
        const auto row = cents[static_cast<size_t>(c)].get<std::vector<Scalar>>();
        for (Eigen::Index t = 0; t < model.centroids.cols(); ++t)
            model.centroids(c, t) = row[static_cast<size_t>(t)];
    }
    return model;
}

} // namespace motif
} // namespace degan
