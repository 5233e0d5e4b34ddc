#pragma once

#include "degan/detector.hpp"
#include "degan/gan.hpp"
#include "degan/selection.hpp"
#include "degan/timeseries.hpp"

#include <string>
#include <vector>

namespace degan {
namespace motif {

enum class Metric { Euclidean, Dtw };

Metric metric_from_string(const std::string& s);
std::string to_string(Metric m);

struct ClusterModel {
    Eigen::Index k = 0;
    Metric metric = Metric::Euclidean;
    Matrix centroids;  // k x wl
    std::vector<Eigen::Index> assignment_counts;
};

struct MotifDetector {
    ClusterModel clusters;
    std::vector<nn::Network> discriminators;  // one per cluster
    std::vector<Eigen::Index> selected_epochs;
};

/// Classic DTW with squared local cost and unit steps; returns the square
/// root of the accumulated cost, so dtw(a, b) <= ||a - b|| for equal lengths.
Scalar dtw_distance(const Vector& a, const Vector& b);

Scalar cluster_distance(const Vector& a, const Vector& b, Metric metric);

/// Seeded k-means++ with metric-specific centroid updates (mean, or DTW
/// barycenter averaging for the DTW metric). Empty clusters are re-seeded
/// from the point farthest from its centroid.
ClusterModel kmeans_fit(const WindowMatrix& windows, Eigen::Index k, Metric metric,
                        uint64_t seed);

Eigen::Index assign_cluster(const ClusterModel& model, const Vector& window);

/// One GAN training + discriminator selection per cluster. Validation
/// windows are routed to clusters the same way test windows are.
MotifDetector motif_train(const WindowMatrix& train_windows,
                          const TimeSeries& validation_series,
                          Eigen::Index k, Metric metric, const gan::GanConfig& config);

detector::DetectionReport motif_detect(const MotifDetector& md, const TimeSeries& test,
                                       const detector::KdeConfig& kde);

std::string cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const std::string& json);

} // namespace motif
} // namespace degan
