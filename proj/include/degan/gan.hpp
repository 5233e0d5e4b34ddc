#pragma once

#include "degan/nn.hpp"
#include "degan/timeseries.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace degan {
namespace gan {

enum class NoiseMode { Normal, Uniform01 };
enum class GeneratorLoss { NonSaturating, Minimax };

struct GanConfig {
    Eigen::Index wl = 100;
    Eigen::Index noise_dim = 128;
    Scalar g_lr = 1e-3;
    Scalar d_lr = 1e-4;
    Eigen::Index max_epochs = 100;
    Eigen::Index checkpoint_interval = 5;
    Eigen::Index batch_size = 64;
    uint64_t seed = 0;
    nn::ArchTag d_arch = nn::ArchTag::CnnD;
    Scalar dropout_rate = 0.25;
    NoiseMode noise = NoiseMode::Normal;
    GeneratorLoss g_loss = GeneratorLoss::NonSaturating;
    bool g_tanh_output = false;

    void validate() const;
};

struct CheckpointRecord {
    Eigen::Index epoch = 0;
    nn::Network d_params;
    Scalar na_ratio = 0;  // kInf when no window was flagged anomalous
    Eigen::Index anomaly_count_on_validation = 0;
};

struct EpochLog {
    Eigen::Index epoch = 0;
    Scalar d_loss = 0;
    Scalar g_loss = 0;
    std::optional<Scalar> na_ratio;
    std::optional<Eigen::Index> anomaly_count;
};

struct CheckpointSeries {
    std::vector<CheckpointRecord> records;
    std::vector<EpochLog> log;
};

/// Optional early-stop callback, invoked after each checkpoint record is
/// appended; return true to stop training.
using SelectionHook = std::function<bool(const CheckpointRecord&)>;

Matrix sample_noise(Eigen::Index batch, Eigen::Index noise_dim, Rng& rng, NoiseMode mode);

/// Adversarial training on normal windows; checkpoints the discriminator
/// every checkpoint_interval epochs with its N/A ratio on the validation
/// windows (dropout-off inference).
CheckpointSeries train_gan(const WindowMatrix& train_windows,
                           const Matrix& validation_windows,
                           const GanConfig& config,
                           const SelectionHook& hook = nullptr);

CheckpointSeries train_gan(const WindowMatrix& train_windows,
                           const TimeSeries& validation_series,
                           const GanConfig& config,
                           const SelectionHook& hook = nullptr);

/// "epoch,d_loss,g_loss,na_ratio,anomaly_count" CSV; blank fields on
/// epochs without a checkpoint evaluation.
void write_training_log(const CheckpointSeries& series, const std::string& path);

} // namespace gan
} // namespace degan
