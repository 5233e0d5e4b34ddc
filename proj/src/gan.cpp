#include "degan/gan.hpp"

#include "degan/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace degan {
namespace gan {

namespace {

constexpr Scalar kClamp = 1e-12;

Scalar bce_sum(const Matrix& y, const Matrix& t) {
    const auto yc = y.array().max(kClamp).min(1.0 - kClamp);
    return -(t.array() * yc.log() + (1.0 - t.array()) * (1.0 - yc).log()).sum();
}

} // namespace

void GanConfig::validate() const {
    if (!(g_lr > 0) || !(d_lr > 0))
        throw std::runtime_error("gan_trainer: learning rates must be positive");
    if (checkpoint_interval < 1 || max_epochs < checkpoint_interval)
        throw std::runtime_error("gan_trainer: max_epochs must be >= checkpoint_interval >= 1");
    if (batch_size < 1) throw std::runtime_error("gan_trainer: batch_size must be >= 1");
    if (wl < 1 || noise_dim < 1)
        throw std::runtime_error("gan_trainer: wl and noise_dim must be positive");
}

Matrix sample_noise(Eigen::Index batch, Eigen::Index noise_dim, Rng& rng, NoiseMode mode) {
    if (batch < 1) throw std::runtime_error("gan_trainer: batch must be >= 1");
    Matrix z(batch, noise_dim);
    if (mode == NoiseMode::Normal) {
        std::normal_distribution<Scalar> dist(0.0, 1.0);
        for (Eigen::Index r = 0; r < batch; ++r)
            for (Eigen::Index c = 0; c < noise_dim; ++c) z(r, c) = dist(rng);
    } else {
        std::uniform_real_distribution<Scalar> dist(0.0, 1.0);
        for (Eigen::Index r = 0; r < batch; ++r)
            for (Eigen::Index c = 0; c < noise_dim; ++c) z(r, c) = dist(rng);
    }
    return z;
}

CheckpointSeries train_gan(const WindowMatrix& train_windows,
                           const Matrix& validation_windows,
                           const GanConfig& config,
                           const SelectionHook& hook) {
    config.validate();
    if (train_windows.wl != config.wl)
        throw std::runtime_error("gan_trainer: train windows built with a different wl");
    if (validation_windows.cols() != config.wl)
        throw std::runtime_error("gan_trainer: validation windows built with a different wl");

    nn::Network g = nn::build_generator(config.noise_dim, config.wl, config.seed,
                                        config.g_tanh_output);
    nn::Network d = nn::build_discriminator(config.d_arch, config.wl, config.seed + 1,
                                            config.dropout_rate);
    nn::TrainState g_state = nn::make_train_state(std::move(g));
    nn::TrainState d_state = nn::make_train_state(std::move(d));
    Rng rng(config.seed + 2);

    const Eigen::Index n = train_windows.count();
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    CheckpointSeries series;
    for (Eigen::Index epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);

        Scalar d_loss_sum = 0, g_loss_sum = 0;
        Eigen::Index d_samples = 0, g_samples = 0;
        for (Eigen::Index off = 0; off < n; off += config.batch_size) {
            const Eigen::Index b = std::min(config.batch_size, n - off);
            Matrix real(b, config.wl);
            for (Eigen::Index r = 0; r < b; ++r)
                real.row(r) = train_windows.rows.row(order[static_cast<size_t>(off + r)]);

            // D on real: targets [1, 0]
            {
                nn::Cache cache;
                Matrix y = nn::forward(d_state.params, real, nn::Mode::Train, &rng, &cache);
                Matrix t = Matrix::Zero(b, 2);
                t.col(0).setOnes();
                d_loss_sum += bce_sum(y, t);
                Matrix dz = (y - t) / static_cast<Scalar>(b);
                nn::Gradients grads = nn::backward(d_state.params, cache, dz, true);
                nn::optimizer_step(d_state, grads, config.d_lr);
            }

            // D on generated: targets [0, 1]
            {
                Matrix z = sample_noise(b, config.noise_dim, rng, config.noise);
                Matrix fake = nn::forward(g_state.params, z, nn::Mode::Infer);
                nn::Cache cache;
                Matrix y = nn::forward(d_state.params, fake, nn::Mode::Train, &rng, &cache);
                Matrix t = Matrix::Zero(b, 2);
                t.col(1).setOnes();
                d_loss_sum += bce_sum(y, t);
                Matrix dz = (y - t) / static_cast<Scalar>(b);
                nn::Gradients grads = nn::backward(d_state.params, cache, dz, true);
                nn::optimizer_step(d_state, grads, config.d_lr);
            }
            d_samples += 2 * b;

            // G through frozen D
            {
                Matrix z = sample_noise(b, config.noise_dim, rng, config.noise);
                nn::Cache g_cache;
                Matrix fake = nn::forward(g_state.params, z, nn::Mode::Train, &rng, &g_cache);
                nn::Cache d_cache;
                Matrix y = nn::forward(d_state.params, fake, nn::Mode::Infer, nullptr, &d_cache);
                const auto y0 = y.col(0).array().max(kClamp).min(1.0 - kClamp);
                Matrix dz = Matrix::Zero(b, 2);
                if (config.g_loss == GeneratorLoss::NonSaturating) {
                    g_loss_sum += -y0.log().sum();
                    dz.col(0) = (y.col(0).array() - 1.0) / static_cast<Scalar>(b);
                } else {
                    g_loss_sum += (1.0 - y0).log().sum();
                    dz.col(0) = -y.col(0).array() / static_cast<Scalar>(b);
                }
                nn::Gradients d_grads = nn::backward(d_state.params, d_cache, dz, true);
                nn::Gradients g_grads =
                    nn::backward(g_state.params, g_cache, d_grads.input_grad, false);
                nn::optimizer_step(g_state, g_grads, config.g_lr);
            }
            g_samples += b;
        }

        EpochLog log;
        log.epoch = epoch;
        log.d_loss = d_loss_sum / static_cast<Scalar>(d_samples);
        log.g_loss = g_loss_sum / static_cast<Scalar>(g_samples);
        if (!std::isfinite(log.d_loss) || !std::isfinite(log.g_loss))
            throw std::runtime_error("gan_trainer: diverged; reduce learning rates");

        bool stop = false;
        if (epoch % config.checkpoint_interval == 0) {
            const Vector scores = detector::fake_scores(d_state.params, validation_windows);
            const Eigen::Index anomalous = (scores.array() > 0.5).count();
            const Eigen::Index normal = scores.size() - anomalous;
            CheckpointRecord rec;
            rec.epoch = epoch;
            rec.d_params = d_state.params;
            rec.anomaly_count_on_validation = anomalous;
            rec.na_ratio = anomalous == 0
                               ? kInf
                               : static_cast<Scalar>(normal) / static_cast<Scalar>(anomalous);
            log.na_ratio = rec.na_ratio;
            log.anomaly_count = anomalous;
            series.records.push_back(std::move(rec));
            if (hook) stop = hook(series.records.back());
        }
        series.log.push_back(log);
        if (stop) break;
    }
    return series;
}

CheckpointSeries train_gan(const WindowMatrix& train_windows,
                           const TimeSeries& validation_series,
                           const GanConfig& config,
                           const SelectionHook& hook) {
    const WindowMatrix vw = extract_windows(validation_series, config.wl);
    return train_gan(train_windows, vw.rows, config, hook);
}

void write_training_log(const CheckpointSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("gan_trainer: cannot write " + path);
    out << "epoch,d_loss,g_loss,na_ratio,anomaly_count\n";
    for (const EpochLog& l : series.log) {
        out << l.epoch << ',' << format_scalar(l.d_loss) << ',' << format_scalar(l.g_loss)
            << ',';
        if (l.na_ratio) out << (std::isinf(*l.na_ratio) ? "inf" : format_scalar(*l.na_ratio));
        out << ',';
        if (l.anomaly_count) out << *l.anomaly_count;
        out << '\n';
    }
}

} // namespace gan
} // namespace degan
