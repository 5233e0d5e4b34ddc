#pragma once

#include "degan/types.hpp"

#include <string>
#include <vector>

namespace degan {
namespace nn {

enum class LayerKind { Dense, Conv1d, Tanh, Relu, Sigmoid, Dropout, Flatten, Reshape };

enum class ArchTag { Generator, CnnD, DenseD };

std::string to_string(LayerKind kind);
std::string to_string(ArchTag tag);
ArchTag arch_from_string(const std::string& s);

/// One layer of a sequential net. All activations are carried as flat
/// row vectors; for conv data the layout is position-major with the
/// channel index fastest, matching a row-major (length, channels) tensor.
struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    Eigen::Index in_dim = 0;   // flat input length
    Eigen::Index out_dim = 0;  // flat output length
    // conv1d only
    Eigen::Index in_channels = 0;
    Eigen::Index out_channels = 0;
    Eigen::Index filter_size = 0;
    Eigen::Index in_length = 0;  // positions per channel
    // dropout only
    Scalar rate = 0;

    bool has_params() const { return kind == LayerKind::Dense || kind == LayerKind::Conv1d; }
    Eigen::Index param_count() const;
};

struct Network {
    ArchTag arch_tag = ArchTag::Generator;
    Eigen::Index wl = 0;
    uint64_t rng_seed = 0;
    std::vector<LayerSpec> layers;
    // Dense: weights[i] is out_dim x in_dim. Conv1d: out_channels x (in_channels*filter_size).
    // Non-parametric layers hold empty tensors.
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    Eigen::Index input_dim() const { return layers.front().in_dim; }
    Eigen::Index output_dim() const { return layers.back().out_dim; }

    /// Parameter count of each parametric layer, in layer order.
    std::vector<Eigen::Index> param_counts() const;
};

/// Dense(noise_dim -> 256, Tanh) -> Dense(256 -> wl). tanh_output adds a
/// final Tanh (the bounded-output variant).
Network build_generator(Eigen::Index noise_dim, Eigen::Index wl, uint64_t seed,
                        bool tanh_output = false);

Network build_discriminator(ArchTag arch, Eigen::Index wl, uint64_t seed,
                            Scalar dropout_rate = 0.25);

enum class Mode { Train, Infer };

struct Cache {
    std::vector<Matrix> inputs;  // input of each layer
    std::vector<Matrix> masks;   // dropout masks, indexed like layers (empty elsewhere)
    Matrix output;
};

/// Runs the net on a batch (rows = samples). Train mode applies inverted
/// dropout drawn from rng and fills cache for backward.
Matrix forward(const Network& net, const Matrix& input, Mode mode,
               Rng* rng = nullptr, Cache* cache = nullptr);

struct Gradients {
    std::vector<Matrix> weight_grads;
    std::vector<Vector> bias_grads;
    Matrix input_grad;
};

/// Backpropagates output_grad through the cached forward pass.
/// grad_at_logits: output_grad is taken w.r.t. the pre-activation of a
/// final Sigmoid layer (the fused cross-entropy path).
Gradients backward(const Network& net, const Cache& cache, const Matrix& output_grad,
                   bool grad_at_logits = false);

struct TrainState {
    Network params;
    std::vector<Matrix> m_w, v_w;
    std::vector<Vector> m_b, v_b;
    long step = 0;
    Scalar beta1 = 0.5;
    Scalar beta2 = 0.999;
    Scalar eps = 1e-8;
};

TrainState make_train_state(Network params);

/// One Adam update. Throws "diverged" on non-finite gradients.
void optimizer_step(TrainState& state, const Gradients& grads, Scalar learning_rate);

void save_checkpoint(const Network& net, Eigen::Index epoch, const std::string& path);

struct Checkpoint {
    Network net;
    Eigen::Index epoch = 0;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace nn
} // namespace degan
