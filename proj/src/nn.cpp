#include "degan/nn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace degan {
namespace nn {

namespace {

void glorot_init(Network& net) {
    Rng rng(net.rng_seed);
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& spec = net.layers[i];
        if (!spec.has_params()) continue;
        Scalar fan_in, fan_out;
        if (spec.kind == LayerKind::Dense) {
            fan_in = static_cast<Scalar>(spec.in_dim);
            fan_out = static_cast<Scalar>(spec.out_dim);
        } else {
            fan_in = static_cast<Scalar>(spec.in_channels * spec.filter_size);
            fan_out = static_cast<Scalar>(spec.out_channels * spec.filter_size);
        }
        const Scalar limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<Scalar> dist(-limit, limit);
        Matrix& w = net.weights[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                w(r, c) = dist(rng);
        net.biases[i].setZero();
    }
}

void allocate_params(Network& net) {
    net.weights.resize(net.layers.size());
    net.biases.resize(net.layers.size());
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& spec = net.layers[i];
        if (spec.kind == LayerKind::Dense) {
            net.weights[i].resize(spec.out_dim, spec.in_dim);
            net.biases[i].resize(spec.out_dim);
        } else if (spec.kind == LayerKind::Conv1d) {
            net.weights[i].resize(spec.out_channels, spec.in_channels * spec.filter_size);
            net.biases[i].resize(spec.out_channels);
        }
    }
}

LayerSpec dense(Eigen::Index in, Eigen::Index out) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.in_dim = in;
    s.out_dim = out;
    return s;
}

LayerSpec activation(LayerKind kind, Eigen::Index dim) {
    LayerSpec s;
    s.kind = kind;
    s.in_dim = dim;
    s.out_dim = dim;
    return s;
}

LayerSpec dropout(Scalar rate, Eigen::Index dim) {
    LayerSpec s = activation(LayerKind::Dropout, dim);
    s.rate = rate;
    return s;
}

/// im2col: one row per (sample, output position) holding the ic*f patch.
Matrix conv_patches(const LayerSpec& spec, const Matrix& x) {
    const Eigen::Index ic = spec.in_channels, f = spec.filter_size;
    const Eigen::Index out_len = spec.in_length - f + 1;
    Matrix cols(x.rows() * out_len, ic * f);
    for (Eigen::Index b = 0; b < x.rows(); ++b)
        for (Eigen::Index p = 0; p < out_len; ++p)
            for (Eigen::Index k = 0; k < f; ++k)
                for (Eigen::Index c = 0; c < ic; ++c)
                    cols(b * out_len + p, c * f + k) = x(b, (p + k) * ic + c);
    return cols;
}

} // namespace

std::string to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv1d: return "conv1d";
        case LayerKind::Tanh: return "tanh";
        case LayerKind::Relu: return "relu";
        case LayerKind::Sigmoid: return "sigmoid";
        case LayerKind::Dropout: return "dropout";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Reshape: return "reshape";
    }
    return "?";
}

std::string to_string(ArchTag tag) {
    switch (tag) {
        case ArchTag::Generator: return "generator";
        case ArchTag::CnnD: return "cnn_d";
        case ArchTag::DenseD: return "dense_d";
    }
    return "?";
}

ArchTag arch_from_string(const std::string& s) {
    if (s == "generator") return ArchTag::Generator;
    if (s == "cnn_d") return ArchTag::CnnD;
    if (s == "dense_d") return ArchTag::DenseD;
    throw std::runtime_error("neuralnet: unknown arch tag '" + s + "'");
}

Eigen::Index LayerSpec::param_count() const {
    if (kind == LayerKind::Dense) return in_dim * out_dim + out_dim;
    if (kind == LayerKind::Conv1d) return in_channels * filter_size * out_channels + out_channels;
    return 0;
}

std::vector<Eigen::Index> Network::param_counts() const {
    std::vector<Eigen::Index> counts;
    for (const auto& l : layers)
        if (l.has_params()) counts.push_back(l.param_count());
    return counts;
}

Network build_generator(Eigen::Index noise_dim, Eigen::Index wl, uint64_t seed,
                        bool tanh_output) {
    if (noise_dim < 1 || wl < 1)
        throw std::runtime_error("neuralnet: noise_dim and wl must be positive");
    Network net;
    net.arch_tag = ArchTag::Generator;
    net.wl = wl;
    net.rng_seed = seed;
    net.layers.push_back(dense(noise_dim, 256));
    net.layers.push_back(activation(LayerKind::Tanh, 256));
    net.layers.push_back(dense(256, wl));
    if (tanh_output) net.layers.push_back(activation(LayerKind::Tanh, wl));
    allocate_params(net);
    glorot_init(net);
    return net;
}

Network build_discriminator(ArchTag arch, Eigen::Index wl, uint64_t seed,
                            Scalar dropout_rate) {
    Network net;
    net.arch_tag = arch;
    net.wl = wl;
    net.rng_seed = seed;
    if (arch == ArchTag::CnnD) {
        const Eigen::Index filter = 5;
        if (wl <= filter)
            throw std::runtime_error("neuralnet: cnn_d needs wl > filter size (5)");
        const Eigen::Index out_len = wl - filter + 1;
        const Eigen::Index flat = out_len * 16;

        LayerSpec reshape = activation(LayerKind::Reshape, wl);
        net.layers.push_back(reshape);

        LayerSpec conv;
        conv.kind = LayerKind::Conv1d;
        conv.in_channels = 1;
        conv.out_channels = 16;
        conv.filter_size = filter;
        conv.in_length = wl;
        conv.in_dim = wl;
        conv.out_dim = flat;
        net.layers.push_back(conv);

        net.layers.push_back(activation(LayerKind::Relu, flat));
        net.layers.push_back(dropout(dropout_rate, flat));
        net.layers.push_back(activation(LayerKind::Flatten, flat));
        net.layers.push_back(dense(flat, 16));
        net.layers.push_back(activation(LayerKind::Tanh, 16));
        net.layers.push_back(dense(16, 2));
        net.layers.push_back(activation(LayerKind::Sigmoid, 2));
    } else if (arch == ArchTag::DenseD) {
        net.layers.push_back(dense(wl, 256));
        net.layers.push_back(activation(LayerKind::Tanh, 256));
        net.layers.push_back(dropout(dropout_rate, 256));
        net.layers.push_back(dense(256, 16));
        net.layers.push_back(dense(16, 2));
        net.layers.push_back(activation(LayerKind::Sigmoid, 2));
    } else {
        throw std::runtime_error("neuralnet: build_discriminator takes cnn_d or dense_d");
    }
    allocate_params(net);
    glorot_init(net);
    return net;
}

Matrix forward(const Network& net, const Matrix& input, Mode mode, Rng* rng, Cache* cache) {
    if (input.cols() != net.input_dim())
        throw std::runtime_error("neuralnet: input dim " + std::to_string(input.cols()) +
                                 " does not match layer 0 (expects " +
                                 std::to_string(net.input_dim()) + ")");
    if (mode == Mode::Train && rng == nullptr)
        throw std::runtime_error("neuralnet: train-mode forward needs an rng");

    if (cache) {
        cache->inputs.assign(net.layers.size(), Matrix());
        cache->masks.assign(net.layers.size(), Matrix());
    }

    Matrix x = input;
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& spec = net.layers[i];
        if (x.cols() != spec.in_dim)
            throw std::runtime_error("neuralnet: shape mismatch entering layer " +
                                     std::to_string(i) + " (" + to_string(spec.kind) + ")");
        if (cache) cache->inputs[i] = x;
        switch (spec.kind) {
            case LayerKind::Dense:
                x = (x * net.weights[i].transpose()).rowwise() +
                    net.biases[i].transpose();
                break;
            case LayerKind::Conv1d: {
                const Eigen::Index oc = spec.out_channels;
                const Eigen::Index out_len = spec.in_length - spec.filter_size + 1;
                Matrix y_col = conv_patches(spec, x) * net.weights[i].transpose();
                y_col.rowwise() += net.biases[i].transpose();
                // (B*out_len, oc) row-major is already the flat (out_len, oc) layout
                x = Eigen::Map<Matrix>(y_col.data(), x.rows(), out_len * oc);
                break;
            }
            case LayerKind::Tanh:
                x = x.array().tanh();
                break;
            case LayerKind::Relu:
                x = x.array().max(0.0);
                break;
            case LayerKind::Sigmoid:
                x = 1.0 / (1.0 + (-x.array()).exp());
                break;
            case LayerKind::Dropout:
                if (mode == Mode::Train) {
                    std::uniform_real_distribution<Scalar> u(0.0, 1.0);
                    Matrix mask(x.rows(), x.cols());
                    const Scalar keep = 1.0 - spec.rate;
                    for (Eigen::Index r = 0; r < mask.rows(); ++r)
                        for (Eigen::Index c = 0; c < mask.cols(); ++c)
                            mask(r, c) = (u(*rng) >= spec.rate) ? 1.0 / keep : 0.0;
                    if (cache) cache->masks[i] = mask;
                    x = x.cwiseProduct(mask);
                }
                break;
            case LayerKind::Flatten:
            case LayerKind::Reshape:
                break;  // layout bookkeeping only; activations are already flat
        }
    }
    if (cache) cache->output = x;
    return x;
}

Gradients backward(const Network& net, const Cache& cache, const Matrix& output_grad,
                   bool grad_at_logits) {
    const size_t n = net.layers.size();
    if (cache.inputs.size() != n)
        throw std::runtime_error("neuralnet: backward needs a train-mode cache");

    Gradients g;
    g.weight_grads.resize(n);
    g.bias_grads.resize(n);
    for (size_t i = 0; i < n; ++i) {
        if (net.layers[i].has_params()) {
            g.weight_grads[i] = Matrix::Zero(net.weights[i].rows(), net.weights[i].cols());
            g.bias_grads[i] = Vector::Zero(net.biases[i].size());
        }
    }

    Matrix grad = output_grad;
    size_t start = n;
    if (grad_at_logits) {
        if (net.layers.back().kind != LayerKind::Sigmoid)
            throw std::runtime_error("neuralnet: grad_at_logits needs a final sigmoid");
        start = n - 1;  // skip the sigmoid; grad is w.r.t. its pre-activation
    }

    for (size_t idx = start; idx-- > 0;) {
        const LayerSpec& spec = net.layers[idx];
        const Matrix& in = cache.inputs[idx];
        const Matrix& out = (idx + 1 < n) ? cache.inputs[idx + 1] : cache.output;
        switch (spec.kind) {
            case LayerKind::Dense:
                g.weight_grads[idx] = grad.transpose() * in;
                g.bias_grads[idx] = grad.colwise().sum().transpose();
                grad = grad * net.weights[idx];
                break;
            case LayerKind::Conv1d: {
                const Eigen::Index ic = spec.in_channels, oc = spec.out_channels;
                const Eigen::Index f = spec.filter_size;
                const Eigen::Index out_len = spec.in_length - f + 1;
                const Eigen::Index batch = in.rows();
                Eigen::Map<const Matrix> g_col(grad.data(), batch * out_len, oc);
                g.weight_grads[idx] = g_col.transpose() * conv_patches(spec, in);
                g.bias_grads[idx] = g_col.colwise().sum().transpose();
                const Matrix d_cols = g_col * net.weights[idx];  // (B*out_len, ic*f)
                Matrix din = Matrix::Zero(batch, in.cols());
                for (Eigen::Index b = 0; b < batch; ++b)
                    for (Eigen::Index p = 0; p < out_len; ++p)
                        for (Eigen::Index k = 0; k < f; ++k)
                            for (Eigen::Index c = 0; c < ic; ++c)
                                din(b, (p + k) * ic + c) += d_cols(b * out_len + p, c * f + k);
                grad = std::move(din);
                break;
            }
            case LayerKind::Tanh:
                grad = grad.cwiseProduct((1.0 - out.array().square()).matrix());
                break;
            case LayerKind::Relu:
                grad = grad.cwiseProduct((in.array() > 0.0).cast<Scalar>().matrix());
                break;
            case LayerKind::Sigmoid:
                grad = grad.cwiseProduct((out.array() * (1.0 - out.array())).matrix());
                break;
            case LayerKind::Dropout:
                if (cache.masks[idx].size() > 0)
                    grad = grad.cwiseProduct(cache.masks[idx]);
                break;
            case LayerKind::Flatten:
            case LayerKind::Reshape:
                break;
        }
    }
    g.input_grad = std::move(grad);
    return g;
}

TrainState make_train_state(Network params) {
    TrainState st;
    st.params = std::move(params);
    const size_t n = st.params.layers.size();
    st.m_w.resize(n);
    st.v_w.resize(n);
    st.m_b.resize(n);
    st.v_b.resize(n);
    for (size_t i = 0; i < n; ++i) {
        if (!st.params.layers[i].has_params()) continue;
        st.m_w[i] = Matrix::Zero(st.params.weights[i].rows(), st.params.weights[i].cols());
        st.v_w[i] = st.m_w[i];
        st.m_b[i] = Vector::Zero(st.params.biases[i].size());
        st.v_b[i] = st.m_b[i];
    }
    return st;
}

void optimizer_step(TrainState& st, const Gradients& grads, Scalar lr) {
    for (size_t i = 0; i < st.params.layers.size(); ++i) {
        if (!st.params.layers[i].has_params()) continue;
        if (!grads.weight_grads[i].allFinite() || !grads.bias_grads[i].allFinite())
            throw std::runtime_error("neuralnet: diverged (non-finite gradient)");
    }
    ++st.step;
    const Scalar bc1 = 1.0 - std::pow(st.beta1, static_cast<Scalar>(st.step));
    const Scalar bc2 = 1.0 - std::pow(st.beta2, static_cast<Scalar>(st.step));
    for (size_t i = 0; i < st.params.layers.size(); ++i) {
        if (!st.params.layers[i].has_params()) continue;
        auto adam = [&](auto& m, auto& v, auto& w, const auto& g) {
            m = st.beta1 * m + (1.0 - st.beta1) * g;
            v = (st.beta2 * v.array() + (1.0 - st.beta2) * g.array().square()).matrix();
            w.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + st.eps);
        };
        adam(st.m_w[i], st.v_w[i], st.params.weights[i], grads.weight_grads[i]);
        adam(st.m_b[i], st.v_b[i], st.params.biases[i], grads.bias_grads[i]);
    }
}

void save_checkpoint(const Network& net, Eigen::Index epoch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("neuralnet: cannot write " + path);
    out << "degan-checkpoint 1\n";
    out << "arch " << to_string(net.arch_tag) << '\n';
    out << "wl " << net.wl << '\n';
    out << "epoch " << epoch << '\n';
    out << "seed " << net.rng_seed << '\n';
    out << "layers " << net.layers.size() << '\n';
    for (size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& l = net.layers[i];
        out << "layer " << i << ' ' << to_string(l.kind);
        switch (l.kind) {
            case LayerKind::Dense:
                out << ' ' << l.in_dim << ' ' << l.out_dim;
                break;
            case LayerKind::Conv1d:
                out << ' ' << l.in_channels << ' ' << l.out_channels << ' ' << l.filter_size
                    << ' ' << l.in_length;
                break;
            case LayerKind::Dropout:
                out << ' ' << format_scalar(l.rate) << ' ' << l.in_dim;
                break;
            default:
                out << ' ' << l.in_dim;
                break;
        }
        out << '\n';
    }
    for (size_t i = 0; i < net.layers.size(); ++i) {
        if (!net.layers[i].has_params()) continue;
        out << "weights " << i << '\n';
        const Matrix& w = net.weights[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                if (c) out << ' ';
                out << format_scalar(w(r, c));
            }
            out << '\n';
        }
        out << "bias " << i << '\n';
        for (Eigen::Index r = 0; r < net.biases[i].size(); ++r) {
            if (r) out << ' ';
            out << format_scalar(net.biases[i][r]);
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

} // namespace

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("neuralnet: cannot open " + path);

    auto expect_line = [&](const std::string& key) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error("neuralnet: truncated checkpoint " + path);
        auto toks = split_ws(line);
        if (toks.size() < 2 || toks[0] != key)
            throw std::runtime_error("neuralnet: bad checkpoint header in " + path +
                                     " (expected '" + key + "')");
        return toks;
    };

    auto magic = expect_line("degan-checkpoint");
    if (magic[1] != "1")
        throw std::runtime_error("neuralnet: unsupported checkpoint version " + magic[1]);

    Checkpoint cp;
    cp.net.arch_tag = arch_from_string(expect_line("arch")[1]);
    cp.net.wl = std::stoll(expect_line("wl")[1]);
    cp.epoch = std::stoll(expect_line("epoch")[1]);
    cp.net.rng_seed = std::stoull(expect_line("seed")[1]);
    const size_t nlayers = std::stoull(expect_line("layers")[1]);

    for (size_t i = 0; i < nlayers; ++i) {
        auto toks = expect_line("layer");
        if (toks.size() < 4 || std::stoull(toks[1]) != i)
            throw std::runtime_error("neuralnet: bad layer line in " + path);
        const std::string& kind = toks[2];
        LayerSpec l;
        if (kind == "dense") {
            l.kind = LayerKind::Dense;
            l.in_dim = std::stoll(toks[3]);
            l.out_dim = std::stoll(toks[4]);
        } else if (kind == "conv1d") {
            l.kind = LayerKind::Conv1d;
            l.in_channels = std::stoll(toks[3]);
            l.out_channels = std::stoll(toks[4]);
            l.filter_size = std::stoll(toks[5]);
            l.in_length = std::stoll(toks[6]);
            l.in_dim = l.in_length * l.in_channels;
            l.out_dim = (l.in_length - l.filter_size + 1) * l.out_channels;
        } else if (kind == "dropout") {
            l.kind = LayerKind::Dropout;
            l.rate = parse_scalar(toks[3]);
            l.in_dim = l.out_dim = std::stoll(toks[4]);
        } else {
            if (kind == "tanh") l.kind = LayerKind::Tanh;
            else if (kind == "relu") l.kind = LayerKind::Relu;
            else if (kind == "sigmoid") l.kind = LayerKind::Sigmoid;
            else if (kind == "flatten") l.kind = LayerKind::Flatten;
            else if (kind == "reshape") l.kind = LayerKind::Reshape;
            else throw std::runtime_error("neuralnet: unknown layer kind '" + kind + "'");
            l.in_dim = l.out_dim = std::stoll(toks[3]);
        }
        cp.net.layers.push_back(l);
    }
    allocate_params(cp.net);

    std::string line;
    while (std::getline(in, line)) {
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] != "weights" || toks.size() != 2)
            throw std::runtime_error("neuralnet: expected 'weights <i>' in " + path);
        const size_t i = std::stoull(toks[1]);
        if (i >= nlayers || !cp.net.layers[i].has_params())
            throw std::runtime_error("neuralnet: weights for non-parametric layer in " + path);
        Matrix& w = cp.net.weights[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            if (!std::getline(in, line))
                throw std::runtime_error("neuralnet: truncated weights in " + path);
            auto vals = split_ws(line);
            if (static_cast<Eigen::Index>(vals.size()) != w.cols())
                throw std::runtime_error("neuralnet: weight row width mismatch in " + path);
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = parse_scalar(vals[c]);
        }
        if (!std::getline(in, line) || split_ws(line) != std::vector<std::string>{"bias", toks[1]})
            throw std::runtime_error("neuralnet: expected 'bias " + toks[1] + "' in " + path);
        if (!std::getline(in, line))
            throw std::runtime_error("neuralnet: truncated bias in " + path);
        auto vals = split_ws(line);
        if (static_cast<Eigen::Index>(vals.size()) != cp.net.biases[i].size())
            throw std::runtime_error("neuralnet: bias width mismatch in " + path);
        for (Eigen::Index r = 0; r < cp.net.biases[i].size(); ++r)
            cp.net.biases[i][r] = parse_scalar(vals[r]);
    }
    return cp;
}

} // namespace nn
} // namespace degan
