#include "scal/autoencoder.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "scal/error.hpp"
#include "scal/rng.hpp"

namespace scal {

namespace {

constexpr int kLayerSizeCount = 7;  // input + 5 hidden + output

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& pre) {
    switch (act) {
    case Activation::relu:
        return pre.cwiseMax(0.0);
    case Activation::linear:
        return pre;
    case Activation::sigmoid:
        return ((-pre.array()).exp() + 1.0).inverse();
    }
    throw ParameterError("unknown activation");
}

// Derivative with respect to the pre-activation, expressed from whatever is
// cheapest: the ReLU mask needs the pre-activation, sigmoid its output.
Eigen::ArrayXXd activation_derivative(Activation act, const Eigen::MatrixXd& pre,
                                      const Eigen::MatrixXd& out) {
    switch (act) {
    case Activation::relu:
        return (pre.array() > 0.0).cast<double>();  // subgradient at 0 is 0
    case Activation::linear:
        return Eigen::ArrayXXd::Ones(pre.rows(), pre.cols());
    case Activation::sigmoid:
        return out.array() * (1.0 - out.array());
    }
    throw ParameterError("unknown activation");
}

void check_network(const NetworkParams& params) {
    if (params.layer_sizes.size() != kLayerSizeCount ||
        params.weights.size() != kLayerSizeCount - 1 ||
        params.biases.size() != kLayerSizeCount - 1 ||
        params.activations.size() != kLayerSizeCount - 1) {
        throw ParameterError("network must have 5 hidden layers (7 size entries)");
    }
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw FormatError(path + ": truncated");
    return v;
}

} // namespace

NetworkParams init_network(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() != kLayerSizeCount) {
        throw ParameterError("init_network: expected " + std::to_string(kLayerSizeCount) +
                             " layer sizes, got " + std::to_string(layer_sizes.size()));
    }
    for (int s : layer_sizes) {
        if (s < 1) throw ParameterError("init_network: layer sizes must be positive");
    }

    NetworkParams params;
    params.layer_sizes = layer_sizes;
    params.activations = {Activation::relu,   Activation::relu, Activation::linear,
                          Activation::relu,   Activation::relu, Activation::sigmoid};

    Rng rng(seed);
    for (int l = 0; l + 1 < kLayerSizeCount; ++l) {
        const int fan_in = layer_sizes[static_cast<std::size_t>(l)];
        const int fan_out = layer_sizes[static_cast<std::size_t>(l) + 1];
        const double scale = std::sqrt(6.0 / (fan_in + fan_out));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-scale, scale);
        }
        params.weights.push_back(std::move(w));
        params.biases.emplace_back(Eigen::VectorXd::Zero(fan_out));
    }
    return params;
}

ForwardCache forward(const NetworkParams& params, const Eigen::MatrixXd& batch) {
    check_network(params);
    if (batch.rows() != params.input_size()) {
        throw ParameterError("forward: batch has " + std::to_string(batch.rows()) +
                             " rows, network input is " + std::to_string(params.input_size()));
    }

    ForwardCache cache;
    cache.act.reserve(params.weights.size() + 1);
    cache.pre.reserve(params.weights.size());
    cache.act.push_back(batch);
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Eigen::MatrixXd pre = params.weights[l] * cache.act.back();
        pre.colwise() += params.biases[l];
        cache.act.push_back(apply_activation(params.activations[l], pre));
        cache.pre.push_back(std::move(pre));
    }
    return cache;
}

double reconstruction_loss(const Eigen::MatrixXd& reconstruction,
                           const Eigen::MatrixXd& target) {
    if (reconstruction.rows() != target.rows() || reconstruction.cols() != target.cols()) {
        throw ParameterError("reconstruction_loss: shape mismatch");
    }
    if (target.cols() == 0) throw ParameterError("reconstruction_loss: empty batch");
    return (reconstruction - target).squaredNorm() / static_cast<double>(target.cols());
}

Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& target) {
    check_network(params);
    const auto layers = params.weights.size();
    if (cache.act.size() != layers + 1) throw ParameterError("backward: bad forward cache");
    if (target.rows() != cache.act.back().rows() || target.cols() != cache.act.back().cols()) {
        throw ParameterError("backward: target shape mismatch");
    }
    const double batch = static_cast<double>(target.cols());

    Gradients grads;
    grads.weights.resize(layers);
    grads.biases.resize(layers);

    // d(loss)/d(reconstruction) for the column-mean squared distance.
    Eigen::MatrixXd delta = (2.0 / batch) * (cache.act.back() - target);
    for (std::size_t l = layers; l-- > 0;) {
        delta.array() *=
            activation_derivative(params.activations[l], cache.pre[l], cache.act[l + 1]);
        grads.weights[l].noalias() = delta * cache.act[l].transpose();
        grads.biases[l] = delta.rowwise().sum();
        if (l > 0) delta = params.weights[l].transpose() * delta;
    }
    return grads;
}

Gradients backward(const NetworkParams& params, const Eigen::MatrixXd& batch,
                   const Eigen::MatrixXd& target) {
    return backward(params, forward(params, batch), target);
}

TrainResult train(NetworkParams params, const Eigen::MatrixXd& s, const TrainConfig& config) {
    check_network(params);
    const Eigen::Index n = s.cols();
    if (s.rows() != params.input_size()) {
        throw ParameterError("train: input rows do not match the network input size");
    }
    if (config.batch_size < 1 || config.batch_size > n) {
        throw ParameterError("train: batch_size must be in [1, n]");
    }
    if (config.epochs < 1) throw ParameterError("train: epochs must be positive");
    if (!(config.learning_rate >= 0.0)) throw ParameterError("train: bad learning rate");

    Rng rng(config.seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    const auto batches = static_cast<Eigen::Index>(
        (n + config.batch_size - 1) / config.batch_size);

    // Adam-style per-parameter step scaling. The loss surface here is badly
    // scaled by construction: the sigmoid output must track targets of order
    // 1/sqrt(n * p), which shrinks encoder gradients by the same factor, and
    // no single fixed rate serves both ends of the network.
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEpsilon = 1e-8;
    std::vector<Eigen::ArrayXXd> m_w, v_w;
    std::vector<Eigen::ArrayXd> m_b, v_b;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        m_w.emplace_back(Eigen::ArrayXXd::Zero(params.weights[l].rows(),
                                               params.weights[l].cols()));
        v_w.emplace_back(Eigen::ArrayXXd::Zero(params.weights[l].rows(),
                                               params.weights[l].cols()));
        m_b.emplace_back(Eigen::ArrayXd::Zero(params.biases[l].size()));
        v_b.emplace_back(Eigen::ArrayXd::Zero(params.biases[l].size()));
    }

    TrainResult result;
    result.loss_history.reserve(static_cast<std::size_t>(config.epochs));

    long step = 0;
    Eigen::MatrixXd batch(s.rows(), config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) rng.shuffle(order);

        double epoch_loss = 0.0;
        for (Eigen::Index b = 0; b < batches; ++b) {
            const Eigen::Index start = b * config.batch_size;
            const Eigen::Index len = std::min<Eigen::Index>(config.batch_size, n - start);
            batch.resize(s.rows(), len);
            for (Eigen::Index j = 0; j < len; ++j) {
                batch.col(j) = s.col(order[static_cast<std::size_t>(start + j)]);
            }

            const ForwardCache cache = forward(params, batch);
            const double loss = reconstruction_loss(cache.reconstruction(), batch);
            if (!std::isfinite(loss)) {
                throw NumericalError("train: loss diverged at epoch " +
                                     std::to_string(epoch + 1) + ", step " +
                                     std::to_string(b + 1));
            }
            epoch_loss += loss * static_cast<double>(len);

            const Gradients grads = backward(params, cache, batch);
            ++step;
            const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
            const double rate = config.learning_rate * std::sqrt(bias2) / bias1;
            for (std::size_t l = 0; l < params.weights.size(); ++l) {
                m_w[l] = kBeta1 * m_w[l] + (1.0 - kBeta1) * grads.weights[l].array();
                v_w[l] = kBeta2 * v_w[l] + (1.0 - kBeta2) * grads.weights[l].array().square();
                params.weights[l].array() -= rate * m_w[l] / (v_w[l].sqrt() + kEpsilon);

                m_b[l] = kBeta1 * m_b[l] + (1.0 - kBeta1) * grads.biases[l].array();
                v_b[l] = kBeta2 * v_b[l] + (1.0 - kBeta2) * grads.biases[l].array().square();
                params.biases[l].array() -= rate * m_b[l] / (v_b[l].sqrt() + kEpsilon);
            }
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(n));
    }
    result.params = std::move(params);
    return result;
}

TrainResult train(NetworkParams params, const ScaledMatrix& s, const TrainConfig& config) {
    return train(std::move(params), s.s, config);
}

Embedding encode(const NetworkParams& params, const Eigen::MatrixXd& s) {
    check_network(params);
    if (s.rows() != params.input_size()) {
        throw ParameterError("encode: input rows do not match the network input size");
    }
    const std::size_t bottleneck_layer = params.weights.size() / 2;  // layers 0..2 feed it
    Eigen::MatrixXd act = s;
    for (std::size_t l = 0; l < bottleneck_layer; ++l) {
        Eigen::MatrixXd pre = params.weights[l] * act;
        pre.colwise() += params.biases[l];
        act = apply_activation(params.activations[l], pre);
    }
    Embedding out;
    out.z = std::move(act);
    return out;
}

Embedding encode(const NetworkParams& params, const ScaledMatrix& s) {
    return encode(params, s.s);
}

void save_network(const std::string& path, const NetworkParams& params) {
    check_network(params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");

    out.write("LAEN", 4);
    const std::uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), 4);
    const auto count = static_cast<std::uint32_t>(params.layer_sizes.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (int s : params.layer_sizes) {
        const auto v = static_cast<std::uint32_t>(s);
        out.write(reinterpret_cast<const char*>(&v), 4);
    }
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const Eigen::MatrixXd& w = params.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const double v = w(r, c);
                out.write(reinterpret_cast<const char*>(&v), 8);
            }
        }
        out.write(reinterpret_cast<const char*>(params.biases[l].data()),
                  static_cast<std::streamsize>(params.biases[l].size() * 8));
    }
    if (!out) throw FormatError("write failed for '" + path + "'");
}

NetworkParams load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LAEN", 4) != 0) {
        throw FormatError(path + ": bad magic, not a model checkpoint");
    }
    const std::uint32_t version = read_u32(in, path);
    if (version != 1) throw FormatError(path + ": unsupported version");
    const std::uint32_t count = read_u32(in, path);
    if (count != kLayerSizeCount) throw FormatError(path + ": unexpected layer count");

    std::vector<int> sizes(count);
    for (auto& s : sizes) s = static_cast<int>(read_u32(in, path));

    NetworkParams params = init_network(sizes, 0);  // shapes + activation tags
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Eigen::MatrixXd& w = params.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                double v;
                in.read(reinterpret_cast<char*>(&v), 8);
                if (!in) throw FormatError(path + ": truncated weights");
                w(r, c) = v;
            }
        }
        in.read(reinterpret_cast<char*>(params.biases[l].data()),
                static_cast<std::streamsize>(params.biases[l].size() * 8));
        if (!in) throw FormatError(path + ": truncated biases");
    }
    return params;
}

} // namespace scal
