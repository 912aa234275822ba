#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "scal/affinity.hpp"

namespace scal {

enum class Activation { relu, linear, sigmoid };

/// Fully connected autoencoder with 5 hidden layers. Hidden activations are
/// ReLU except the middle (bottleneck) layer, which is linear; the output
/// layer is sigmoid. layer_sizes = [input, h1, h2, bottleneck, h2', h1', output].
struct NetworkParams {
    std::vector<int> layer_sizes;           // 7 entries
    std::vector<Eigen::MatrixXd> weights;   // 6 matrices, fan_out x fan_in
    std::vector<Eigen::VectorXd> biases;    // 6 vectors
    std::vector<Activation> activations;    // 6 tags

    int num_layers() const { return static_cast<int>(weights.size()); }
    int input_size() const { return layer_sizes.front(); }
    int bottleneck_size() const { return layer_sizes[layer_sizes.size() / 2]; }
};

struct TrainConfig {
    int batch_size = 64;
    int epochs = 10;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    bool shuffle = true;
};

/// Latent codes, one column per data point.
struct Embedding {
    Eigen::MatrixXd z;  // m x n
};

struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;  // pre-activations, one per layer
    std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[L] = reconstruction

    const Eigen::MatrixXd& reconstruction() const { return act.back(); }
};

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

struct TrainResult {
    NetworkParams params;
    std::vector<double> loss_history;  // mean loss per epoch
};

/// Weights ~ U(-a, a) with a = sqrt(6 / (fan_in + fan_out)), biases zero.
/// Deterministic per seed. layer_sizes must have exactly 7 entries.
NetworkParams init_network(const std::vector<int>& layer_sizes, std::uint64_t seed);

ForwardCache forward(const NetworkParams& params, const Eigen::MatrixXd& batch);

/// Mean over batch columns of the squared Euclidean reconstruction distance.
double reconstruction_loss(const Eigen::MatrixXd& reconstruction,
                           const Eigen::MatrixXd& target);

/// Exact gradient of reconstruction_loss by reverse accumulation. The ReLU
/// subgradient at 0 is taken as 0.
Gradients backward(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& target);
Gradients backward(const NetworkParams& params, const Eigen::MatrixXd& batch,
                   const Eigen::MatrixXd& target);

/// Mini-batch gradient descent with per-parameter adaptive step scaling
/// (Adam) at a fixed global rate; epochs * ceil(n / batch_size) steps,
/// columns shuffled per epoch when configured. Throws NumericalError naming
/// the epoch and step if the loss leaves the finite range.
TrainResult train(NetworkParams params, const ScaledMatrix& s, const TrainConfig& config);
TrainResult train(NetworkParams params, const Eigen::MatrixXd& s, const TrainConfig& config);

/// Forward pass truncated at the (linear) bottleneck.
Embedding encode(const NetworkParams& params, const ScaledMatrix& s);
Embedding encode(const NetworkParams& params, const Eigen::MatrixXd& s);

// Model checkpoint: header (magic "LAEN", u32 version, u32 size count,
// sizes), then per-layer weights and biases, row-major doubles, little-endian.
void save_network(const std::string& path, const NetworkParams& params);
NetworkParams load_network(const std::string& path);

} // namespace scal
