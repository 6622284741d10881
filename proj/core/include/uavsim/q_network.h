#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uavsim/map_pipeline.h"

namespace uavsim {

/// Architecture of the two-branch convolutional Q-network.
struct NetworkConfig {
    int conv_layers = 2;
    int kernels = 16;
    int kernel_size = 5;
    std::vector<int> hidden = {256, 256, 256};
    /// 4 = three environment layers plus the target layer. 6 adds two
    /// zero-filled channels per branch.
    int input_channels = 4;
    int action_count = kActionCount;
    /// Flying time enters the dense stack divided by this value.
    double flying_time_scale = 150.0;

    void validate() const;
    friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Named slice of the flat parameter vector. Shapes are row-major.
struct ParamBlock {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Activations kept by `forward` for `backward`.
struct ForwardCache {
    // [branch][sample][layer]: input to that conv layer, then the final output
    // at index conv_layers. Layout: channels x (height*width).
    std::vector<std::vector<std::vector<RowMatrix>>> conv_acts;
    // [layer]: input to dense layer k, features x batch. The entry at
    // index dense_count holds the Q-values.
    std::vector<Eigen::MatrixXd> dense_acts;
};

/// Exact count of weights and biases, computed from the architecture
/// arithmetic (independently of the QNetwork layout).
std::size_t parameter_count(const NetworkConfig& config, const ObservationSpec& spec, int map_size);

/// Two-branch conv Q-network. Holds the architecture only; parameter
/// vectors (online and target copies) are passed in as flat spans.
class QNetwork {
public:
    QNetwork(NetworkConfig config, ObservationSpec spec, int map_size);

    const NetworkConfig& config() const { return config_; }
    const ObservationSpec& spec() const { return spec_; }
    int map_size() const { return map_size_; }
    std::size_t parameter_count() const { return param_count_; }
    const std::vector<ParamBlock>& layout() const { return layout_; }

    /// Length of the concatenated flatten layer (both branches + flying time),
    /// derived from the actual conv output shapes.
    int flattened_size() const { return flat_size_; }

    /// He-uniform weights for ReLU layers, LeCun-uniform for the output
    /// layer, zero biases.
    std::vector<double> initial_parameters(std::mt19937_64& rng) const;

    /// Q-values for a batch, shape action_count x batch.
    Eigen::MatrixXd forward(std::span<const double> params, std::span<const Observation* const> batch,
                            ForwardCache* cache = nullptr) const;
    std::array<double, kActionCount> forward(std::span<const double> params, const Observation& obs) const;

    /// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(Q) of shape
    /// action_count x batch and the cache of the matching forward call.
    void backward(std::span<const double> params, const ForwardCache& cache, const Eigen::MatrixXd& grad_q,
                  std::span<double> grad) const;

    /// Flattened feature vector of one observation (the dense stack input).
    Eigen::VectorXd flatten_features(std::span<const double> params, const Observation& obs) const;

private:
    struct ConvLayer {
        int in_channels, out_channels, in_extent, out_extent;
        std::size_t weight, bias;  // indices into layout_
    };
    struct Branch {
        bool local;
        int extent;
        std::vector<ConvLayer> layers;
        int flat_size() const;
    };
    struct DenseLayer {
        int in, out;
        bool relu;
        std::size_t weight, bias;
    };

    std::size_t add_block(std::string name, std::vector<int> shape);
    RowMatrix pack_input(const Observation& obs, bool local) const;
    void check_observation(const Observation& obs) const;

    NetworkConfig config_;
    ObservationSpec spec_;
    int map_size_;
    std::vector<ParamBlock> layout_;
    std::size_t param_count_ = 0;
    std::vector<Branch> branches_;
    std::vector<DenseLayer> dense_;
    int flat_size_ = 0;
};

/// Greedy action, lowest index on ties. Throws on non-finite values.
Action greedy_action(std::span<const double> q);

/// Boltzmann distribution p_a proportional to exp(q_a / temperature).
std::array<double, kActionCount> softmax_policy(std::span<const double> q, double temperature);

Action sample_action(const std::array<double, kActionCount>& probs, std::mt19937_64& rng);

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Checkpoint {
    NetworkConfig network;
    ObservationSpec spec;
    int map_size = 0;
    std::vector<double> params;
};

/// JSON container: architecture, observation spec and named parameter arrays.
void save_checkpoint(const std::filesystem::path& path, const QNetwork& net, std::span<const double> params);
/// Throws CheckpointError on parse failures or shape inconsistencies.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace uavsim
