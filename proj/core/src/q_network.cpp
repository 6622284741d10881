#include "uavsim/q_network.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

namespace uavsim {

using Json = nlohmann::json;
using ConstRowMap = Eigen::Map<const RowMatrix>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

void NetworkConfig::validate() const {
    if (conv_layers < 1) throw std::invalid_argument("network.conv_layers must be >= 1");
    if (kernels < 1) throw std::invalid_argument("network.kernels must be >= 1");
    if (kernel_size < 1 || kernel_size % 2 == 0) throw std::invalid_argument("network.kernel_size must be odd");
    if (hidden.empty()) throw std::invalid_argument("network.hidden must not be empty");
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("network.hidden widths must be positive");
    if (input_channels < 4) throw std::invalid_argument("network.input_channels must be >= 4");
    if (action_count != kActionCount) throw std::invalid_argument("network.action_count must be 6");
    if (!(flying_time_scale > 0.0)) throw std::invalid_argument("network.flying_time_scale must be positive");
}

std::size_t parameter_count(const NetworkConfig& config, const ObservationSpec& spec, int map_size) {
    config.validate();
    const std::size_t k2 = static_cast<std::size_t>(config.kernel_size) * config.kernel_size;
    const std::size_t nk = config.kernels;
    // First conv layer sees the input channels, every further one n_k.
    std::size_t conv = k2 * config.input_channels * nk + nk;
    conv += static_cast<std::size_t>(config.conv_layers - 1) * (k2 * nk * nk + nk);
    const std::size_t branches = spec.local_enabled() ? 2 : 1;

    std::size_t dense = 0;
    std::size_t width = flatten_size(spec, map_size, config.kernels, config.conv_layers, config.kernel_size);
    for (int h : config.hidden) {
        dense += width * h + h;
        width = h;
    }
    dense += width * config.action_count + config.action_count;
    return branches * conv + dense;
}

int QNetwork::Branch::flat_size() const {
    const ConvLayer& last = layers.back();
    return last.out_channels * last.out_extent * last.out_extent;
}

std::size_t QNetwork::add_block(std::string name, std::vector<int> shape) {
    const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                          [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
    layout_.push_back({std::move(name), std::move(shape), param_count_, n});
    param_count_ += n;
    return layout_.size() - 1;
}

QNetwork::QNetwork(NetworkConfig config, ObservationSpec spec, int map_size)
    : config_(std::move(config)), spec_(spec), map_size_(map_size) {
    config_.validate();
    spec_.validate(map_size_);

    const int k = config_.kernel_size;
    auto build_branch = [&](bool local, int extent, const std::string& prefix) {
        Branch br{local, extent, {}};
        int in_c = config_.input_channels;
        int ext = extent;
        for (int l = 0; l < config_.conv_layers; ++l) {
            const int out_ext = ext - 2 * (k / 2);
            if (out_ext <= 0)
                throw std::invalid_argument(prefix + " branch of size " + std::to_string(extent) +
                                            " vanishes after convolution");
            const std::string name = prefix + ".conv" + std::to_string(l);
            const std::size_t w = add_block(name + ".weight", {config_.kernels, in_c, k, k});
            const std::size_t b = add_block(name + ".bias", {config_.kernels});
            br.layers.push_back({in_c, config_.kernels, ext, out_ext, w, b});
            in_c = config_.kernels;
            ext = out_ext;
        }
        branches_.push_back(std::move(br));
    };
    if (spec_.local_enabled()) build_branch(true, spec_.local_size, "local");
    build_branch(false, spec_.global_extent(map_size_), "global");

    flat_size_ = 1;
    for (const auto& br : branches_) flat_size_ += br.flat_size();

    int in = flat_size_;
    for (std::size_t i = 0; i < config_.hidden.size(); ++i) {
        const int out = config_.hidden[i];
        const std::string name = "dense" + std::to_string(i);
        const std::size_t w = add_block(name + ".weight", {out, in});
        const std::size_t b = add_block(name + ".bias", {out});
        dense_.push_back({in, out, true, w, b});
        in = out;
    }
    const std::size_t w = add_block("q.weight", {config_.action_count, in});
    const std::size_t b = add_block("q.bias", {config_.action_count});
    dense_.push_back({in, config_.action_count, false, w, b});
}

std::vector<double> QNetwork::initial_parameters(std::mt19937_64& rng) const {
    std::vector<double> params(param_count_, 0.0);
    auto fill_uniform = [&](const ParamBlock& block, int fan_in, double gain) {
        const double limit = std::sqrt(gain / fan_in);
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t i = 0; i < block.size; ++i) params[block.offset + i] = dist(rng);
    };
    for (const auto& br : branches_)
        for (const auto& l : br.layers)
            fill_uniform(layout_[l.weight], l.in_channels * config_.kernel_size * config_.kernel_size, 6.0);
    for (const auto& d : dense_) fill_uniform(layout_[d.weight], d.in, d.relu ? 6.0 : 3.0);
    return params;
}

void QNetwork::check_observation(const Observation& obs) const {
    auto check = [](const Tensor3<float>& t, int channels, int extent, const char* what) {
        if (t.channels() != channels || t.height() != extent || t.width() != extent)
            throw std::invalid_argument(std::string("observation ") + what + " has shape " +
                                        std::to_string(t.channels()) + "x" + std::to_string(t.height()) + "x" +
                                        std::to_string(t.width()) + ", expected " + std::to_string(channels) +
                                        "x" + std::to_string(extent) + "x" + std::to_string(extent));
    };
    if (spec_.local_enabled()) {
        check(obs.local_env, 3, spec_.local_size, "local_env");
        check(obs.local_target, 1, spec_.local_size, "local_target");
    }
    const int n = spec_.global_extent(map_size_);
    check(obs.global_env, 3, n, "global_env");
    check(obs.global_target, 1, n, "global_target");
}

RowMatrix QNetwork::pack_input(const Observation& obs, bool local) const {
    const Tensor3<float>& env = local ? obs.local_env : obs.global_env;
    const Tensor3<float>& tgt = local ? obs.local_target : obs.global_target;
    const int hw = static_cast<int>(env.plane_size());
    RowMatrix in = RowMatrix::Zero(config_.input_channels, hw);
    for (int c = 0; c < 3; ++c) {
        auto src = env.channel(c);
        for (int p = 0; p < hw; ++p) in(c, p) = src[p];
    }
    auto src = tgt.channel(0);
    for (int p = 0; p < hw; ++p) in(3, p) = src[p];
    return in;
}

namespace {

// Rows of `col` enumerate (channel, ky, kx); columns the output positions.
void im2col(const RowMatrix& in, int extent, int k, RowMatrix& col) {
    const int out = extent - k + 1;
    col.resize(in.rows() * k * k, static_cast<Eigen::Index>(out) * out);
    for (Eigen::Index c = 0; c < in.rows(); ++c) {
        const double* src = in.row(c).data();
        for (int u = 0; u < k; ++u) {
            for (int v = 0; v < k; ++v) {
                double* dst = col.row((c * k + u) * k + v).data();
                for (int oi = 0; oi < out; ++oi) {
                    const double* s = src + (oi + u) * extent + v;
                    double* d = dst + oi * out;
                    for (int oj = 0; oj < out; ++oj) d[oj] = s[oj];
                }
            }
        }
    }
}

void col2im_add(const RowMatrix& col, int extent, int k, RowMatrix& din) {
    const int out = extent - k + 1;
    for (Eigen::Index c = 0; c < din.rows(); ++c) {
        double* dst = din.row(c).data();
        for (int u = 0; u < k; ++u) {
            for (int v = 0; v < k; ++v) {
                const double* src = col.row((c * k + u) * k + v).data();
                for (int oi = 0; oi < out; ++oi) {
                    double* d = dst + (oi + u) * extent + v;
                    const double* s = src + oi * out;
                    for (int oj = 0; oj < out; ++oj) d[oj] += s[oj];
                }
            }
        }
    }
}

}  // namespace

Eigen::MatrixXd QNetwork::forward(std::span<const double> params, std::span<const Observation* const> batch,
                                  ForwardCache* cache) const {
    if (params.size() != param_count_)
        throw std::invalid_argument("forward: parameter vector has " + std::to_string(params.size()) +
                                    " entries, expected " + std::to_string(param_count_));
    const auto batch_size = static_cast<Eigen::Index>(batch.size());
    const int k = config_.kernel_size;
    Eigen::MatrixXd x(flat_size_, batch_size);

    if (cache) {
        cache->conv_acts.assign(branches_.size(), {});
        for (auto& b : cache->conv_acts) b.resize(batch.size());
        cache->dense_acts.clear();
    }

    RowMatrix col;
    for (Eigen::Index s = 0; s < batch_size; ++s) {
        const Observation& obs = *batch[s];
        check_observation(obs);
        Eigen::Index row = 0;
        for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
            const Branch& br = branches_[bi];
            RowMatrix act = pack_input(obs, br.local);
            for (const ConvLayer& l : br.layers) {
                const ParamBlock& wb = layout_[l.weight];
                const ParamBlock& bb = layout_[l.bias];
                ConstRowMap w(params.data() + wb.offset, l.out_channels, static_cast<Eigen::Index>(l.in_channels) * k * k);
                ConstVecMap b(params.data() + bb.offset, l.out_channels);
                im2col(act, l.in_extent, k, col);
                RowMatrix out = w * col;
                out.colwise() += b;
                out = out.cwiseMax(0.0);
                if (cache) cache->conv_acts[bi][s].push_back(std::move(act));
                act = std::move(out);
            }
            x.col(s).segment(row, act.size()) = Eigen::Map<const Eigen::VectorXd>(act.data(), act.size());
            row += act.size();
            if (cache) cache->conv_acts[bi][s].push_back(std::move(act));
        }
        x(row, s) = obs.flying_time / config_.flying_time_scale;
    }

    for (const DenseLayer& d : dense_) {
        const ParamBlock& wb = layout_[d.weight];
        const ParamBlock& bb = layout_[d.bias];
        ConstRowMap w(params.data() + wb.offset, d.out, d.in);
        ConstVecMap b(params.data() + bb.offset, d.out);
        Eigen::MatrixXd z = w * x;
        z.colwise() += b;
        if (d.relu) z = z.cwiseMax(0.0);
        if (cache) cache->dense_acts.push_back(std::move(x));
        x = std::move(z);
    }
    if (cache) cache->dense_acts.push_back(x);
    return x;
}

std::array<double, kActionCount> QNetwork::forward(std::span<const double> params, const Observation& obs) const {
    const Observation* one[] = {&obs};
    const Eigen::MatrixXd q = forward(params, one);
    std::array<double, kActionCount> out{};
    for (int a = 0; a < kActionCount; ++a) out[a] = q(a, 0);
    return out;
}

Eigen::VectorXd QNetwork::flatten_features(std::span<const double> params, const Observation& obs) const {
    const Observation* one[] = {&obs};
    ForwardCache cache;
    forward(params, one, &cache);
    return cache.dense_acts.front().col(0);
}

void QNetwork::backward(std::span<const double> params, const ForwardCache& cache, const Eigen::MatrixXd& grad_q,
                        std::span<double> grad) const {
    if (grad.size() != param_count_ || params.size() != param_count_)
        throw std::invalid_argument("backward: parameter/gradient size mismatch");
    if (cache.dense_acts.size() != dense_.size() + 1)
        throw std::invalid_argument("backward: cache does not belong to a forward pass of this network");
    const Eigen::Index batch_size = grad_q.cols();
    if (grad_q.rows() != config_.action_count || cache.dense_acts.front().cols() != batch_size)
        throw std::invalid_argument("backward: upstream gradient shape mismatch");

    Eigen::MatrixXd g = grad_q;
    for (std::size_t i = dense_.size(); i-- > 0;) {
        const DenseLayer& d = dense_[i];
        const Eigen::MatrixXd& in = cache.dense_acts[i];
        const Eigen::MatrixXd& out = cache.dense_acts[i + 1];
        if (d.relu) g = g.cwiseProduct((out.array() > 0.0).cast<double>().matrix());
        const ParamBlock& wb = layout_[d.weight];
        const ParamBlock& bb = layout_[d.bias];
        RowMap gw(grad.data() + wb.offset, d.out, d.in);
        VecMap gb(grad.data() + bb.offset, d.out);
        gw.noalias() += g * in.transpose();
        gb += g.rowwise().sum();
        ConstRowMap w(params.data() + wb.offset, d.out, d.in);
        g = w.transpose() * g;
    }

    const int k = config_.kernel_size;
    RowMatrix col;
    for (Eigen::Index s = 0; s < batch_size; ++s) {
        Eigen::Index row = 0;
        for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
            const Branch& br = branches_[bi];
            const auto& acts = cache.conv_acts[bi][s];
            const ConvLayer& last = br.layers.back();
            const Eigen::Index last_hw = static_cast<Eigen::Index>(last.out_extent) * last.out_extent;
            RowMatrix dout = Eigen::Map<const RowMatrix>(g.col(s).data() + row, last.out_channels, last_hw);
            row += dout.size();

            for (std::size_t li = br.layers.size(); li-- > 0;) {
                const ConvLayer& l = br.layers[li];
                dout = dout.cwiseProduct((acts[li + 1].array() > 0.0).cast<double>().matrix());
                const Eigen::Index fan = static_cast<Eigen::Index>(l.in_channels) * k * k;
                const ParamBlock& wb = layout_[l.weight];
                const ParamBlock& bb = layout_[l.bias];
                im2col(acts[li], l.in_extent, k, col);
                RowMap gw(grad.data() + wb.offset, l.out_channels, fan);
                VecMap gb(grad.data() + bb.offset, l.out_channels);
                gw.noalias() += dout * col.transpose();
                gb += dout.rowwise().sum();
                if (li == 0) break;
                ConstRowMap w(params.data() + wb.offset, l.out_channels, fan);
                const RowMatrix dcol = w.transpose() * dout;
                RowMatrix din = RowMatrix::Zero(l.in_channels, static_cast<Eigen::Index>(l.in_extent) * l.in_extent);
                col2im_add(dcol, l.in_extent, k, din);
                dout = std::move(din);
            }
        }
    }
}

Action greedy_action(std::span<const double> q) {
    if (q.size() != kActionCount) throw std::invalid_argument("greedy_action: expected 6 Q-values");
    int best = 0;
    for (int a = 0; a < kActionCount; ++a) {
        if (!std::isfinite(q[a])) throw std::domain_error("greedy_action: non-finite Q-value");
        if (q[a] > q[best]) best = a;
    }
    return static_cast<Action>(best);
}

std::array<double, kActionCount> softmax_policy(std::span<const double> q, double temperature) {
    if (q.size() != kActionCount) throw std::invalid_argument("softmax_policy: expected 6 Q-values");
    if (!(temperature > 0.0)) throw std::invalid_argument("softmax_policy: temperature must be positive");
    double max_q = -std::numeric_limits<double>::infinity();
    for (double v : q) {
        if (!std::isfinite(v)) throw std::domain_error("softmax_policy: non-finite Q-value");
        max_q = std::max(max_q, v);
    }
    std::array<double, kActionCount> p{};
    double z = 0.0;
    for (int a = 0; a < kActionCount; ++a) {
        p[a] = std::exp((q[a] - max_q) / temperature);
        z += p[a];
    }
    for (double& v : p) v /= z;
    return p;
}

Action sample_action(const std::array<double, kActionCount>& probs, std::mt19937_64& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (int a = 0; a < kActionCount; ++a) {
        acc += probs[a];
        if (u < acc) return static_cast<Action>(a);
    }
    // Rounding left u above the final partial sum: take the last action with mass.
    for (int a = kActionCount; a-- > 0;)
        if (probs[a] > 0.0) return static_cast<Action>(a);
    return Action::Hover;
}

namespace {

constexpr const char* kCheckpointFormat = "uavsim-qnetwork";
constexpr int kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net, std::span<const double> params) {
    if (params.size() != net.parameter_count()) throw std::invalid_argument("save_checkpoint: parameter size mismatch");
    const NetworkConfig& c = net.config();
    Json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["map_size"] = net.map_size();
    j["observation"] = {{"local_size", net.spec().local_size}, {"global_scaling", net.spec().global_scaling}};
    j["network"] = {{"conv_layers", c.conv_layers},     {"kernels", c.kernels},
                    {"kernel_size", c.kernel_size},     {"hidden", c.hidden},
                    {"input_channels", c.input_channels}, {"flying_time_scale", c.flying_time_scale}};
    Json blocks = Json::array();
    for (const ParamBlock& b : net.layout()) {
        blocks.push_back({{"name", b.name},
                          {"shape", b.shape},
                          {"values", std::vector<double>(params.begin() + b.offset, params.begin() + b.offset + b.size)}});
    }
    j["blocks"] = std::move(blocks);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw CheckpointError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }

    Checkpoint ck;
    std::vector<double> params;
    try {
        if (j.at("format").get<std::string>() != kCheckpointFormat)
            throw CheckpointError("checkpoint " + path.string() + ": unknown format");
        if (j.at("version").get<int>() != kCheckpointVersion)
            throw CheckpointError("checkpoint " + path.string() + ": unsupported version");
        ck.map_size = j.at("map_size").get<int>();
        ck.spec.local_size = j.at("observation").at("local_size").get<int>();
        ck.spec.global_scaling = j.at("observation").at("global_scaling").get<int>();
        const Json& n = j.at("network");
        ck.network.conv_layers = n.at("conv_layers").get<int>();
        ck.network.kernels = n.at("kernels").get<int>();
        ck.network.kernel_size = n.at("kernel_size").get<int>();
        ck.network.hidden = n.at("hidden").get<std::vector<int>>();
        ck.network.input_channels = n.at("input_channels").get<int>();
        ck.network.flying_time_scale = n.at("flying_time_scale").get<double>();

        const QNetwork net(ck.network, ck.spec, ck.map_size);
        const Json& blocks = j.at("blocks");
        if (blocks.size() != net.layout().size())
            throw CheckpointError("checkpoint " + path.string() + ": shape mismatch, " + std::to_string(blocks.size()) +
                                  " parameter blocks, expected " + std::to_string(net.layout().size()));
        ck.params.assign(net.parameter_count(), 0.0);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const ParamBlock& expect = net.layout()[i];
            const auto name = blocks[i].at("name").get<std::string>();
            const auto shape = blocks[i].at("shape").get<std::vector<int>>();
            const auto values = blocks[i].at("values").get<std::vector<double>>();
            if (name != expect.name || shape != expect.shape || values.size() != expect.size)
                throw CheckpointError("checkpoint " + path.string() + ": shape mismatch in block '" + name +
                                      "' (expected '" + expect.name + "' with " + std::to_string(expect.size) +
                                      " values, got " + std::to_string(values.size()) + ")");
            std::copy(values.begin(), values.end(), ck.params.begin() + expect.offset);
        }
    } catch (const Json::exception& e) {
        throw CheckpointError("checkpoint " + path.string() + ": malformed field: " + e.what());
    } catch (const std::invalid_argument& e) {
        throw CheckpointError("checkpoint " + path.string() + ": inconsistent architecture: " + e.what());
    }
    return ck;
}

}  // namespace uavsim
