#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavsim/tensor.h"
#include "uavsim/world.h"

namespace uavsim {

/// Side length of a map after centering: 2M - 1.
constexpr int centered_size(int map_size) { return 2 * map_size - 1; }

/// Local crop size and global pooling factor. `local_size == 0` together with
/// `global_scaling == 1` disables global-local processing: the network then
/// sees the full centered map only.
struct ObservationSpec {
    int local_size = 17;
    int global_scaling = 3;

    bool local_enabled() const { return local_size > 0; }
    int global_extent(int map_size) const { return centered_size(map_size) / global_scaling; }

    /// Throws std::invalid_argument if the spec is not usable on an M x M map.
    void validate(int map_size) const;

    friend bool operator==(const ObservationSpec&, const ObservationSpec&) = default;
};

/// Pads the map so that `position` lands on the centre cell (M-1, M-1) of a
/// (2M-1) x (2M-1) tensor. Out-of-map cells take `pad` (one value per channel).
template <typename T>
Tensor3<T> center_map(const Tensor3<T>& map, Cell position, std::span<const T> pad) {
    const int m = map.height();
    if (map.width() != m) throw std::invalid_argument("center_map: map must be square");
    if (static_cast<int>(pad.size()) != map.channels())
        throw std::invalid_argument("center_map: pad length must equal channel count");
    if (position.row < 0 || position.col < 0 || position.row >= m || position.col >= m)
        throw std::out_of_range("center_map: position " + to_string(position) + " off map");

    const int mc = centered_size(m);
    Tensor3<T> out(map.channels(), mc, mc);
    const int off_r = position.row - m + 1;
    const int off_c = position.col - m + 1;
    for (int c = 0; c < map.channels(); ++c) {
        for (int i = 0; i < mc; ++i) {
            const int si = i + off_r;
            for (int j = 0; j < mc; ++j) {
                const int sj = j + off_c;
                out(c, i, j) = (si >= 0 && si < m && sj >= 0 && sj < m) ? map(c, si, sj) : pad[c];
            }
        }
    }
    return out;
}

/// Central l x l crop of a centered map.
template <typename T>
Tensor3<T> local_map(const Tensor3<T>& centered, int l) {
    const int mc = centered.height();
    if (l < 1 || l > mc) throw std::invalid_argument("local_map: size " + std::to_string(l) + " outside [1, " + std::to_string(mc) + "]");
    if (mc % 2 == 0) throw std::invalid_argument("local_map: centered map must have odd size");
    const int m = (mc + 1) / 2;
    const int off = m - (l + 1) / 2;  // M - ceil(l/2)
    Tensor3<T> out(centered.channels(), l, l);
    for (int c = 0; c < centered.channels(); ++c)
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j) out(c, i, j) = centered(c, i + off, j + off);
    return out;
}

/// g x g average pooling; trailing rows/columns that do not fill a whole
/// pooling cell are dropped.
template <typename T>
Tensor3<T> global_map(const Tensor3<T>& centered, int g) {
    if (g < 1) throw std::invalid_argument("global_map: scaling must be >= 1");
    const int n = centered.height() / g;
    Tensor3<T> out(centered.channels(), n, n);
    const T inv = T(1) / static_cast<T>(g * g);
    for (int c = 0; c < centered.channels(); ++c) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                T acc{};
                for (int u = 0; u < g; ++u)
                    for (int v = 0; v < g; ++v) acc += centered(c, g * i + u, g * j + v);
                out(c, i, j) = g == 1 ? acc : acc * inv;
            }
        }
    }
    return out;
}

/// Agent input: local and global stacks plus remaining flying time.
struct Observation {
    Tensor3<float> local_env;      // 3 x l x l (empty when the local map is disabled)
    Tensor3<float> local_target;   // 1 x l x l
    Tensor3<float> global_env;     // 3 x n x n with n = floor((2M-1)/g)
    Tensor3<float> global_target;  // 1 x n x n
    int flying_time = 0;
};

/// Environment layers are padded as NFZ + obstacle; the target is padded
/// with zero.
inline constexpr float kEnvPad[3] = {0.0f, 1.0f, 1.0f};

Observation assemble_observation(const EpisodeState& state, const ObservationSpec& spec);

/// Length of the flattened convolution outputs of both branches plus the
/// flying-time scalar. Every valid s_k x s_k convolution removes 2*floor(s_k/2)
/// cells per spatial dimension. Throws std::invalid_argument if a branch would
/// shrink to nothing.
int flatten_size(const ObservationSpec& spec, int map_size, int kernels, int conv_layers, int kernel_size);

}  // namespace uavsim
