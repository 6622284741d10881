#include "uavsim/map_pipeline.h"

namespace uavsim {

void ObservationSpec::validate(int map_size) const {
    const int mc = centered_size(map_size);
    if (global_scaling < 1) throw std::invalid_argument("global_scaling must be >= 1");
    if (global_scaling > mc)
        throw std::invalid_argument("global_scaling " + std::to_string(global_scaling) +
                                    " exceeds centered map size " + std::to_string(mc));
    if (local_size < 0) throw std::invalid_argument("local_size must be >= 0");
    if (local_size > 0 && local_size % 2 == 0)
        throw std::invalid_argument("local_size must be odd (got " + std::to_string(local_size) + ")");
    if (local_size > mc)
        throw std::invalid_argument("local_size " + std::to_string(local_size) +
                                    " exceeds centered map size " + std::to_string(mc));
}

Observation assemble_observation(const EpisodeState& state, const ObservationSpec& spec) {
    const EnvironmentMap& env = *state.env;
    const int m = env.size();
    spec.validate(m);

    Tensor3<float> target(1, m, m);
    for (std::size_t k = 0; k < state.target.values.size(); ++k)
        target.values()[k] = static_cast<float>(state.target.values[k]);

    const float target_pad[1] = {0.0f};
    const Tensor3<float> env_c = center_map<float>(env.layers(), state.position, kEnvPad);
    const Tensor3<float> tgt_c = center_map<float>(target, state.position, target_pad);

    Observation obs;
    if (spec.local_enabled()) {
        obs.local_env = local_map(env_c, spec.local_size);
        obs.local_target = local_map(tgt_c, spec.local_size);
    }
    obs.global_env = global_map(env_c, spec.global_scaling);
    obs.global_target = global_map(tgt_c, spec.global_scaling);
    obs.flying_time = state.battery;
    return obs;
}

int flatten_size(const ObservationSpec& spec, int map_size, int kernels, int conv_layers, int kernel_size) {
    spec.validate(map_size);
    if (kernels < 1 || conv_layers < 0 || kernel_size < 1)
        throw std::invalid_argument("flatten_size: invalid convolution parameters");
    const int shrink = 2 * conv_layers * (kernel_size / 2);

    auto branch = [&](int extent, const char* which) {
        const int out = extent - shrink;
        if (out <= 0)
            throw std::invalid_argument(std::string("flatten_size: ") + which + " branch of size " +
                                        std::to_string(extent) + " vanishes after convolution");
        return out * out;
    };

    int spatial = branch(spec.global_extent(map_size), "global");
    if (spec.local_enabled()) spatial += branch(spec.local_size, "local");
    return kernels * spatial + 1;
}

}  // namespace uavsim
