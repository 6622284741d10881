#include "uavsim/radio_channel.h"

#include <cmath>
#include <stdexcept>

namespace uavsim {

void ChannelParams::validate() const {
    const double all[] = {uav_altitude_m, los_exponent, nlos_exponent, shadowing_sigma_los_db,
                          shadowing_sigma_nlos_db, reference_snr_db, step_time};
    for (double v : all) {
        if (!std::isfinite(v)) throw std::invalid_argument("channel parameters must be finite");
    }
    if (los_exponent <= 0.0 || nlos_exponent <= 0.0)
        throw std::invalid_argument("path loss exponents must be positive");
    if (shadowing_sigma_los_db < 0.0 || shadowing_sigma_nlos_db < 0.0)
        throw std::invalid_argument("shadowing sigmas must be non-negative");
    if (uav_altitude_m < 0.0 || step_time <= 0.0)
        throw std::invalid_argument("altitude must be non-negative and step_time positive");
}

double link_rate(const ChannelParams& params, const EnvironmentMap& env, Cell uav, Cell device,
                 ChannelRng& rng) {
    params.validate();
    if (!env.on_map(device) || !env.on_map(uav)) throw std::out_of_range("link_rate: cell off map");

    const double c = env.cell_size_m();
    const double dx = c * (device.col - uav.col);
    const double dy = c * (device.row - uav.row);
    const double h = params.uav_altitude_m;
    // Clamp at the 1 m reference distance.
    const double d = std::max(1.0, std::sqrt(dx * dx + dy * dy + h * h));

    const bool los = line_of_sight(env, uav, device);
    const double alpha = los ? params.los_exponent : params.nlos_exponent;
    const double sigma = los ? params.shadowing_sigma_los_db : params.shadowing_sigma_nlos_db;

    double snr_db = params.reference_snr_db - 10.0 * alpha * std::log10(d);
    if (sigma > 0.0) snr_db += std::normal_distribution<double>(0.0, sigma)(rng);

    return params.step_time * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

SlotResult communication_slot(std::span<IoTDevice> devices, const EnvironmentMap& env, Cell uav,
                              const ChannelParams& params, ChannelRng& rng) {
    SlotResult result;
    double best_rate = -1.0;
    for (std::size_t k = 0; k < devices.size(); ++k) {
        if (devices[k].data_remaining <= 0.0) continue;
        const double rate = link_rate(params, env, uav, devices[k].position, rng);
        if (rate > best_rate) {
            best_rate = rate;
            result.device = k;
        }
    }
    if (!result.device) return result;

    IoTDevice& dev = devices[*result.device];
    if (best_rate >= dev.data_remaining) {
        result.collected = dev.data_remaining;
        dev.data_remaining = 0.0;
    } else {
        result.collected = best_rate;
        dev.data_remaining -= best_rate;
    }
    return result;
}

}  // namespace uavsim
