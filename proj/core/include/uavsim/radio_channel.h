#pragma once

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "uavsim/environment_map.h"

namespace uavsim {

/// Ground-level IoT sensor holding data to be harvested.
struct IoTDevice {
    Cell position;
    double data_remaining = 0.0;
    double data_initial = 0.0;
    int color_id = 0;
};

/// Log-distance path loss with Gaussian shadowing. Defaults give roughly one
/// data unit per step for a line-of-sight link at 50 m.
struct ChannelParams {
    double uav_altitude_m = 10.0;
    double los_exponent = 2.27;
    double nlos_exponent = 3.64;
    double shadowing_sigma_los_db = 2.0;
    double shadowing_sigma_nlos_db = 5.0;
    double reference_snr_db = 38.57;  // SNR at 1 m
    double step_time = 1.0;           // rate -> data units per step

    /// Throws std::invalid_argument if any field is non-finite or out of range.
    void validate() const;
};

using ChannelRng = std::mt19937_64;

/// Data units per step for the UAV hovering over `uav` talking to a device at
/// `device`. Draws one shadowing sample from `rng` when the relevant sigma is
/// non-zero.
double link_rate(const ChannelParams& params, const EnvironmentMap& env, Cell uav, Cell device,
                 ChannelRng& rng);

struct SlotResult {
    std::optional<std::size_t> device;
    double collected = 0.0;
};

/// Serves the single device with remaining data and the best rate this slot
/// (lowest index on ties) and drains min(rate, remaining) from it.
SlotResult communication_slot(std::span<IoTDevice> devices, const EnvironmentMap& env, Cell uav,
                              const ChannelParams& params, ChannelRng& rng);

}  // namespace uavsim
