#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "dtsync/types.hpp"

/// Closed-form physics and cost formulas of the synchronization model.
/// Everything here is a pure function of its arguments; all randomness
/// lives in the environment module.
namespace dtsync::model {

/// Shannon rate of one uplink, bits/s. The logarithm is base 2; the
/// minimum-power expression below is only consistent with that base.
inline double transmit_rate(double gain, double power_w, const SystemParams& p) {
    if (!(gain > 0.0)) {
        throw std::domain_error("transmit_rate: channel gain must be positive");
    }
    if (power_w < 0.0) {
        throw std::domain_error("transmit_rate: power must be nonnegative");
    }
    return p.bandwidth_hz * std::log2(1.0 + gain * power_w / p.noise_power_w);
}

/// Smallest transmit power that fits `bits` into one slot:
///   p* = sigma^2 * (2^(D / (B*Ts)) - 1) / h.
/// At p* the transmission occupies the slot exactly (D / R(p*) = Ts).
inline double min_power(double bits, double gain, const SystemParams& p) {
    if (!(gain > 0.0)) {
        throw std::domain_error("min_power: channel gain must be positive (unreachable device)");
    }
    if (!(bits > 0.0)) {
        throw std::domain_error("min_power: data size must be positive");
    }
    const double exponent = bits / (p.bandwidth_hz * p.slot_duration_s);
    return p.noise_power_w * (std::exp2(exponent) - 1.0) / gain;
}

/// Energy of a full-slot transmission at the minimum feasible power,
/// Ts * p*. Transmit energy grows monotonically in p, so this is the
/// cheapest way to deliver `bits` within the slot.
inline double min_transmit_energy(double bits, double gain, const SystemParams& p) {
    return p.slot_duration_s * min_power(bits, gain, p);
}

/// Backhaul energy of one slot: eta * D_k for every scheduled device whose
/// serving edge server is not the server hosting its twin.
inline double backhaul_energy(const Association& assoc, const Deployment& deploy,
                              const std::vector<DeviceProfile>& profiles,
                              const SystemParams& p) {
    double total = 0.0;
    for (const auto& [device, server] : assoc.pairs()) {
        if (server != deploy.host_of(device)) {
            total += p.backhaul_j_per_bit * profiles.at(device).sync_bits;
        }
    }
    return total;
}

/// Migration energy of one slot: lambda * Dtilde_k for every device whose
/// hosting server changed since the previous slot.
inline double migration_energy(const Deployment& current, const Deployment& previous,
                               const std::vector<DeviceProfile>& profiles,
                               const SystemParams& p) {
    if (current.size() != previous.size()) {
        throw std::invalid_argument("migration_energy: deployments cover different device sets");
    }
    double total = 0.0;
    for (int k = 0; k < current.size(); ++k) {
        if (current.host_of(k) != previous.host_of(k)) {
            total += p.migration_j_per_bit * profiles.at(k).twin_bits;
        }
    }
    return total;
}

/// Advances every device's age by one slot: reset to 1 for devices that
/// synchronized, +1 for everyone else.
inline AoiVector aoi_step(const AoiVector& aoi, const std::set<int>& scheduled) {
    AoiVector next(aoi.size());
    for (std::size_t k = 0; k < aoi.size(); ++k) {
        next[k] = scheduled.count(static_cast<int>(k)) != 0 ? 1 : aoi[k] + 1;
    }
    return next;
}

/// The scalar objective: xi * (aoi / aoi_norm) + (1 - xi) * (energy / energy_norm).
inline double weighted_cost(double avg_aoi, double avg_energy_j, const SystemParams& p) {
    return p.aoi_weight * (avg_aoi / p.aoi_norm) +
           (1.0 - p.aoi_weight) * (avg_energy_j / p.energy_norm);
}

/// Whether any schedule can keep every age within max_aoi: K <= M * Gamma.
inline bool feasibility_p1(int num_devices, int num_servers, int max_aoi) {
    return static_cast<long long>(num_devices) <=
           static_cast<long long>(num_servers) * static_cast<long long>(max_aoi);
}

}  // namespace dtsync::model
