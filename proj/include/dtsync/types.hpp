#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtsync {

/// Raised when a configuration violates a hard feasibility condition
/// (e.g. more devices than the schedule can serve within the AoI deadline).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// All scalar constants of one scenario. Units are carried in the field
/// names; data sizes are always bits, energies joules, durations seconds.
struct SystemParams {
    int num_servers = 1;                ///< M
    int num_devices = 1;                ///< K
    int horizon = 1;                    ///< T, slots
    int max_aoi = 1;                    ///< Gamma, slots
    double slot_duration_s = 0.05;      ///< Ts
    double bandwidth_hz = 1.0e7;        ///< B
    double noise_power_w = 3.9810717055349695e-14;  ///< sigma^2 (-174 dBm/Hz over 10 MHz)
    double aoi_weight = 0.1;            ///< xi in [0,1]
    double backhaul_j_per_bit = 1.0e-8; ///< eta
    double migration_j_per_bit = 1.0e-8;///< lambda
    double beta = 0.0;                  ///< migration threshold; +inf = never migrate
    double aoi_norm = 1.0;              ///< cost normalization divisor for AoI
    double energy_norm = 1.0;           ///< cost normalization divisor for energy
    double max_power_w = std::numeric_limits<double>::infinity();  ///< optional cap, unbounded by default

    void validate() const {
        if (num_servers < 1 || num_devices < 1 || horizon < 1) {
            throw std::invalid_argument("SystemParams: M, K, T must be positive");
        }
        if (max_aoi < 1) {
            throw std::invalid_argument("SystemParams: max_aoi must be >= 1");
        }
        if (!(slot_duration_s > 0.0) || !(bandwidth_hz > 0.0) || !(noise_power_w > 0.0)) {
            throw std::invalid_argument("SystemParams: Ts, B, noise power must be positive");
        }
        if (!(aoi_weight >= 0.0 && aoi_weight <= 1.0)) {
            throw std::invalid_argument("SystemParams: aoi_weight must lie in [0,1]");
        }
        if (backhaul_j_per_bit < 0.0 || migration_j_per_bit < 0.0) {
            throw std::invalid_argument("SystemParams: per-bit costs must be nonnegative");
        }
        if (beta < 0.0) {
            throw std::invalid_argument("SystemParams: beta must be nonnegative");
        }
        if (!(aoi_norm > 0.0) || !(energy_norm > 0.0)) {
            throw std::invalid_argument("SystemParams: normalization divisors must be positive");
        }
    }

    bool operator==(const SystemParams&) const = default;
};

/// Per-device data sizes.
struct DeviceProfile {
    double sync_bits = 0.0;  ///< D_k, uplinked on every synchronization
    double twin_bits = 0.0;  ///< D-tilde_k, moved on every twin migration
};

/// One slot's edge association: a partial map device -> server where no two
/// devices share a server.
class Association {
public:
    void assign(int device, int server) {
        if (device_to_server_.count(device) != 0) {
            throw std::invalid_argument("Association: device already scheduled");
        }
        if (!used_servers_.insert(server).second) {
            throw std::invalid_argument("Association: server already serving another device");
        }
        device_to_server_.emplace(device, server);
    }

    std::optional<int> server_of(int device) const {
        auto it = device_to_server_.find(device);
        if (it == device_to_server_.end()) return std::nullopt;
        return it->second;
    }

    bool scheduled(int device) const { return device_to_server_.count(device) != 0; }
    std::size_t size() const { return device_to_server_.size(); }

    /// Ordered by device index.
    const std::map<int, int>& pairs() const { return device_to_server_; }

    bool operator==(const Association&) const = default;

private:
    std::map<int, int> device_to_server_;
    std::set<int> used_servers_;
};

/// One slot's twin deployment: a total map device -> hosting server.
class Deployment {
public:
    Deployment() = default;
    explicit Deployment(std::vector<int> host_of) : host_of_(std::move(host_of)) {}
    Deployment(int num_devices, int initial_server) : host_of_(num_devices, initial_server) {}

    int host_of(int device) const { return host_of_.at(device); }
    void set_host(int device, int server) { host_of_.at(device) = server; }
    int size() const { return static_cast<int>(host_of_.size()); }
    const std::vector<int>& hosts() const { return host_of_; }

    void validate(int num_servers) const {
        for (int s : host_of_) {
            if (s < 0 || s >= num_servers) {
                throw std::invalid_argument("Deployment: host index out of range");
            }
        }
    }

    bool operator==(const Deployment&) const = default;

private:
    std::vector<int> host_of_;
};

/// Per-device age, in slots. Ages are always >= 1.
using AoiVector = std::vector<int>;

/// Transmit power per scheduled device, watts.
using PowerAllocation = std::map<int, double>;

/// The three energy components of one slot, joules.
struct SlotEnergy {
    double transmit_j = 0.0;
    double backhaul_j = 0.0;
    double migration_j = 0.0;

    double total() const { return transmit_j + backhaul_j + migration_j; }
    bool operator==(const SlotEnergy&) const = default;
};

}  // namespace dtsync
