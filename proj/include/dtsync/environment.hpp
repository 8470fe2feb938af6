#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dtsync/rng.hpp"
#include "dtsync/types.hpp"

/// Scenario geometry, mobility and channel generation. Every random draw is
/// counter-based (addressed by slot/device/server index within a derived
/// stream), so values never depend on generation order: lazily generated
/// rows are bit-identical to bulk snapshots, and adding servers or slots
/// never perturbs the draws of existing ones.
namespace dtsync::env {

inline constexpr double kBitsPerMb = 8.0e6;  ///< decimal megabyte

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Vec2&) const = default;
};

inline double distance_m(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Square deployment region with a path-loss distance floor.
struct Arena {
    double side_m = 1000.0;
    double min_distance_m = 1.0;

    void validate() const {
        if (!(side_m > 0.0) || !(min_distance_m > 0.0)) {
            throw std::invalid_argument("Arena: side and min distance must be positive");
        }
    }
    bool contains(const Vec2& p) const {
        return p.x >= 0.0 && p.x <= side_m && p.y >= 0.0 && p.y <= side_m;
    }

    bool operator==(const Arena&) const = default;
};

struct MobilityDraw {
    double speed_mps = 0.0;
    double direction_rad = 0.0;
};

/// Distance-dependent loss 128.1 + 37.6 log10(d_km), clamped at the floor
/// distance to keep d -> 0 out of the logarithm.
inline double path_loss_db(double distance, double min_distance_m = 1.0) {
    const double d = distance < min_distance_m ? min_distance_m : distance;
    return 128.1 + 37.6 * std::log10(d / 1000.0);
}

/// Linear channel power gain from path loss and a small-scale fading power
/// (exponential with unit mean for Rayleigh amplitude fading).
inline double channel_gain(double pl_db, double fading_power) {
    return std::pow(10.0, -pl_db / 10.0) * fading_power;
}

/// Noise power in watts from a spectral density in dBm/Hz over bandwidth B.
inline double noise_power_w(double psd_dbm_per_hz, double bandwidth_hz) {
    return std::pow(10.0, (psd_dbm_per_hz - 30.0) / 10.0) * bandwidth_hz;
}

/// One slot of movement, reflected at the arena boundary.
inline Vec2 mobility_step(const Vec2& pos, const MobilityDraw& draw, double slot_duration_s,
                          const Arena& arena) {
    const double step = draw.speed_mps * slot_duration_s;
    Vec2 next{pos.x + step * std::cos(draw.direction_rad),
              pos.y + step * std::sin(draw.direction_rad)};
    auto reflect = [&](double v) {
        while (v < 0.0 || v > arena.side_m) {
            if (v < 0.0) v = -v;
            if (v > arena.side_m) v = 2.0 * arena.side_m - v;
        }
        return v;
    };
    next.x = reflect(next.x);
    next.y = reflect(next.y);
    return next;
}

/// Fixed server sites plus the device positions of one slot.
struct Topology {
    std::vector<Vec2> server_positions;
    std::vector<Vec2> device_positions;
};

/// K x M channel power gain matrix of one slot, row-major by device.
struct ChannelSnapshot {
    int slot = 0;
    int num_devices = 0;
    int num_servers = 0;
    std::vector<double> gains;

    double gain(int device, int server) const {
        return gains[static_cast<std::size_t>(device) * num_servers + server];
    }
    bool operator==(const ChannelSnapshot&) const = default;
};

struct EnvConfig {
    Arena arena;
    double speed_min_mps = 2.0;
    double speed_max_mps = 8.0;
    bool static_channel = false;

    void validate() const {
        arena.validate();
        if (!(speed_min_mps >= 0.0) || speed_max_mps < speed_min_mps) {
            throw std::invalid_argument("EnvConfig: bad speed range");
        }
    }

    bool operator==(const EnvConfig&) const = default;
};

namespace stream_id {
inline constexpr std::uint64_t kServers = 1;
inline constexpr std::uint64_t kDevices = 2;
inline constexpr std::uint64_t kMobility = 3;
inline constexpr std::uint64_t kFading = 4;
inline constexpr std::uint64_t kProfiles = 5;
inline constexpr std::uint64_t kDeployment = 6;
}  // namespace stream_id

/// Slot-by-slot episode generator. Positions advance sequentially; gains are
/// evaluated on demand for whichever links a consumer asks about.
class EpisodeStream {
public:
    EpisodeStream(int num_devices, int num_servers, double slot_duration_s,
                  const EnvConfig& config, std::uint64_t seed)
        : num_devices_(num_devices),
          num_servers_(num_servers),
          slot_duration_s_(slot_duration_s),
          config_(config),
          fading_seed_(rng::derive(seed, stream_id::kFading)),
          mobility_seed_(rng::derive(seed, stream_id::kMobility)) {
        config_.validate();
        if (num_devices < 1 || num_servers < 1) {
            throw std::invalid_argument("EpisodeStream: need at least one device and server");
        }
        const double side = config_.arena.side_m;
        const std::uint64_t server_seed = rng::derive(seed, stream_id::kServers);
        servers_.reserve(num_servers);
        for (int m = 0; m < num_servers; ++m) {
            servers_.push_back(Vec2{rng::to_uniform(rng::at2(server_seed, m, 0), 0.0, side),
                                    rng::to_uniform(rng::at2(server_seed, m, 1), 0.0, side)});
        }
        const std::uint64_t device_seed = rng::derive(seed, stream_id::kDevices);
        devices_.reserve(num_devices);
        for (int k = 0; k < num_devices; ++k) {
            devices_.push_back(Vec2{rng::to_uniform(rng::at2(device_seed, k, 0), 0.0, side),
                                    rng::to_uniform(rng::at2(device_seed, k, 1), 0.0, side)});
        }
    }

    int slot() const { return slot_; }
    const std::vector<Vec2>& server_positions() const { return servers_; }
    const std::vector<Vec2>& device_positions() const { return devices_; }

    /// Moves to the next slot. Under a static channel both positions and
    /// fading stay frozen at their slot-0 values.
    void advance() {
        if (!config_.static_channel) {
            for (int k = 0; k < num_devices_; ++k) {
                devices_[k] = mobility_step(devices_[k], mobility_draw(slot_, k),
                                            slot_duration_s_, config_.arena);
            }
        }
        ++slot_;
    }

    MobilityDraw mobility_draw(int slot, int device) const {
        return MobilityDraw{
            rng::to_uniform(rng::at3(mobility_seed_, slot, device, 0), config_.speed_min_mps,
                            config_.speed_max_mps),
            rng::to_uniform(rng::at3(mobility_seed_, slot, device, 1), 0.0,
                            2.0 * std::numbers::pi)};
    }

    double gain(int device, int server) const {
        const int fading_slot = config_.static_channel ? 0 : slot_;
        const double pl = path_loss_db(distance_m(devices_[device], servers_[server]),
                                       config_.arena.min_distance_m);
        const double fading =
            rng::to_exponential(rng::at3(fading_seed_, fading_slot, device, server));
        return channel_gain(pl, fading);
    }

    void fill_gain_row(int device, std::vector<double>& out) const {
        out.resize(num_servers_);
        for (int m = 0; m < num_servers_; ++m) out[m] = gain(device, m);
    }

    ChannelSnapshot snapshot() const {
        ChannelSnapshot snap{slot_, num_devices_, num_servers_, {}};
        snap.gains.resize(static_cast<std::size_t>(num_devices_) * num_servers_);
        for (int k = 0; k < num_devices_; ++k) {
            for (int m = 0; m < num_servers_; ++m) {
                snap.gains[static_cast<std::size_t>(k) * num_servers_ + m] = gain(k, m);
            }
        }
        return snap;
    }

private:
    int num_devices_;
    int num_servers_;
    double slot_duration_s_;
    EnvConfig config_;
    std::uint64_t fading_seed_;
    std::uint64_t mobility_seed_;
    std::vector<Vec2> servers_;
    std::vector<Vec2> devices_;
    int slot_ = 0;
};

/// Fully materialized episode, mainly for dumps and verification.
struct Episode {
    std::vector<Vec2> server_positions;
    std::vector<std::vector<Vec2>> device_positions;  ///< per slot
    std::vector<ChannelSnapshot> snapshots;           ///< per slot
};

inline Episode generate_episode(int num_devices, int num_servers, int horizon,
                                double slot_duration_s, const EnvConfig& config,
                                std::uint64_t seed) {
    EpisodeStream stream(num_devices, num_servers, slot_duration_s, config, seed);
    Episode episode;
    episode.server_positions = stream.server_positions();
    episode.device_positions.reserve(horizon);
    episode.snapshots.reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
        episode.device_positions.push_back(stream.device_positions());
        episode.snapshots.push_back(stream.snapshot());
        stream.advance();
    }
    return episode;
}

/// Data-size ranges in decimal megabytes; converted to bits on draw.
struct ProfileRanges {
    double sync_min_mb = 2.0;
    double sync_max_mb = 5.0;
    double twin_min_mb = 5.0;
    double twin_max_mb = 50.0;

    void validate() const {
        if (!(sync_min_mb > 0.0) || sync_max_mb < sync_min_mb || !(twin_min_mb > 0.0) ||
            twin_max_mb < twin_min_mb) {
            throw std::invalid_argument("ProfileRanges: bad data size range");
        }
    }

    bool operator==(const ProfileRanges&) const = default;
};

inline std::vector<DeviceProfile> draw_profiles(int num_devices, const ProfileRanges& ranges,
                                                std::uint64_t seed) {
    ranges.validate();
    const std::uint64_t s = rng::derive(seed, stream_id::kProfiles);
    std::vector<DeviceProfile> profiles(num_devices);
    for (int k = 0; k < num_devices; ++k) {
        profiles[k].sync_bits =
            rng::to_uniform(rng::at2(s, k, 0), ranges.sync_min_mb, ranges.sync_max_mb) * kBitsPerMb;
        profiles[k].twin_bits =
            rng::to_uniform(rng::at2(s, k, 1), ranges.twin_min_mb, ranges.twin_max_mb) * kBitsPerMb;
    }
    return profiles;
}

/// Uniformly random initial twin placement.
inline Deployment draw_initial_deployment(int num_devices, int num_servers, std::uint64_t seed) {
    const std::uint64_t s = rng::derive(seed, stream_id::kDeployment);
    std::vector<int> hosts(num_devices);
    for (int k = 0; k < num_devices; ++k) {
        hosts[k] = static_cast<int>(rng::to_index(rng::at(s, k), num_servers));
    }
    return Deployment(std::move(hosts));
}

/// Plain-text episode record, one block per slot, for replay and
/// cross-checking against other implementations.
inline void dump_episode(std::ostream& out, const Episode& episode) {
    out.precision(17);
    out << "servers " << episode.server_positions.size() << "\n";
    for (const Vec2& p : episode.server_positions) out << p.x << " " << p.y << "\n";
    out << "slots " << episode.snapshots.size() << "\n";
    for (std::size_t t = 0; t < episode.snapshots.size(); ++t) {
        const ChannelSnapshot& snap = episode.snapshots[t];
        out << "slot " << snap.slot << "\n";
        for (const Vec2& p : episode.device_positions[t]) out << p.x << " " << p.y << "\n";
        for (int k = 0; k < snap.num_devices; ++k) {
            for (int m = 0; m < snap.num_servers; ++m) {
                out << snap.gain(k, m) << (m + 1 == snap.num_servers ? "\n" : " ");
            }
        }
    }
}

}  // namespace dtsync::env
