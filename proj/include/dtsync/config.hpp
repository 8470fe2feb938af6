#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtsync/environment.hpp"
#include "dtsync/simulator.hpp"
#include "dtsync/types.hpp"

/// Flat `key = value` run configuration. Numeric values are written back
/// with 17 significant digits, so parse -> serialize -> parse is the
/// identity on every field.
namespace dtsync::config {

/// Malformed or invalid configuration content.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem trouble (missing file, unwritable path).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    sim::Scenario scenario;
    double noise_psd_dbm_per_hz = -174.0;  ///< scenario noise power is derived from this
    int realizations = 1;
    std::uint64_t base_seed = 1;
    std::vector<sim::Policy> policies{sim::Policy::online(0.5)};
    std::string output = "results.csv";

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: key '" + key + "' must be true or false, got '" + value + "'");
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<sim::Policy> parse_policies(const std::string& value, double default_beta) {
    std::vector<sim::Policy> policies;
    std::stringstream ss(value);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        if (token.empty()) continue;
        if (token == "benchmark") {
            policies.push_back(sim::Policy::benchmark());
        } else if (token == "boundary") {
            policies.push_back(sim::Policy::boundary());
        } else if (token == "static_optimal") {
            policies.push_back(sim::Policy::static_optimal());
        } else if (token == "online") {
            policies.push_back(sim::Policy::online(default_beta));
        } else if (token.rfind("online:", 0) == 0) {
            const double beta = parse_double("policies", token.substr(7));
            if (!(beta >= 0.0)) {
                throw ConfigError("config: online policy threshold must be nonnegative");
            }
            policies.push_back(sim::Policy::online(beta));
        } else {
            throw ConfigError("config: unknown policy '" + token + "'");
        }
    }
    if (policies.empty()) {
        throw ConfigError("config: policy list is empty");
    }
    return policies;
}

inline std::string format_policies(const std::vector<sim::Policy>& policies) {
    std::string out;
    for (const sim::Policy& p : policies) {
        if (!out.empty()) out += ",";
        if (p.kind == sim::PolicyKind::kOnline) {
            out += "online:" + format_double(p.beta);
        } else {
            out += sim::policy_name(p.kind);
        }
    }
    return out;
}

}  // namespace detail

inline void validate(const RunConfig& cfg);

/// Parses a configuration stream. Unknown keys are rejected; omitted keys
/// keep their defaults. `#` starts a comment.
inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    SystemParams& p = cfg.scenario.params;
    env::EnvConfig& e = cfg.scenario.environment;
    env::ProfileRanges& r = cfg.scenario.profile_ranges;

    std::string policies_raw;
    std::string line;
    int line_no = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        }
        if (++seen[key] > 1) {
            throw ConfigError("config: duplicate key '" + key + "'");
        }

        if (key == "num_servers") p.num_servers = static_cast<int>(detail::parse_int(key, value));
        else if (key == "num_devices") p.num_devices = static_cast<int>(detail::parse_int(key, value));
        else if (key == "horizon_slots") p.horizon = static_cast<int>(detail::parse_int(key, value));
        else if (key == "max_aoi_slots") p.max_aoi = static_cast<int>(detail::parse_int(key, value));
        else if (key == "slot_duration_s") p.slot_duration_s = detail::parse_double(key, value);
        else if (key == "bandwidth_hz") p.bandwidth_hz = detail::parse_double(key, value);
        else if (key == "noise_psd_dbm_per_hz") cfg.noise_psd_dbm_per_hz = detail::parse_double(key, value);
        else if (key == "xi") p.aoi_weight = detail::parse_double(key, value);
        else if (key == "eta_j_per_bit") p.backhaul_j_per_bit = detail::parse_double(key, value);
        else if (key == "lambda_j_per_bit") p.migration_j_per_bit = detail::parse_double(key, value);
        else if (key == "beta") p.beta = detail::parse_double(key, value);
        else if (key == "aoi_norm") p.aoi_norm = detail::parse_double(key, value);
        else if (key == "energy_norm") p.energy_norm = detail::parse_double(key, value);
        else if (key == "max_power_w") p.max_power_w = detail::parse_double(key, value);
        else if (key == "arena_side_m") e.arena.side_m = detail::parse_double(key, value);
        else if (key == "min_distance_m") e.arena.min_distance_m = detail::parse_double(key, value);
        else if (key == "speed_min_mps") e.speed_min_mps = detail::parse_double(key, value);
        else if (key == "speed_max_mps") e.speed_max_mps = detail::parse_double(key, value);
        else if (key == "static_channel") e.static_channel = detail::parse_bool(key, value);
        else if (key == "sync_size_min_mb") r.sync_min_mb = detail::parse_double(key, value);
        else if (key == "sync_size_max_mb") r.sync_max_mb = detail::parse_double(key, value);
        else if (key == "twin_size_min_mb") r.twin_min_mb = detail::parse_double(key, value);
        else if (key == "twin_size_max_mb") r.twin_max_mb = detail::parse_double(key, value);
        else if (key == "realizations") cfg.realizations = static_cast<int>(detail::parse_int(key, value));
        else if (key == "base_seed") cfg.base_seed = detail::parse_u64(key, value);
        else if (key == "policies") policies_raw = value;
        else if (key == "output") cfg.output = value;
        else throw ConfigError("config: unknown key '" + key + "'");
    }

    p.noise_power_w = env::noise_power_w(cfg.noise_psd_dbm_per_hz, p.bandwidth_hz);
    if (!policies_raw.empty()) {
        cfg.policies = detail::parse_policies(policies_raw, p.beta);
    }
    validate(cfg);
    return cfg;
}

inline void validate(const RunConfig& cfg) {
    cfg.scenario.params.validate();
    cfg.scenario.environment.validate();
    cfg.scenario.profile_ranges.validate();
    if (cfg.realizations < 1) {
        throw ConfigError("config: realizations must be at least 1");
    }
    if (cfg.policies.empty()) {
        throw ConfigError("config: policy list is empty");
    }
    if (cfg.output.empty()) {
        throw ConfigError("config: output path is empty");
    }
}

/// Writes the configuration with every key explicit, in a fixed order.
inline std::string serialize_config(const RunConfig& cfg) {
    const SystemParams& p = cfg.scenario.params;
    const env::EnvConfig& e = cfg.scenario.environment;
    const env::ProfileRanges& r = cfg.scenario.profile_ranges;
    std::ostringstream out;
    const auto num = [&](const char* key, double v) {
        out << key << " = " << detail::format_double(v) << "\n";
    };
    out << "num_servers = " << p.num_servers << "\n";
    out << "num_devices = " << p.num_devices << "\n";
    out << "horizon_slots = " << p.horizon << "\n";
    out << "max_aoi_slots = " << p.max_aoi << "\n";
    num("slot_duration_s", p.slot_duration_s);
    num("bandwidth_hz", p.bandwidth_hz);
    num("noise_psd_dbm_per_hz", cfg.noise_psd_dbm_per_hz);
    num("xi", p.aoi_weight);
    num("eta_j_per_bit", p.backhaul_j_per_bit);
    num("lambda_j_per_bit", p.migration_j_per_bit);
    num("beta", p.beta);
    num("aoi_norm", p.aoi_norm);
    num("energy_norm", p.energy_norm);
    num("max_power_w", p.max_power_w);
    num("arena_side_m", e.arena.side_m);
    num("min_distance_m", e.arena.min_distance_m);
    num("speed_min_mps", e.speed_min_mps);
    num("speed_max_mps", e.speed_max_mps);
    out << "static_channel = " << (e.static_channel ? "true" : "false") << "\n";
    num("sync_size_min_mb", r.sync_min_mb);
    num("sync_size_max_mb", r.sync_max_mb);
    num("twin_size_min_mb", r.twin_min_mb);
    num("twin_size_max_mb", r.twin_max_mb);
    out << "realizations = " << cfg.realizations << "\n";
    out << "base_seed = " << cfg.base_seed << "\n";
    out << "policies = " << detail::format_policies(cfg.policies) << "\n";
    out << "output = " << cfg.output << "\n";
    return out.str();
}

inline RunConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    return parse_config(in);
}

}  // namespace dtsync::config
