#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dtsync/environment.hpp"
#include "dtsync/model.hpp"
#include "dtsync/schedulers.hpp"
#include "dtsync/types.hpp"

/// Episode driver and Monte Carlo aggregation. Every realization is seeded
/// independently (base_seed xor index), so execution order and thread count
/// never change any number.
namespace dtsync::sim {

/// Everything needed to run one scenario: scalar constants, geometry and
/// mobility configuration, and the device data-size ranges.
struct Scenario {
    SystemParams params;
    env::EnvConfig environment;
    env::ProfileRanges profile_ranges;
    std::optional<std::vector<int>> cyclic_order;  ///< default: device index order

    bool operator==(const Scenario&) const = default;
};

enum class PolicyKind { kOnline, kBenchmark, kBoundary, kStaticOptimal };

struct Policy {
    PolicyKind kind = PolicyKind::kOnline;
    double beta = 0.0;  ///< only read for kOnline

    bool operator==(const Policy&) const = default;

    static Policy online(double beta) { return Policy{PolicyKind::kOnline, beta}; }
    static Policy benchmark() { return Policy{PolicyKind::kBenchmark, 0.0}; }
    static Policy boundary() {
        return Policy{PolicyKind::kBoundary, std::numeric_limits<double>::infinity()};
    }
    static Policy static_optimal() { return Policy{PolicyKind::kStaticOptimal, 0.0}; }
};

inline const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::kOnline: return "online";
        case PolicyKind::kBenchmark: return "benchmark";
        case PolicyKind::kBoundary: return "boundary";
        case PolicyKind::kStaticOptimal: return "static_optimal";
    }
    return "?";
}

/// The threshold actually applied: the benchmark migrates every slot, the
/// boundary scheme never does.
inline double effective_beta(const Policy& policy) {
    switch (policy.kind) {
        case PolicyKind::kBenchmark: return 0.0;
        case PolicyKind::kBoundary: return std::numeric_limits<double>::infinity();
        default: return policy.beta;
    }
}

struct SlotRecord {
    int slot = 0;
    long long aoi_sum = 0;  ///< sum of device ages at the start of the slot
    double transmit_j = 0.0;
    double backhaul_j = 0.0;
    double migration_j = 0.0;
    bool migrated = false;

    double energy_total_j() const { return transmit_j + backhaul_j + migration_j; }
    bool operator==(const SlotRecord&) const = default;
};

struct Trace {
    std::vector<SlotRecord> slots;
    std::uint64_t seed = 0;
    std::string fingerprint;

    bool operator==(const Trace&) const = default;
};

/// Compact identity of (scenario, policy); aggregation refuses to pool
/// traces whose fingerprints differ.
inline std::string scenario_fingerprint(const Scenario& scenario, const Policy& policy) {
    const SystemParams& p = scenario.params;
    std::ostringstream out;
    out.precision(17);
    out << "M=" << p.num_servers << ";K=" << p.num_devices << ";T=" << p.horizon
        << ";G=" << p.max_aoi << ";Ts=" << p.slot_duration_s << ";B=" << p.bandwidth_hz
        << ";N0=" << p.noise_power_w << ";xi=" << p.aoi_weight << ";eta=" << p.backhaul_j_per_bit
        << ";lam=" << p.migration_j_per_bit << ";normA=" << p.aoi_norm
        << ";normE=" << p.energy_norm << ";side=" << scenario.environment.arena.side_m
        << ";static=" << scenario.environment.static_channel
        << ";policy=" << policy_name(policy.kind) << ";beta=" << effective_beta(policy);
    return out.str();
}

/// Optional per-slot observer, used by tests and the trace dumper to see the
/// full decision rather than the ledger sums.
using SlotObserver = std::function<void(int slot, const sched::SlotDecision&, const AoiVector&)>;

/// Runs one episode under the given policy. Ages start at 1, the initial
/// twin placement is a seeded uniform draw, and the AoI update is applied
/// after each slot's decision.
inline Trace run_episode(const Scenario& scenario, const Policy& policy, std::uint64_t seed,
                         const SlotObserver& observer = {}) {
    const SystemParams& base = scenario.params;
    base.validate();
    scenario.environment.validate();
    sched::require_feasible(base.num_devices, base.num_servers, base.max_aoi);

    SystemParams params = base;
    params.beta = effective_beta(policy);

    const std::vector<DeviceProfile> profiles =
        env::draw_profiles(params.num_devices, scenario.profile_ranges, seed);
    env::EpisodeStream stream(params.num_devices, params.num_servers, params.slot_duration_s,
                              scenario.environment, seed);

    Trace trace;
    trace.seed = seed;
    trace.fingerprint = scenario_fingerprint(scenario, policy);
    trace.slots.reserve(params.horizon);

    AoiVector aoi(params.num_devices, 1);
    const auto record = [&](int slot, const sched::SlotDecision& decision) {
        SlotRecord rec;
        rec.slot = slot;
        rec.aoi_sum = std::accumulate(aoi.begin(), aoi.end(), 0LL);
        rec.transmit_j = decision.energies.transmit_j;
        rec.backhaul_j = decision.energies.backhaul_j;
        rec.migration_j = decision.energies.migration_j;
        rec.migrated = decision.migrated;
        trace.slots.push_back(rec);
        if (observer) observer(slot, decision, aoi);
        std::set<int> scheduled;
        for (const auto& [device, server] : decision.association.pairs()) scheduled.insert(device);
        aoi = model::aoi_step(aoi, scheduled);
        stream.advance();
    };

    if (policy.kind == PolicyKind::kStaticOptimal) {
        if (!scenario.environment.static_channel) {
            throw InfeasibleError("static_optimal policy requires static_channel = true");
        }
        const sched::P2Solution plan = sched::solve_p2_static(stream, profiles, params);
        // Twins sit at the matched servers for the whole horizon.
        std::vector<int> hosts(params.num_devices, 0);
        for (int g = 0; g < params.max_aoi; ++g) {
            for (const auto& [device, server] : plan.schedule[g].pairs()) {
                hosts[device] = server;
            }
        }
        const Deployment static_hosts(std::move(hosts));
        for (int t = 0; t < params.horizon; ++t) {
            const int phase = t % params.max_aoi;
            sched::SlotDecision decision;
            decision.association = plan.schedule[phase];
            decision.powers = plan.powers[phase];
            decision.deployment = static_hosts;
            for (const auto& [device, server] : decision.association.pairs()) {
                decision.energies.transmit_j += model::min_transmit_energy(
                    profiles.at(device).sync_bits, stream.gain(device, server), params);
            }
            record(t, decision);
        }
        return trace;
    }

    const sched::CyclicPolicy cyclic =
        scenario.cyclic_order
            ? sched::build_cyclic_policy(params.num_devices, params.num_servers, params.max_aoi,
                                         *scenario.cyclic_order)
            : sched::build_cyclic_policy(params.num_devices, params.num_servers, params.max_aoi);

    sched::OnlineState state;
    state.deployment =
        env::draw_initial_deployment(params.num_devices, params.num_servers, seed);
    for (int t = 0; t < params.horizon; ++t) {
        auto [decision, next_state] =
            sched::online_step(state, cyclic.group_for_slot(t), stream, profiles, params, t);
        state = std::move(next_state);
        record(t, decision);
    }
    return trace;
}

struct Metrics {
    double avg_aoi = 0.0;      ///< slots, per device-slot
    double aoi_ci = 0.0;       ///< 95% normal-approximation half-width
    double avg_energy_j = 0.0; ///< joules per device-slot
    double energy_ci = 0.0;
    double avg_cost = 0.0;     ///< weighted objective of the pooled means
    double cost_ci = 0.0;
    int realizations = 0;
};

namespace detail {
inline std::pair<double, double> mean_and_half_width(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1));
    return {mean, 1.96 * sd / std::sqrt(static_cast<double>(n))};
}
}  // namespace detail

/// Pools per-realization means into scenario metrics.
inline Metrics aggregate(const std::vector<Trace>& traces, const SystemParams& params) {
    if (traces.empty()) {
        throw std::invalid_argument("aggregate: need at least one trace");
    }
    for (const Trace& t : traces) {
        if (t.fingerprint != traces.front().fingerprint) {
            throw std::invalid_argument("aggregate: traces come from different configurations");
        }
    }
    const double device_slots =
        static_cast<double>(params.num_devices) * static_cast<double>(params.horizon);
    std::vector<double> aoi_means, energy_means, cost_means;
    aoi_means.reserve(traces.size());
    energy_means.reserve(traces.size());
    cost_means.reserve(traces.size());
    for (const Trace& t : traces) {
        long long aoi_sum = 0;
        double energy_sum = 0.0;
        for (const SlotRecord& rec : t.slots) {
            aoi_sum += rec.aoi_sum;
            energy_sum += rec.energy_total_j();
        }
        const double aoi_mean = static_cast<double>(aoi_sum) / device_slots;
        const double energy_mean = energy_sum / device_slots;
        aoi_means.push_back(aoi_mean);
        energy_means.push_back(energy_mean);
        cost_means.push_back(model::weighted_cost(aoi_mean, energy_mean, params));
    }
    Metrics metrics;
    metrics.realizations = static_cast<int>(traces.size());
    std::tie(metrics.avg_aoi, metrics.aoi_ci) = detail::mean_and_half_width(aoi_means);
    std::tie(metrics.avg_energy_j, metrics.energy_ci) = detail::mean_and_half_width(energy_means);
    metrics.avg_cost = model::weighted_cost(metrics.avg_aoi, metrics.avg_energy_j, params);
    metrics.cost_ci = detail::mean_and_half_width(cost_means).second;
    return metrics;
}

/// Runs R independent realizations; realization i uses seed base_seed ^ i.
/// Results land in index order regardless of worker interleaving.
inline std::vector<Trace> run_realizations(const Scenario& scenario, const Policy& policy,
                                           int realizations, std::uint64_t base_seed,
                                           int threads = 1) {
    if (realizations < 1) {
        throw std::invalid_argument("run_realizations: need at least one realization");
    }
    std::vector<Trace> traces(realizations);
    const int workers = std::max(1, std::min(threads, realizations));
    if (workers == 1) {
        for (int i = 0; i < realizations; ++i) {
            traces[i] = run_episode(scenario, policy, base_seed ^ static_cast<std::uint64_t>(i));
        }
        return traces;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < realizations; i += workers) {
                traces[i] = run_episode(scenario, policy, base_seed ^ static_cast<std::uint64_t>(i));
            }
        });
    }
    for (std::thread& t : pool) t.join();
    return traces;
}

enum class SweepAxis { kServers, kMaxAoi, kBeta };

inline const char* sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::kServers: return "servers";
        case SweepAxis::kMaxAoi: return "max_aoi";
        case SweepAxis::kBeta: return "beta";
    }
    return "?";
}

/// Applies one swept value to a (scenario, policy) pair.
inline std::pair<Scenario, Policy> apply_sweep_value(const Scenario& base, const Policy& policy,
                                                     SweepAxis axis, double value) {
    Scenario scenario = base;
    Policy p = policy;
    switch (axis) {
        case SweepAxis::kServers:
        case SweepAxis::kMaxAoi: {
            const int iv = static_cast<int>(value);
            if (static_cast<double>(iv) != value || iv < 1) {
                throw std::invalid_argument("sweep: servers/max_aoi values must be positive integers");
            }
            if (axis == SweepAxis::kServers) {
                scenario.params.num_servers = iv;
            } else {
                scenario.params.max_aoi = iv;
            }
            break;
        }
        case SweepAxis::kBeta:
            if (!(value >= 0.0)) {
                throw std::invalid_argument("sweep: beta values must be nonnegative");
            }
            if (p.kind == PolicyKind::kOnline) p.beta = value;
            scenario.params.beta = value;
            break;
    }
    return {scenario, p};
}

struct SweepPoint {
    double value = 0.0;
    Metrics metrics;
};

/// One metrics row per swept value. Every configuration is checked for
/// feasibility up front, and all of them share the same realization seeds
/// (common random numbers) so trends are compared on paired draws.
inline std::vector<SweepPoint> sweep(const Scenario& base, const Policy& policy, SweepAxis axis,
                                     const std::vector<double>& values, int realizations,
                                     std::uint64_t base_seed, int threads = 1) {
    if (values.empty()) {
        throw std::invalid_argument("sweep: empty value list");
    }
    for (double v : values) {
        auto [scenario, p] = apply_sweep_value(base, policy, axis, v);
        scenario.params.validate();
        if (!model::feasibility_p1(scenario.params.num_devices, scenario.params.num_servers,
                                   scenario.params.max_aoi)) {
            std::ostringstream msg;
            msg << "sweep point " << sweep_axis_name(axis) << "=" << v
                << " is infeasible: K=" << scenario.params.num_devices
                << " exceeds M*Gamma=" << scenario.params.num_servers << "*"
                << scenario.params.max_aoi;
            throw InfeasibleError(msg.str());
        }
    }
    std::vector<SweepPoint> points;
    points.reserve(values.size());
    for (double v : values) {
        auto [scenario, p] = apply_sweep_value(base, policy, axis, v);
        const std::vector<Trace> traces =
            run_realizations(scenario, p, realizations, base_seed, threads);
        points.push_back(SweepPoint{v, aggregate(traces, scenario.params)});
    }
    return points;
}

}  // namespace dtsync::sim
