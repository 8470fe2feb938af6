#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dtsync/matching.hpp"
#include "dtsync/model.hpp"
#include "dtsync/types.hpp"

/// Decision procedures: the cyclic scheduling policy, the static-channel
/// optimal solver, the two one-shot matchers (migrate-with-association vs.
/// keep-deployment), and the online threshold step that arbitrates between
/// them.
namespace dtsync::sched {

/// Anything that can report a per-link channel power gain for the current slot.
template <typename C>
concept ChannelLike = requires(const C& c, int device, int server) {
    { c.gain(device, server) } -> std::convertible_to<double>;
};

inline void require_feasible(int num_devices, int num_servers, int max_aoi) {
    if (!model::feasibility_p1(num_devices, num_servers, max_aoi)) {
        std::ostringstream msg;
        msg << "infeasible configuration: K=" << num_devices << " exceeds M*Gamma=" << num_servers
            << "*" << max_aoi << "=" << static_cast<long long>(num_servers) * max_aoi
            << " (every device must be scheduled at least once per Gamma slots,"
            << " at most M devices per slot)";
        throw InfeasibleError(msg.str());
    }
}

/// Round-robin partition of the devices into Gamma groups; group g is due
/// in every slot t with t mod Gamma == g (0-based slots).
struct CyclicPolicy {
    std::vector<std::vector<int>> groups;

    const std::vector<int>& group_for_slot(int slot) const {
        return groups[static_cast<std::size_t>(slot) % groups.size()];
    }
    int period() const { return static_cast<int>(groups.size()); }
};

/// Deals the devices, in the given order, into Gamma contiguous blocks of
/// size ceil(K/Gamma) or floor(K/Gamma).
inline CyclicPolicy build_cyclic_policy(int num_devices, int num_servers, int max_aoi,
                                        const std::vector<int>& order) {
    require_feasible(num_devices, num_servers, max_aoi);
    if (static_cast<int>(order.size()) != num_devices) {
        throw std::invalid_argument("build_cyclic_policy: order must cover every device");
    }
    std::vector<char> seen(num_devices, 0);
    for (int d : order) {
        if (d < 0 || d >= num_devices || seen[d]) {
            throw std::invalid_argument("build_cyclic_policy: order is not a permutation");
        }
        seen[d] = 1;
    }
    CyclicPolicy policy;
    policy.groups.resize(max_aoi);
    const int base = num_devices / max_aoi;
    const int remainder = num_devices % max_aoi;
    int next = 0;
    for (int g = 0; g < max_aoi; ++g) {
        const int size = base + (g < remainder ? 1 : 0);
        policy.groups[g].assign(order.begin() + next, order.begin() + next + size);
        next += size;
    }
    return policy;
}

inline CyclicPolicy build_cyclic_policy(int num_devices, int num_servers, int max_aoi) {
    std::vector<int> order(num_devices);
    std::iota(order.begin(), order.end(), 0);
    return build_cyclic_policy(num_devices, num_servers, max_aoi, order);
}

/// Total AoI accumulated by M*Gamma devices over one Gamma-slot cycle,
/// M * (2 Gamma^3 + 3 Gamma^2 + Gamma) / 6. Policy-independent.
inline long long sum_aoi_closed_form(int num_servers, int max_aoi) {
    const long long g = max_aoi;
    return static_cast<long long>(num_servers) * (g * (g + 1) * (2 * g + 1)) / 6;
}

/// One device's AoI summed over a Gamma-slot window when it synchronizes at
/// slot t_prime (1-based within the window): t'^2 - Gamma t' + (Gamma^2 + Gamma)/2.
inline long long per_device_window_aoi(int t_prime, int max_aoi) {
    if (t_prime < 1 || t_prime > max_aoi) {
        throw std::invalid_argument("per_device_window_aoi: t_prime must lie in [1, Gamma]");
    }
    const long long tp = t_prime;
    const long long g = max_aoi;
    return tp * tp - g * tp + (g * g + g) / 2;
}

/// Devices whose age has reached the deadline and must synchronize now.
inline std::vector<int> due_set(const AoiVector& aoi, int max_aoi) {
    std::vector<int> due;
    for (std::size_t k = 0; k < aoi.size(); ++k) {
        if (aoi[k] == max_aoi) due.push_back(static_cast<int>(k));
    }
    return due;
}

/// Joint association, deployment and power decision of one slot, plus the
/// resulting energy ledger entries.
struct SlotDecision {
    Association association;
    Deployment deployment;
    PowerAllocation powers;
    SlotEnergy energies;
    bool migrated = false;
};

namespace detail {

/// Transmit energies of every due-device/server link; row order follows `due`.
template <ChannelLike C>
std::vector<double> transmit_energy_rows(const std::vector<int>& due, const C& channel,
                                         const std::vector<DeviceProfile>& profiles,
                                         const SystemParams& params) {
    std::vector<double> e(due.size() * static_cast<std::size_t>(params.num_servers));
    for (std::size_t i = 0; i < due.size(); ++i) {
        const double bits = profiles.at(due[i]).sync_bits;
        for (int m = 0; m < params.num_servers; ++m) {
            e[i * params.num_servers + m] =
                model::min_transmit_energy(bits, channel.gain(due[i], m), params);
        }
    }
    return e;
}

/// Completes a decision once the matching has fixed the association:
/// powers via the minimum-power rule, energies recomputed through the model
/// formulas so the ledger can never drift from them.
template <ChannelLike C>
void finalize_decision(SlotDecision& decision, const C& channel, const Deployment& previous,
                       const std::vector<DeviceProfile>& profiles, const SystemParams& params) {
    double transmit = 0.0;
    for (const auto& [device, server] : decision.association.pairs()) {
        const double gain = channel.gain(device, server);
        const double power = model::min_power(profiles.at(device).sync_bits, gain, params);
        if (power > params.max_power_w) {
            std::ostringstream msg;
            msg << "infeasible slot: device " << device << " needs " << power
                << " W toward server " << server << ", above the configured cap "
                << params.max_power_w << " W";
            throw InfeasibleError(msg.str());
        }
        decision.powers.emplace(device, power);
        transmit += model::min_transmit_energy(profiles.at(device).sync_bits, gain, params);
    }
    decision.energies.transmit_j = transmit;
    decision.energies.backhaul_j =
        model::backhaul_energy(decision.association, decision.deployment, profiles, params);
    decision.energies.migration_j =
        model::migration_energy(decision.deployment, previous, profiles, params);
}

inline std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace detail

/// One-shot problem, migrate-with-association flavor: every due device's
/// twin is co-located with the server it synchronizes to (b^t = a^t), so
/// backhaul vanishes and moving a twin costs lambda * Dtilde. Solved as a
/// minimum-weight matching of due devices onto servers.
template <ChannelLike C>
SlotDecision solve_p3_1(const std::vector<int>& due_devices, const Deployment& previous,
                        const C& channel, const std::vector<DeviceProfile>& profiles,
                        const SystemParams& params) {
    const std::vector<int> due = detail::sorted_unique(due_devices);
    if (static_cast<int>(due.size()) > params.num_servers) {
        throw InfeasibleError("one-shot step infeasible: more due devices than servers");
    }
    SlotDecision decision;
    decision.deployment = previous;
    if (!due.empty()) {
        std::vector<double> weights =
            detail::transmit_energy_rows(due, channel, profiles, params);
        for (std::size_t i = 0; i < due.size(); ++i) {
            const double move_cost = params.migration_j_per_bit * profiles.at(due[i]).twin_bits;
            for (int m = 0; m < params.num_servers; ++m) {
                if (m != previous.host_of(due[i])) {
                    weights[i * params.num_servers + m] += move_cost;
                }
            }
        }
        const matching::MatchingResult match = matching::solve_rectangular(
            static_cast<int>(due.size()), params.num_servers, weights);
        for (std::size_t i = 0; i < due.size(); ++i) {
            decision.association.assign(due[i], match.row_to_col[i]);
            decision.deployment.set_host(due[i], match.row_to_col[i]);
        }
    }
    detail::finalize_decision(decision, channel, previous, profiles, params);
    return decision;
}

/// One-shot problem, keep-deployment flavor: twins stay where they are
/// (b^t = b^{t-1}); synchronizing away from the hosting server costs
/// eta * D in backhaul instead.
template <ChannelLike C>
SlotDecision solve_p3_2(const std::vector<int>& due_devices, const Deployment& previous,
                        const C& channel, const std::vector<DeviceProfile>& profiles,
                        const SystemParams& params) {
    const std::vector<int> due = detail::sorted_unique(due_devices);
    if (static_cast<int>(due.size()) > params.num_servers) {
        throw InfeasibleError("one-shot step infeasible: more due devices than servers");
    }
    SlotDecision decision;
    decision.deployment = previous;
    if (!due.empty()) {
        std::vector<double> weights =
            detail::transmit_energy_rows(due, channel, profiles, params);
        for (std::size_t i = 0; i < due.size(); ++i) {
            const double forward_cost = params.backhaul_j_per_bit * profiles.at(due[i]).sync_bits;
            for (int m = 0; m < params.num_servers; ++m) {
                if (m != previous.host_of(due[i])) {
                    weights[i * params.num_servers + m] += forward_cost;
                }
            }
        }
        const matching::MatchingResult match = matching::solve_rectangular(
            static_cast<int>(due.size()), params.num_servers, weights);
        for (std::size_t i = 0; i < due.size(); ++i) {
            decision.association.assign(due[i], match.row_to_col[i]);
        }
    }
    detail::finalize_decision(decision, channel, previous, profiles, params);
    return decision;
}

/// Mutable state of the online policy: backhaul accrued since the last
/// migration, and the deployment it would migrate away from.
struct OnlineState {
    double accumulated_backhaul_j = 0.0;
    Deployment deployment;
    int last_migration_slot = -1;
};

/// One slot of the online policy. The migrate-with-association solution is
/// always computed first; its migration energy is the price quote the
/// accumulated backhaul is weighed against. Strictly below beta * quote the
/// twins stay put and the slot's backhaul is added to the accumulator;
/// otherwise the migration is committed and the accumulator resets.
/// beta = 0 therefore migrates every slot and beta = +inf never migrates.
template <ChannelLike C>
std::pair<SlotDecision, OnlineState> online_step(const OnlineState& state,
                                                 const std::vector<int>& group, const C& channel,
                                                 const std::vector<DeviceProfile>& profiles,
                                                 const SystemParams& params, int slot) {
    SlotDecision candidate = solve_p3_1(group, state.deployment, channel, profiles, params);
    const bool keep_deployment =
        std::isinf(params.beta) ||
        state.accumulated_backhaul_j < params.beta * candidate.energies.migration_j;
    if (keep_deployment) {
        SlotDecision decision = solve_p3_2(group, state.deployment, channel, profiles, params);
        OnlineState next = state;
        next.accumulated_backhaul_j += decision.energies.backhaul_j;
        return {std::move(decision), std::move(next)};
    }
    candidate.migrated = true;
    OnlineState next;
    next.accumulated_backhaul_j = 0.0;
    next.deployment = candidate.deployment;
    next.last_migration_slot = slot;
    return {std::move(candidate), std::move(next)};
}

/// Static-channel optimum for the fully loaded case K = M * Gamma: the
/// whole cycle's association and power plan from one K x K assignment over
/// (slot, server) cells, twins co-located with the chosen servers.
struct P2Solution {
    std::vector<Association> schedule;     ///< one association per slot of the cycle
    std::vector<PowerAllocation> powers;   ///< aligned with schedule
    double total_energy_j = 0.0;           ///< cycle transmit energy, minimal
    long long total_aoi = 0;               ///< cycle AoI, closed form
};

template <ChannelLike C>
P2Solution solve_p2_static(const C& channel, const std::vector<DeviceProfile>& profiles,
                           const SystemParams& params) {
    const int num_devices = params.num_devices;
    const int num_servers = params.num_servers;
    const int period = params.max_aoi;
    if (num_devices != num_servers * period) {
        throw InfeasibleError(
            "static-channel optimum requires exactly K = M * Gamma devices");
    }
    // Columns are (slot, server) cells; weights repeat across slots because
    // the channel is static.
    std::vector<double> weights(static_cast<std::size_t>(num_devices) * num_devices);
    for (int k = 0; k < num_devices; ++k) {
        for (int t = 0; t < period; ++t) {
            for (int m = 0; m < num_servers; ++m) {
                weights[static_cast<std::size_t>(k) * num_devices + t * num_servers + m] =
                    model::min_transmit_energy(profiles.at(k).sync_bits, channel.gain(k, m),
                                               params);
            }
        }
    }
    const matching::MatchingResult match =
        matching::solve_assignment(matching::CostMatrix(num_devices, std::move(weights)));

    P2Solution solution;
    solution.schedule.assign(period, Association{});
    solution.powers.assign(period, PowerAllocation{});
    for (int k = 0; k < num_devices; ++k) {
        const int cell = match.row_to_col[k];
        const int t = cell / num_servers;
        const int m = cell % num_servers;
        solution.schedule[t].assign(k, m);
        const double power = model::min_power(profiles.at(k).sync_bits, channel.gain(k, m), params);
        if (power > params.max_power_w) {
            throw InfeasibleError("static-channel optimum exceeds the configured power cap");
        }
        solution.powers[t].emplace(k, power);
        solution.total_energy_j +=
            model::min_transmit_energy(profiles.at(k).sync_bits, channel.gain(k, m), params);
    }
    solution.total_aoi = sum_aoi_closed_form(num_servers, period);
    return solution;
}

}  // namespace dtsync::sched
