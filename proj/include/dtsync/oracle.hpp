#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "dtsync/environment.hpp"
#include "dtsync/matching.hpp"
#include "dtsync/model.hpp"
#include "dtsync/rng.hpp"
#include "dtsync/schedulers.hpp"
#include "dtsync/types.hpp"

/// Brute-force reference implementations. Everything here is deliberately
/// naive -- exhaustive enumeration, grids, literal loops -- and shares no
/// code path with the optimized solvers it checks.
namespace dtsync::oracle {

/// Exhaustive minimum over all injective row -> column maps. Exponential;
/// intended for instances with at most ~8 rows.
inline double enumerate_min_assignment(int rows, int cols, const std::vector<double>& costs) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> choice(rows, -1);
    std::vector<char> used(cols, 0);
    const auto recurse = [&](auto&& self, int row, double acc) -> void {
        if (row == rows) {
            best = std::min(best, acc);
            return;
        }
        for (int c = 0; c < cols; ++c) {
            if (used[c]) continue;
            used[c] = 1;
            choice[row] = c;
            self(self, row + 1, acc + costs[static_cast<std::size_t>(row) * cols + c]);
            used[c] = 0;
        }
    };
    recurse(recurse, 0, 0.0);
    return best;
}

/// Minimum transmit energy over a log-spaced grid of feasible powers
/// [p_min, 10 p_min]. Every grid point meets the deadline, so the true
/// optimum can only be at or below the closed form under test.
inline double grid_min_energy(double bits, double gain, const SystemParams& params,
                              int points = 10000) {
    const double p_min = model::min_power(bits, gain, params);
    const double ratio = std::pow(10.0, 1.0 / (points - 1));
    double best = std::numeric_limits<double>::infinity();
    double p = p_min;
    for (int i = 0; i < points; ++i, p *= ratio) {
        const double rate = model::transmit_rate(gain, p, params);
        best = std::min(best, p * bits / rate);
    }
    return best;
}

/// Literal-loop AoI sum of one device over a steady-state window: ages climb
/// back from 1 after the sync slot, and t_prime positions the sync within
/// the window.
inline long long window_aoi_loop(int t_prime, int max_aoi) {
    long long total = 0;
    for (int i = 1; i <= t_prime; ++i) total += i;
    for (int j = 1; j <= max_aoi - t_prime; ++j) total += j;
    return total;
}

/// Simulates the cyclic schedule ageing process for K = M * Gamma devices
/// from fresh (all-ones) ages and sums every device's age over the first
/// cycle, counting ages at the start of each slot.
inline long long cycle_aoi_simulated(int num_servers, int max_aoi,
                                     const std::vector<int>& order) {
    const int num_devices = num_servers * max_aoi;
    const sched::CyclicPolicy policy =
        sched::build_cyclic_policy(num_devices, num_servers, max_aoi, order);
    AoiVector aoi(num_devices, 1);
    long long total = 0;
    for (int t = 0; t < max_aoi; ++t) {
        total += std::accumulate(aoi.begin(), aoi.end(), 0LL);
        const std::vector<int>& group = policy.group_for_slot(t);
        aoi = model::aoi_step(aoi, std::set<int>(group.begin(), group.end()));
    }
    return total;
}

enum class OneShotFlavor { kMigrate, kKeep };

/// Exhaustive optimum of one slot's decision problem, both flavors, by
/// enumerating every injective due -> server map and pricing it with the
/// model formulas directly.
template <sched::ChannelLike C>
double brute_force_one_shot(const std::vector<int>& due, const Deployment& previous,
                            const C& channel, const std::vector<DeviceProfile>& profiles,
                            const SystemParams& params, OneShotFlavor flavor) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> used(params.num_servers, 0);
    std::vector<int> pick(due.size(), -1);
    const auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == due.size()) {
            Association assoc;
            Deployment deploy = previous;
            double transmit = 0.0;
            for (std::size_t j = 0; j < due.size(); ++j) {
                assoc.assign(due[j], pick[j]);
                transmit += model::min_transmit_energy(profiles.at(due[j]).sync_bits,
                                                       channel.gain(due[j], pick[j]), params);
                if (flavor == OneShotFlavor::kMigrate) deploy.set_host(due[j], pick[j]);
            }
            const double side_cost =
                flavor == OneShotFlavor::kMigrate
                    ? model::migration_energy(deploy, previous, profiles, params)
                    : model::backhaul_energy(assoc, deploy, profiles, params);
            best = std::min(best, transmit + side_cost);
            return;
        }
        for (int m = 0; m < params.num_servers; ++m) {
            if (used[m]) continue;
            used[m] = 1;
            pick[i] = m;
            self(self, i + 1);
            used[m] = 0;
        }
    };
    recurse(recurse, 0);
    return best;
}

/// Exhaustive optimum of the static-channel cycle plan: every bijection of
/// devices onto (slot, server) cells. Factorial in K; keep K <= 8.
template <sched::ChannelLike C>
double brute_force_static_cycle(const C& channel, const std::vector<DeviceProfile>& profiles,
                                const SystemParams& params) {
    const int cells = params.num_servers * params.max_aoi;
    std::vector<int> cell_of(cells);
    std::iota(cell_of.begin(), cell_of.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int k = 0; k < cells; ++k) {
            const int m = cell_of[k] % params.num_servers;
            total += model::min_transmit_energy(profiles.at(k).sync_bits, channel.gain(k, m),
                                                params);
        }
        best = std::min(best, total);
    } while (std::next_permutation(cell_of.begin(), cell_of.end()));
    return best;
}

/// Outcome of one validation family.
struct CheckResult {
    std::string name;
    int cases = 0;
    double max_rel_error = 0.0;
    bool pass = false;
};

namespace detail {

inline double rel_error(double got, double want) {
    const double scale = std::max({std::abs(got), std::abs(want), 1.0});
    return std::abs(got - want) / scale;
}

/// Random cost matrix with entries in [0, 10).
inline std::vector<double> random_costs(rng::Stream& stream, int rows, int cols) {
    std::vector<double> costs(static_cast<std::size_t>(rows) * cols);
    for (double& c : costs) c = stream.uniform(0.0, 10.0);
    return costs;
}

/// Dense gain matrix usable as a channel by the solvers under test.
struct FixedChannel {
    int num_servers = 0;
    std::vector<double> gains;  ///< row-major device x server
    double gain(int device, int server) const {
        return gains[static_cast<std::size_t>(device) * num_servers + server];
    }
};

inline FixedChannel random_channel(rng::Stream& stream, int num_devices, int num_servers) {
    FixedChannel ch;
    ch.num_servers = num_servers;
    ch.gains.resize(static_cast<std::size_t>(num_devices) * num_servers);
    // Gains in a realistic 1e-12 .. 1e-7 band.
    for (double& g : ch.gains) g = std::pow(10.0, stream.uniform(-12.0, -7.0));
    return ch;
}

inline SystemParams small_params(int num_devices, int num_servers, int max_aoi) {
    SystemParams p;
    p.num_devices = num_devices;
    p.num_servers = num_servers;
    p.max_aoi = max_aoi;
    p.horizon = std::max(1, 3 * max_aoi);
    return p;
}

inline std::vector<DeviceProfile> random_profiles(rng::Stream& stream, int num_devices) {
    std::vector<DeviceProfile> profiles(num_devices);
    for (DeviceProfile& pr : profiles) {
        pr.sync_bits = stream.uniform(2.0, 5.0) * env::kBitsPerMb;
        pr.twin_bits = stream.uniform(5.0, 50.0) * env::kBitsPerMb;
    }
    return profiles;
}

}  // namespace detail

inline constexpr double kValidationTolerance = 1.0e-9;

/// Matching solver vs. exhaustive enumeration on random square and
/// rectangular instances.
inline CheckResult check_matching(int size_limit, std::uint64_t seed, int instances_per_size = 20) {
    CheckResult result{"matching_vs_enumeration", 0, 0.0, false};
    rng::Stream stream(rng::derive(seed, 101));
    for (int n = 1; n <= size_limit; ++n) {
        for (int cols = n; cols <= size_limit; ++cols) {
            for (int i = 0; i < instances_per_size; ++i) {
                const std::vector<double> costs = detail::random_costs(stream, n, cols);
                const double got = matching::solve_rectangular(n, cols, costs).total_cost;
                const double want = enumerate_min_assignment(n, cols, costs);
                result.max_rel_error = std::max(result.max_rel_error, detail::rel_error(got, want));
                ++result.cases;
            }
        }
    }
    result.pass = result.max_rel_error <= kValidationTolerance;
    return result;
}

/// Padding a rectangular instance to square must not change the optimum or
/// the real rows' assignments' cost.
inline CheckResult check_padding(int size_limit, std::uint64_t seed, int instances_per_size = 20) {
    CheckResult result{"padding_equivalence", 0, 0.0, false};
    rng::Stream stream(rng::derive(seed, 102));
    for (int rows = 1; rows <= size_limit; ++rows) {
        for (int cols = rows; cols <= size_limit; ++cols) {
            for (int i = 0; i < instances_per_size; ++i) {
                const std::vector<double> costs = detail::random_costs(stream, rows, cols);
                const double direct = matching::solve_rectangular(rows, cols, costs).total_cost;
                const matching::PaddedMatrix padded = matching::pad_to_square(
                    rows, cols, costs, matching::recommended_pad_value(costs));
                const matching::MatchingResult square = matching::solve_assignment(padded.matrix);
                double real_cost = 0.0;
                for (int r = 0; r < rows; ++r) {
                    real_cost += costs[static_cast<std::size_t>(r) * cols + square.row_to_col[r]];
                }
                result.max_rel_error =
                    std::max(result.max_rel_error, detail::rel_error(real_cost, direct));
                ++result.cases;
            }
        }
    }
    result.pass = result.max_rel_error <= kValidationTolerance;
    return result;
}

/// Closed-form minimum power: the grid search over feasible powers can
/// never beat it, and transmitting at it uses exactly one slot.
inline CheckResult check_min_power(std::uint64_t seed, int instances = 50) {
    CheckResult result{"min_power_vs_grid", 0, 0.0, false};
    rng::Stream stream(rng::derive(seed, 103));
    SystemParams params;
    bool ok = true;
    for (int i = 0; i < instances; ++i) {
        const double bits = stream.uniform(2.0, 5.0) * env::kBitsPerMb;
        const double gain = std::pow(10.0, stream.uniform(-12.0, -7.0));
        const double closed = model::min_transmit_energy(bits, gain, params);
        const double grid = grid_min_energy(bits, gain, params, 2000);
        // Closed form must win (up to roundoff), never lose.
        if (closed > grid * (1.0 + kValidationTolerance)) ok = false;
        const double p = model::min_power(bits, gain, params);
        const double slot_time = bits / model::transmit_rate(gain, p, params);
        result.max_rel_error =
            std::max(result.max_rel_error, detail::rel_error(slot_time, params.slot_duration_s));
        ++result.cases;
    }
    result.pass = ok && result.max_rel_error <= kValidationTolerance;
    return result;
}

/// Closed-form cycle AoI vs. simulated ageing under random cyclic orders,
/// and the per-device window formula vs. a literal loop.
inline CheckResult check_aoi_closed_forms(int size_limit, std::uint64_t seed) {
    CheckResult result{"aoi_closed_forms", 0, 0.0, false};
    rng::Stream stream(rng::derive(seed, 104));
    bool ok = true;
    for (int m = 1; m <= std::max(1, size_limit / 2); ++m) {
        for (int gamma = 1; gamma <= size_limit; ++gamma) {
            std::vector<int> order(m * gamma);
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t j = order.size(); j > 1; --j) {
                std::swap(order[j - 1], order[stream.index(j)]);
            }
            const long long simulated = cycle_aoi_simulated(m, gamma, order);
            const long long closed = sched::sum_aoi_closed_form(m, gamma);
            if (simulated != closed) ok = false;
            ++result.cases;
        }
    }
    for (int gamma = 1; gamma <= 2 * size_limit; ++gamma) {
        for (int tp = 1; tp <= gamma; ++tp) {
            if (sched::per_device_window_aoi(tp, gamma) != window_aoi_loop(tp, gamma)) ok = false;
            ++result.cases;
        }
    }
    result.pass = ok;
    return result;
}

/// One-shot solvers vs. exhaustive enumeration on random instances.
inline CheckResult check_one_shot(int size_limit, std::uint64_t seed, int instances = 40) {
    CheckResult result{"one_shot_vs_enumeration", 0, 0.0, false};
    rng::Stream stream(rng::derive(seed, 105));
    for (int i = 0; i < instances; ++i) {
        const int servers = 2 + static_cast<int>(stream.index(size_limit - 1));
        const int devices = servers + static_cast<int>(stream.index(3));
        const int due_count = 1 + static_cast<int>(stream.index(servers));
        const SystemParams params = detail::small_params(devices, servers, 4);
        const detail::FixedChannel channel = detail::random_channel(stream, devices, servers);
        const std::vector<DeviceProfile> profiles = detail::random_profiles(stream, devices);
        std::vector<int> all(devices);
        std::iota(all.begin(), all.end(), 0);
        for (std::size_t j = all.size(); j > 1; --j) std::swap(all[j - 1], all[stream.index(j)]);
        const std::vector<int> due(all.begin(), all.begin() + due_count);
        std::vector<int> hosts(devices);
        for (int& h : hosts) h = static_cast<int>(stream.index(servers));
        const Deployment previous(std::move(hosts));

        const sched::SlotDecision migrate =
            sched::solve_p3_1(due, previous, channel, profiles, params);
        const double migrate_cost =
            migrate.energies.transmit_j + migrate.energies.migration_j;
        const double migrate_want = brute_force_one_shot(due, previous, channel, profiles, params,
                                                         OneShotFlavor::kMigrate);
        result.max_rel_error =
            std::max(result.max_rel_error, detail::rel_error(migrate_cost, migrate_want));

        const sched::SlotDecision keep =
            sched::solve_p3_2(due, previous, channel, profiles, params);
        const double keep_cost = keep.energies.transmit_j + keep.energies.backhaul_j;
        const double keep_want = brute_force_one_shot(due, previous, channel, profiles, params,
                                                      OneShotFlavor::kKeep);
        result.max_rel_error =
            std::max(result.max_rel_error, detail::rel_error(keep_cost, keep_want));
        result.cases += 2;
    }
    result.pass = result.max_rel_error <= kValidationTolerance;
    return result;
}

/// Static-channel cycle plan vs. exhaustive enumeration on tiny instances.
inline CheckResult check_static_cycle(std::uint64_t seed, int instances = 10) {
    CheckResult result{"static_cycle_vs_enumeration", 0, 0.0, false};
    rng::Stream stream(rng::derive(seed, 106));
    for (int i = 0; i < instances; ++i) {
        const int servers = 2;
        const int gamma = 2 + static_cast<int>(stream.index(2));  // K = 4 or 6
        const SystemParams params = detail::small_params(servers * gamma, servers, gamma);
        const detail::FixedChannel channel =
            detail::random_channel(stream, params.num_devices, servers);
        const std::vector<DeviceProfile> profiles =
            detail::random_profiles(stream, params.num_devices);
        const double got = sched::solve_p2_static(channel, profiles, params).total_energy_j;
        const double want = brute_force_static_cycle(channel, profiles, params);
        result.max_rel_error = std::max(result.max_rel_error, detail::rel_error(got, want));
        ++result.cases;
    }
    result.pass = result.max_rel_error <= kValidationTolerance;
    return result;
}

/// Threshold edge cases: a zero threshold migrates every slot, an infinite
/// threshold never does.
inline CheckResult check_threshold_extremes(std::uint64_t seed, int slots = 24) {
    CheckResult result{"threshold_extremes", 0, 0.0, false};
    rng::Stream stream(rng::derive(seed, 107));
    bool ok = true;
    for (int i = 0; i < 5; ++i) {
        const int servers = 3;
        const int devices = 6;
        SystemParams params = detail::small_params(devices, servers, 2);
        const std::vector<DeviceProfile> profiles = detail::random_profiles(stream, devices);
        const sched::CyclicPolicy cyclic =
            sched::build_cyclic_policy(devices, servers, params.max_aoi);
        for (const double beta : {0.0, std::numeric_limits<double>::infinity()}) {
            params.beta = beta;
            sched::OnlineState state;
            std::vector<int> hosts(devices);
            for (int& h : hosts) h = static_cast<int>(stream.index(servers));
            state.deployment = Deployment(std::move(hosts));
            const Deployment initial = state.deployment;
            for (int t = 0; t < slots; ++t) {
                const detail::FixedChannel channel =
                    detail::random_channel(stream, devices, servers);
                auto [decision, next] = sched::online_step(state, cyclic.group_for_slot(t),
                                                           channel, profiles, params, t);
                if (beta == 0.0 && !decision.migrated) ok = false;
                if (std::isinf(beta) &&
                    (decision.migrated || !(decision.deployment == initial))) {
                    ok = false;
                }
                state = next;
                ++result.cases;
            }
        }
    }
    result.pass = ok;
    return result;
}

/// Runs every family; `size_limit` caps enumeration sizes (costs grow
/// factorially beyond ~7).
inline std::vector<CheckResult> run_validation(int size_limit, std::uint64_t seed) {
    if (size_limit < 2 || size_limit > 7) {
        throw std::invalid_argument("run_validation: size_limit must lie in [2, 7]");
    }
    return {
        check_matching(size_limit, seed),
        check_padding(size_limit, seed),
        check_min_power(seed),
        check_aoi_closed_forms(size_limit, seed),
        check_one_shot(size_limit, seed),
        check_static_cycle(seed),
        check_threshold_extremes(seed),
    };
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.pass; });
}

}  // namespace dtsync::oracle
