#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "dtsync/oracle.hpp"
#include "dtsync/rng.hpp"
#include "dtsync/schedulers.hpp"

using namespace dtsync;

namespace {

/// Fixed gain matrix standing in for a channel.
struct TableChannel {
    int servers;
    std::vector<double> gains;
    double gain(int k, int m) const {
        return gains[static_cast<std::size_t>(k) * servers + m];
    }
};

SystemParams tiny_params(int devices, int servers, int max_aoi) {
    SystemParams p;
    p.num_devices = devices;
    p.num_servers = servers;
    p.max_aoi = max_aoi;
    p.horizon = 4 * max_aoi;
    return p;
}

}  // namespace

TEST_CASE("feasibility gate throws with a clear message") {
    REQUIRE_NOTHROW(sched::require_feasible(6, 2, 3));
    REQUIRE_THROWS_AS(sched::require_feasible(7, 2, 3), InfeasibleError);
}

TEST_CASE("cyclic policy deals balanced groups in order") {
    const sched::CyclicPolicy policy = sched::build_cyclic_policy(7, 3, 3);
    REQUIRE(policy.period() == 3);
    REQUIRE(policy.groups[0] == std::vector<int>{0, 1, 2});
    REQUIRE(policy.groups[1] == std::vector<int>{3, 4});
    REQUIRE(policy.groups[2] == std::vector<int>{5, 6});
    REQUIRE(policy.group_for_slot(0) == policy.groups[0]);
    REQUIRE(policy.group_for_slot(5) == policy.groups[2]);

    const sched::CyclicPolicy custom =
        sched::build_cyclic_policy(4, 2, 2, std::vector<int>{3, 1, 0, 2});
    REQUIRE(custom.groups[0] == std::vector<int>{3, 1});
    REQUIRE(custom.groups[1] == std::vector<int>{0, 2});

    REQUIRE_THROWS_AS(sched::build_cyclic_policy(4, 2, 2, std::vector<int>{0, 1, 2}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(sched::build_cyclic_policy(4, 2, 2, std::vector<int>{0, 1, 2, 2}),
                      std::invalid_argument);
}

TEST_CASE("cyclic ageing never exceeds the deadline") {
    const int devices = 10;
    const int servers = 2;
    const int max_aoi = 5;
    const sched::CyclicPolicy policy = sched::build_cyclic_policy(devices, servers, max_aoi);
    AoiVector aoi(devices, 1);
    for (int t = 0; t < 4 * max_aoi; ++t) {
        for (int a : aoi) REQUIRE(a <= max_aoi);
        const std::vector<int>& group = policy.group_for_slot(t);
        aoi = model::aoi_step(aoi, std::set<int>(group.begin(), group.end()));
    }
}

TEST_CASE("closed-form cycle AoI matches frozen values and the simulation oracle") {
    REQUIRE(sched::sum_aoi_closed_form(1, 2) == 5);
    REQUIRE(sched::sum_aoi_closed_form(2, 3) == 28);
    rng::Stream stream(31);
    for (int m = 1; m <= 4; ++m) {
        for (int gamma = 1; gamma <= 5; ++gamma) {
            std::vector<int> order(m * gamma);
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t j = order.size(); j > 1; --j) {
                std::swap(order[j - 1], order[stream.index(j)]);
            }
            REQUIRE(oracle::cycle_aoi_simulated(m, gamma, order) ==
                    sched::sum_aoi_closed_form(m, gamma));
        }
    }
}

TEST_CASE("per-device window AoI matches the literal loop") {
    for (int gamma = 1; gamma <= 12; ++gamma) {
        for (int tp = 1; tp <= gamma; ++tp) {
            REQUIRE(sched::per_device_window_aoi(tp, gamma) == oracle::window_aoi_loop(tp, gamma));
        }
    }
    REQUIRE_THROWS_AS(sched::per_device_window_aoi(0, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(sched::per_device_window_aoi(6, 5), std::invalid_argument);
}

TEST_CASE("window AoI sums over groups reproduce the cycle total") {
    // Each of the M devices scheduled in window slot t' contributes the
    // per-device formula; summing over all K = M * Gamma devices must give
    // the cycle total.
    const int m = 3;
    const int gamma = 6;
    long long total = 0;
    for (int tp = 1; tp <= gamma; ++tp) total += m * sched::per_device_window_aoi(tp, gamma);
    REQUIRE(total == sched::sum_aoi_closed_form(m, gamma));
}

TEST_CASE("due set picks exactly the deadline ages") {
    REQUIRE(sched::due_set({3, 1, 3, 2}, 3) == std::vector<int>{0, 2});
    REQUIRE(sched::due_set({1, 1}, 3).empty());
}

TEST_CASE("one-shot solvers match brute force and fill the ledger consistently") {
    rng::Stream stream(77);
    for (int rep = 0; rep < 25; ++rep) {
        const int servers = 3;
        const int devices = 5;
        SystemParams params = tiny_params(devices, servers, 4);
        TableChannel channel{servers, {}};
        channel.gains.resize(static_cast<std::size_t>(devices) * servers);
        for (double& g : channel.gains) g = std::pow(10.0, stream.uniform(-11.0, -8.0));
        std::vector<DeviceProfile> profiles(devices);
        for (DeviceProfile& pr : profiles) {
            pr.sync_bits = stream.uniform(2.0, 5.0) * env::kBitsPerMb;
            pr.twin_bits = stream.uniform(5.0, 50.0) * env::kBitsPerMb;
        }
        std::vector<int> hosts(devices);
        for (int& h : hosts) h = static_cast<int>(stream.index(servers));
        const Deployment previous(hosts);
        const std::vector<int> due = {0, 2, 4};

        const sched::SlotDecision migrate =
            sched::solve_p3_1(due, previous, channel, profiles, params);
        REQUIRE(migrate.energies.backhaul_j == 0.0);
        REQUIRE(migrate.energies.transmit_j + migrate.energies.migration_j ==
                Catch::Approx(oracle::brute_force_one_shot(due, previous, channel, profiles,
                                                           params, oracle::OneShotFlavor::kMigrate))
                    .epsilon(1e-12));
        for (int k : due) {
            REQUIRE(migrate.deployment.host_of(k) ==
                    migrate.association.pairs().at(k));
        }

        const sched::SlotDecision keep =
            sched::solve_p3_2(due, previous, channel, profiles, params);
        REQUIRE(keep.energies.migration_j == 0.0);
        REQUIRE(keep.deployment == previous);
        REQUIRE(keep.energies.transmit_j + keep.energies.backhaul_j ==
                Catch::Approx(oracle::brute_force_one_shot(due, previous, channel, profiles,
                                                           params, oracle::OneShotFlavor::kKeep))
                    .epsilon(1e-12));

        // Ledger entries must equal a from-scratch recomputation exactly.
        for (const sched::SlotDecision& d : {migrate, keep}) {
            double transmit = 0.0;
            for (const auto& [k, m] : d.association.pairs()) {
                transmit += model::min_transmit_energy(profiles[k].sync_bits, channel.gain(k, m),
                                                       params);
            }
            REQUIRE(d.energies.transmit_j == transmit);
            REQUIRE(d.energies.backhaul_j ==
                    model::backhaul_energy(d.association, d.deployment, profiles, params));
            REQUIRE(d.energies.migration_j ==
                    model::migration_energy(d.deployment, previous, profiles, params));
        }
    }
}

TEST_CASE("one-shot solvers reject more due devices than servers") {
    SystemParams params = tiny_params(4, 2, 2);
    TableChannel channel{2, std::vector<double>(8, 1e-9)};
    std::vector<DeviceProfile> profiles(4, DeviceProfile{1e6, 1e7});
    const Deployment previous({0, 0, 1, 1});
    REQUIRE_THROWS_AS(
        sched::solve_p3_1({0, 1, 2}, previous, channel, profiles, params), InfeasibleError);
}

TEST_CASE("power cap turns an expensive slot into an infeasibility error") {
    SystemParams params = tiny_params(2, 2, 2);
    params.max_power_w = 1.0e-3;
    TableChannel channel{2, std::vector<double>(4, 1e-12)};
    std::vector<DeviceProfile> profiles(2, DeviceProfile{4e7, 1e8});
    const Deployment previous(std::vector<int>{0, 1});
    REQUIRE_THROWS_AS(
        sched::solve_p3_1({0, 1}, previous, channel, profiles, params), InfeasibleError);
}

TEST_CASE("online threshold: zero migrates, infinity keeps") {
    const int devices = 6;
    const int servers = 3;
    SystemParams params = tiny_params(devices, servers, 2);
    rng::Stream stream(55);
    std::vector<DeviceProfile> profiles(devices);
    for (DeviceProfile& pr : profiles) {
        pr.sync_bits = stream.uniform(2.0, 5.0) * env::kBitsPerMb;
        pr.twin_bits = stream.uniform(5.0, 50.0) * env::kBitsPerMb;
    }
    const sched::CyclicPolicy cyclic = sched::build_cyclic_policy(devices, servers, 2);

    for (const double beta : {0.0, std::numeric_limits<double>::infinity()}) {
        params.beta = beta;
        sched::OnlineState state;
        state.deployment = Deployment({0, 1, 2, 0, 1, 2});
        const Deployment initial = state.deployment;
        for (int t = 0; t < 12; ++t) {
            TableChannel channel{servers, {}};
            channel.gains.resize(static_cast<std::size_t>(devices) * servers);
            for (double& g : channel.gains) g = std::pow(10.0, stream.uniform(-11.0, -8.0));
            auto [decision, next] = sched::online_step(state, cyclic.group_for_slot(t), channel,
                                                       profiles, params, t);
            if (beta == 0.0) {
                REQUIRE(decision.migrated);
                REQUIRE(decision.energies.backhaul_j == 0.0);
            } else {
                REQUIRE_FALSE(decision.migrated);
                REQUIRE(decision.energies.migration_j == 0.0);
                REQUIRE(decision.deployment == initial);
            }
            state = next;
        }
    }
}

TEST_CASE("online threshold triggers exactly when accumulated backhaul reaches beta times the quote") {
    // Hand-built two-device, two-server world. Device k has its twin on the
    // "wrong" server, so every keep-slot pays backhaul and the migrate
    // candidate prices a twin move.
    const int devices = 2;
    const int servers = 2;
    SystemParams params = tiny_params(devices, servers, 1);  // everyone due every slot
    params.backhaul_j_per_bit = 1.0e-8;
    params.migration_j_per_bit = 1.0e-8;
    // Gains favor server 0 for device 0 and server 1 for device 1 so
    // strongly that the cross links cost more than a twin move; the
    // migrate-flavor matcher therefore really does move the twins.
    TableChannel channel{servers, {1e-8, 1e-15, 1e-15, 1e-8}};
    std::vector<DeviceProfile> profiles = {{1.0e6, 1.0e8}, {1.0e6, 1.0e8}};
    // Twins start swapped: paying backhaul 2 * (1e-8 * 1e6) = 0.02 J per slot;
    // the migrate candidate would move both twins: 2 * (1e-8 * 1e8) = 2 J.
    const Deployment swapped(std::vector<int>{1, 0});

    params.beta = 0.05;  // threshold energy = 0.05 * 2 J = 0.1 J -> 5 keep slots
    sched::OnlineState state;
    state.deployment = swapped;
    const std::vector<int> group = {0, 1};
    std::vector<bool> migrated;
    for (int t = 0; t < 7; ++t) {
        auto [decision, next] = sched::online_step(state, group, channel, profiles, params, t);
        migrated.push_back(decision.migrated);
        state = next;
    }
    // Slots 0..4 accumulate 0.02 each (0.02,...,0.10); at slot 5 the
    // accumulator 0.10 is no longer strictly below 0.1, so it migrates.
    // Afterwards the twins sit with the association, the quote is zero, and
    // the accumulator 0 is not strictly below beta * 0, so the policy stays
    // in the (now free) migrate branch.
    REQUIRE(migrated == std::vector<bool>{false, false, false, false, false, true, true});
    REQUIRE(state.deployment == Deployment(std::vector<int>{0, 1}));
}

TEST_CASE("static cycle plan equals brute force and reports the closed-form AoI") {
    rng::Stream stream(88);
    for (int rep = 0; rep < 5; ++rep) {
        const int servers = 2;
        const int gamma = 3;
        SystemParams params = tiny_params(servers * gamma, servers, gamma);
        TableChannel channel{servers, {}};
        channel.gains.resize(static_cast<std::size_t>(params.num_devices) * servers);
        for (double& g : channel.gains) g = std::pow(10.0, stream.uniform(-11.0, -8.0));
        std::vector<DeviceProfile> profiles(params.num_devices);
        for (DeviceProfile& pr : profiles) {
            pr.sync_bits = stream.uniform(2.0, 5.0) * env::kBitsPerMb;
            pr.twin_bits = stream.uniform(5.0, 50.0) * env::kBitsPerMb;
        }
        const sched::P2Solution plan = sched::solve_p2_static(channel, profiles, params);
        REQUIRE(plan.total_energy_j ==
                Catch::Approx(oracle::brute_force_static_cycle(channel, profiles, params))
                    .epsilon(1e-12));
        REQUIRE(plan.total_aoi == sched::sum_aoi_closed_form(servers, gamma));
        // Every device appears exactly once across the cycle; each slot uses
        // each server at most once.
        std::vector<int> appearances(params.num_devices, 0);
        for (const Association& assoc : plan.schedule) {
            std::set<int> used;
            for (const auto& [k, m] : assoc.pairs()) {
                ++appearances[k];
                REQUIRE(used.insert(m).second);
            }
        }
        for (int c : appearances) REQUIRE(c == 1);
    }
    SystemParams bad = tiny_params(5, 2, 3);  // K != M * Gamma
    TableChannel channel{2, std::vector<double>(10, 1e-9)};
    std::vector<DeviceProfile> profiles(5, DeviceProfile{1e6, 1e7});
    REQUIRE_THROWS_AS(sched::solve_p2_static(channel, profiles, bad), InfeasibleError);
}
