#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "dtsync/model.hpp"
#include "dtsync/types.hpp"

using namespace dtsync;

namespace {

SystemParams unit_params() {
    SystemParams p;
    p.num_servers = 1;
    p.num_devices = 1;
    p.bandwidth_hz = 1.0;
    p.slot_duration_s = 1.0;
    p.noise_power_w = 1.0;
    return p;
}

}  // namespace

TEST_CASE("transmit rate matches the base-2 Shannon form") {
    SystemParams p = unit_params();
    p.bandwidth_hz = 1.0e6;
    // SNR of 6 gives exactly B * log2(7).
    REQUIRE(model::transmit_rate(2.0, 3.0, p) ==
            Catch::Approx(2.807354922057604e6).epsilon(1e-15));
    // Zero power means zero rate.
    REQUIRE(model::transmit_rate(2.0, 0.0, p) == 0.0);
    REQUIRE_THROWS_AS(model::transmit_rate(0.0, 1.0, p), std::domain_error);
    REQUIRE_THROWS_AS(model::transmit_rate(1.0, -1.0, p), std::domain_error);
}

TEST_CASE("minimum power hits hand-computed values") {
    // One bit-per-symbol regime: p = sigma^2 (2^(D/(B Ts)) - 1) / h.
    SystemParams p = unit_params();
    p.noise_power_w = 2.0;
    REQUIRE(model::min_power(1.0, 1.0, p) == Catch::Approx(2.0).epsilon(1e-15));
    p.noise_power_w = 1.0;
    REQUIRE(model::min_power(2.0, 1.0, p) == Catch::Approx(3.0).epsilon(1e-15));
    // Energy is just slot duration times power.
    p.slot_duration_s = 0.5;
    REQUIRE(model::min_transmit_energy(1.0, 1.0, p) ==
            Catch::Approx(0.5 * model::min_power(1.0, 1.0, p)).epsilon(1e-15));
}

TEST_CASE("minimum power satisfies the deadline with equality") {
    SystemParams p;
    p.bandwidth_hz = 1.0e7;
    p.slot_duration_s = 0.05;
    const double bits = 3.2e7;
    const double gain = 5.0e-10;
    const double power = model::min_power(bits, gain, p);
    const double rate = model::transmit_rate(gain, power, p);
    REQUIRE(bits / rate == Catch::Approx(p.slot_duration_s).epsilon(1e-12));
}

TEST_CASE("backhaul energy charges only scheduled off-host devices") {
    SystemParams p = unit_params();
    p.num_devices = 3;
    p.num_servers = 2;
    p.backhaul_j_per_bit = 2.0;
    const std::vector<DeviceProfile> profiles = {{10.0, 100.0}, {20.0, 200.0}, {30.0, 300.0}};
    const Deployment deploy({0, 1, 0});
    Association assoc;
    assoc.assign(0, 0);  // on host: free
    assoc.assign(1, 1);  // on host: free
    REQUIRE(model::backhaul_energy(assoc, deploy, profiles, p) == 0.0);
    Association off;
    off.assign(0, 1);  // off host: 2 * 10
    REQUIRE(model::backhaul_energy(off, deploy, profiles, p) == Catch::Approx(20.0));
    // Unscheduled device 2 never contributes.
    Association both;
    both.assign(0, 1);
    both.assign(1, 0);
    REQUIRE(model::backhaul_energy(both, deploy, profiles, p) == Catch::Approx(20.0 + 40.0));
}

TEST_CASE("migration energy charges changed hosts") {
    SystemParams p = unit_params();
    p.num_devices = 3;
    p.num_servers = 2;
    p.migration_j_per_bit = 0.5;
    const std::vector<DeviceProfile> profiles = {{1.0, 10.0}, {1.0, 20.0}, {1.0, 40.0}};
    const Deployment before({0, 1, 0});
    REQUIRE(model::migration_energy(before, before, profiles, p) == 0.0);
    const Deployment after({1, 1, 0});  // only device 0 moved
    REQUIRE(model::migration_energy(after, before, profiles, p) == Catch::Approx(5.0));
    const Deployment all({1, 0, 1});
    REQUIRE(model::migration_energy(all, before, profiles, p) == Catch::Approx(5.0 + 10.0 + 20.0));
}

TEST_CASE("AoI update resets scheduled devices and ages the rest") {
    const AoiVector aoi = {1, 4, 2};
    const AoiVector next = model::aoi_step(aoi, std::set<int>{1});
    REQUIRE(next == AoiVector{2, 1, 3});
    const AoiVector all = model::aoi_step(aoi, std::set<int>{0, 1, 2});
    REQUIRE(all == AoiVector{1, 1, 1});
    const AoiVector none = model::aoi_step(aoi, std::set<int>{});
    REQUIRE(none == AoiVector{2, 5, 3});
}

TEST_CASE("weighted cost mixes normalized terms") {
    SystemParams p = unit_params();
    p.aoi_weight = 0.1;
    REQUIRE(model::weighted_cost(20.0, 0.5, p) == Catch::Approx(2.45).epsilon(1e-15));
    p.aoi_norm = 10.0;
    p.energy_norm = 0.5;
    REQUIRE(model::weighted_cost(20.0, 0.5, p) ==
            Catch::Approx(0.1 * 2.0 + 0.9 * 1.0).epsilon(1e-15));
    p.aoi_weight = 1.0;
    p.aoi_norm = 1.0;
    REQUIRE(model::weighted_cost(7.0, 123.0, p) == Catch::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("feasibility is exactly K <= M * Gamma") {
    REQUIRE(model::feasibility_p1(200, 10, 20));
    REQUIRE_FALSE(model::feasibility_p1(201, 10, 20));
    REQUIRE(model::feasibility_p1(1, 1, 1));
    // Large product must not overflow 32-bit arithmetic.
    REQUIRE(model::feasibility_p1(2000000000, 100000, 100000));
}

TEST_CASE("parameter validation rejects bad scalars") {
    SystemParams p = unit_params();
    p.aoi_weight = 1.5;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
    p = unit_params();
    p.beta = -0.5;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
    p = unit_params();
    p.slot_duration_s = 0.0;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
    p = unit_params();
    p.max_aoi = 0;
    REQUIRE_THROWS_AS(p.validate(), std::invalid_argument);
}
