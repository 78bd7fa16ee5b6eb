#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "cnnfpga/sim.hpp"
#include "oracle.hpp"

using namespace cnnfpga;

namespace {

const LayerSpec kConv5{"conv5", 1, 256, 192, 13, 13, 3};
const PlatformSpec kPlatform{"p", 2520, 1824, 256, 256, 64, 0.0};

SimOptions quiet() {
    SimOptions o;
    o.record_events = false;
    return o;
}

} // namespace

TEST_CASE("single trip") {
    const LayerSpec l{"one", 1, 4, 4, 4, 4, 3};
    const AcceleratorDesign d{{4, 4, 4, 4}, {2, 2, 2}, Precision::fixed16()};
    const auto t = simulate(l, d);
    // Fill stage bounded by the 72-cycle weight load, but the bubble
    // compute holds it to 144; then one compute stage and a 32-cycle drain.
    CHECK(t.trips == 1);
    CHECK(t.total_cycles == 144 + 144 + 32);
    CHECK(t.total_cycles == latency(l, d).lat);
}

TEST_CASE("matches the model on fixed designs") {
    const AcceleratorDesign a{{8, 32, 13, 13}, {2, 2, 2}, Precision::float32()};
    const AcceleratorDesign c{{64, 20, 7, 13}, {4, 8, 4}, Precision::fixed16()};
    for (const auto& d : {a, c}) {
        const auto t = simulate(kConv5, d, std::nullopt, quiet());
        const auto m = latency(kConv5, d);
        CHECK(t.total_cycles == m.lat);
        CHECK(stall_attribution(t) == m.bottleneck);
    }
}

TEST_CASE("XFER node matches the model") {
    const AcceleratorDesign d{{64, 20, 7, 13}, {4, 8, 4}, Precision::fixed16()};
    const PartitionScheme s{1, 2, 1, 1};
    const auto ctx = XferContext::matching(s, d.ports);
    const LayerSpec slice = slice_layer(kConv5, s);
    const auto t = simulate(slice, d, ctx, quiet());
    const auto m = latency(slice, d, ctx);
    CHECK(t.total_cycles == m.lat);
    CHECK(stall_attribution(t) == Bottleneck::ComputeBound);
}

TEST_CASE("random instances: simulator equals model and conserves work") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 500; ++i) {
        const auto p = i % 2 ? Precision::fixed16() : Precision::float32();
        auto in = oracle::random_instance(rng, p);
        const bool xfer = i % 3 != 0;
        const auto ctx = XferContext::matching(in.scheme, in.design.ports,
                                               xfer ? XferMode::Xfer : XferMode::Baseline);
        const LayerSpec s = oracle::slice(in.layer, in.scheme);
        const auto t = simulate(s, in.design, ctx, quiet());
        const auto ph = oracle::phases(s, in.design, in.scheme, xfer, ctx.ip_b2b, ctx.wp_b2b);
        INFO("instance " << i);
        REQUIRE(t.total_cycles == oracle::latency(s, in.design, ph));

        const std::int64_t trips = oracle::up(s.in_channels, in.design.tile.tn) * s.batch *
                                   oracle::up(s.rows, in.design.tile.tr) *
                                   oracle::up(s.cols, in.design.tile.tc) *
                                   oracle::up(s.out_channels, in.design.tile.tm);
        const std::int64_t tiles = trips / oracle::up(s.in_channels, in.design.tile.tn);
        REQUIRE(t.trips == trips);
        REQUIRE(t.busy_of(SimPhase::Compute) == trips * ph.tc);
        REQUIRE(t.busy_of(SimPhase::LoadIfm) == trips * ph.ti);
        REQUIRE(t.busy_of(SimPhase::LoadWeight) == trips * ph.tw);
        REQUIRE(t.busy_of(SimPhase::StoreOfm) == tiles * ph.to);
        REQUIRE(t.busy_of(SimPhase::Link) == trips * ph.link);

        Cycles stalls = 0;
        for (auto c : t.stall) stalls += c;
        REQUIRE(stalls == t.total_cycles);
    }
}

TEST_CASE("event log") {
    const LayerSpec l{"small", 2, 8, 6, 5, 5, 3};
    const AcceleratorDesign d{{4, 3, 3, 5}, {2, 4, 2}, Precision::fixed16()};
    const auto t = simulate(l, d);
    REQUIRE_FALSE(t.events.empty());
    CHECK(t.events.back().time == t.total_cycles);
    CHECK(t.events.back().kind == EventKind::StoreOfmDone);
    CHECK(static_cast<std::int64_t>(t.events.size()) == t.event_count);
    for (std::size_t i = 1; i < t.events.size(); ++i)
        REQUIRE(t.events[i - 1].time <= t.events[i].time);

    std::int64_t real_computes = 0;
    for (const auto& e : t.events)
        if (e.kind == EventKind::ComputeDone && !e.bubble) ++real_computes;
    CHECK(real_computes == t.trips);

    std::ostringstream out;
    write_event_log(out, t);
    std::istringstream lines(out.str());
    std::string line, last;
    while (std::getline(lines, line)) last = line;
    CHECK(last.rfind(std::to_string(t.total_cycles) + " 0 StoreOfmDone", 0) == 0);
}

TEST_CASE("event cap") {
    const AcceleratorDesign d{{8, 8, 13, 13}, {4, 8, 4}, Precision::fixed16()};
    SimOptions o;
    o.max_logged_events = 10;
    const auto t = simulate(kConv5, d, std::nullopt, o);
    CHECK(t.events.size() == 10);
    CHECK(t.log_truncated);
    CHECK(t.event_count > 10);
}

TEST_CASE("infeasible design is refused") {
    const AcceleratorDesign d{{0, 1, 1, 1}, {1, 1, 1}, Precision::fixed16()};
    CHECK_THROWS_AS(simulate(kConv5, d), InfeasibleDesign);
}

TEST_CASE("stall attribution ties favour compute") {
    SimTrace t;
    CHECK(stall_attribution(t) == Bottleneck::ComputeBound);
    t.stall[static_cast<std::size_t>(SimPhase::LoadIfm)] = 5;
    t.stall[static_cast<std::size_t>(SimPhase::LoadWeight)] = 5;
    CHECK(stall_attribution(t) == Bottleneck::WeightBound);
}

TEST_CASE("a tight link shows up as link stalls") {
    const LayerSpec l{"l", 1, 64, 64, 8, 8, 3};
    const AcceleratorDesign d{{16, 16, 8, 8}, {8, 8, 8}, Precision::fixed16()};
    const PartitionScheme s{1, 1, 1, 4};
    const auto ctx = XferContext::matching(s, d.ports);
    SimOptions o = quiet();
    o.link_capacity = 1;
    const auto t = simulate(slice_layer(l, s), d, ctx, o);
    CHECK(stall_attribution(t) == Bottleneck::LinkBound);
    CHECK(t.total_cycles > latency(slice_layer(l, s), d, ctx).lat);
}

TEST_CASE("cluster simulation") {
    const std::vector<LayerSpec> layers{{"a", 2, 32, 16, 12, 12, 3}, {"b", 2, 32, 32, 12, 12, 3}};
    const AcceleratorDesign d{{16, 16, 6, 12}, {4, 8, 4}, Precision::fixed16()};
    const PartitionScheme s{1, 2, 1, 2};
    const auto plan = build_plan(layers[0], s, d);
    const auto ctx = XferContext::matching(s, d.ports);
    const auto t = simulate_cluster(plan, layers, d, ctx, kPlatform, quiet());
    REQUIRE(t.layers.size() == 2);
    REQUIRE(t.node_totals.size() == 4);
    CHECK(t.layers[1].move_in.kind == MoveKind::BorderExchange);
    Cycles sum = 0;
    for (const auto& lt : t.layers) {
        REQUIRE(lt.nodes.size() == 4);
        sum += lt.cycles;
        // Every node here gets an equal slice, so each matches the model.
        const LayerSpec slice = slice_layer(layers[static_cast<std::size_t>(&lt - &t.layers[0])], s);
        for (const auto& n : lt.nodes) CHECK(n.total_cycles == latency(slice, d, ctx).lat);
    }
    CHECK(sum == t.total_cycles);
    CHECK_FALSE(t.bandwidth_warning);
}
