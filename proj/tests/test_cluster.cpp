#include <catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "cnnfpga/cluster.hpp"

using namespace cnnfpga;

namespace {

const AcceleratorDesign kDesign{{16, 8, 7, 7}, {4, 8, 4}, Precision::fixed16()};
const PlatformSpec kPlatform{"p", 2520, 1824, 256, 256, 64, 0.0};

void check_degrees(const ClusterPlan& plan) {
    std::map<std::int64_t, int> in, out;
    for (const auto& l : plan.links) {
        ++out[l.from];
        ++in[l.to];
    }
    for (const auto& n : plan.nodes) {
        REQUIRE(in[n.id] == 2);
        REQUIRE(out[n.id] == 2);
    }
}

} // namespace

TEST_CASE("balanced split") {
    const auto parts = balanced_split(27, 4);
    REQUIRE(parts.size() == 4);
    CHECK(parts[0] == Range{0, 7});
    CHECK(parts[3] == Range{21, 27});
    CHECK_THROWS_AS(balanced_split(3, 4), std::invalid_argument);
}

TEST_CASE("3x4 grid") {
    const LayerSpec l{"l", 3, 64, 32, 13, 13, 3};
    const auto plan = build_plan(l, {3, 1, 1, 4}, kDesign);
    CHECK(plan.grid_rows == 3);
    CHECK(plan.grid_cols == 4);
    CHECK(plan.nodes.size() == 12);
    CHECK(plan.links.size() == 24);
    check_degrees(plan);
    // Row links stay in a row, column links in a column.
    for (const auto& link : plan.links) {
        const auto& a = plan.nodes[static_cast<std::size_t>(link.from)];
        const auto& b = plan.nodes[static_cast<std::size_t>(link.to)];
        if (link.kind == LinkKind::Row)
            CHECK(a.row == b.row);
        else
            CHECK(a.col == b.col);
    }
}

TEST_CASE("single node wraps onto itself with no traffic") {
    const LayerSpec l{"l", 1, 8, 8, 8, 8, 3};
    const auto plan = build_plan(l, {}, kDesign);
    REQUIRE(plan.nodes.size() == 1);
    REQUIRE(plan.links.size() == 2);
    for (const auto& link : plan.links) {
        CHECK(link.from == 0);
        CHECK(link.to == 0);
    }
    const auto traffic = plan_traffic(plan, kDesign, kPlatform, 100);
    for (const auto& load : traffic.loads) CHECK(load.total_bits() == 0);
    CHECK(traffic.verdict.ok);
}

TEST_CASE("interleaved channels") {
    const LayerSpec l{"l", 1, 8, 4, 4, 4, 1};
    const auto plan = build_plan(l, {1, 1, 1, 2}, kDesign);
    CHECK(plan.nodes[0].ofm_channels == std::vector<std::int64_t>{0, 2, 4, 6});
    CHECK(plan.nodes[1].ofm_channels == std::vector<std::int64_t>{1, 3, 5, 7});
}

TEST_CASE("factors beyond the layer are rejected") {
    const LayerSpec l{"l", 1, 8, 4, 4, 4, 1};
    CHECK_THROWS_AS(build_plan(l, {2, 1, 1, 1}, kDesign), std::invalid_argument);
    CHECK_THROWS_AS(build_plan(l, {1, 1, 1, 9}, kDesign), std::invalid_argument);
}

TEST_CASE("random grids: torus regularity and a partition of the work") {
    std::mt19937_64 rng(11);
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    for (int i = 0; i < 200; ++i) {
        const LayerSpec l{"l", pick(1, 4), pick(1, 40), 3, pick(1, 20), pick(1, 20), 3};
        const PartitionScheme s{pick(1, l.batch), pick(1, std::min<std::int64_t>(l.rows, 3)),
                                pick(1, std::min<std::int64_t>(l.cols, 3)),
                                pick(1, std::min<std::int64_t>(l.out_channels, 5))};
        const auto plan = build_plan(l, s, kDesign);
        REQUIRE(static_cast<std::int64_t>(plan.nodes.size()) == s.fpga_count());
        REQUIRE(plan.links.size() == 2 * plan.nodes.size());
        check_degrees(plan);

        // Channels within one row partition [0, M); each output element
        // appears on exactly one node.
        for (std::int64_t r = 0; r < plan.grid_rows; ++r) {
            std::set<std::int64_t> seen;
            std::int64_t count = 0;
            for (std::int64_t c = 0; c < plan.grid_cols; ++c) {
                const auto& n = plan.nodes[static_cast<std::size_t>(plan.node_id(r, c))];
                for (auto ch : n.ofm_channels) {
                    REQUIRE(ch % s.pm == c);
                    seen.insert(ch);
                    ++count;
                }
            }
            REQUIRE(count == l.out_channels);
            REQUIRE(static_cast<std::int64_t>(seen.size()) == l.out_channels);
        }
        std::int64_t volume = 0;
        for (const auto& n : plan.nodes) {
            const LayerSpec part = plan.node_layer(n);
            volume += part.batch * part.rows * part.cols * part.out_channels;
            const LayerSpec largest = slice_layer(l, s);
            REQUIRE(part.batch <= largest.batch);
            REQUIRE(part.rows <= largest.rows);
            REQUIRE(part.cols <= largest.cols);
            REQUIRE(part.out_channels <= largest.out_channels);
        }
        REQUIRE(volume == l.batch * l.rows * l.cols * l.out_channels);
    }
}

TEST_CASE("inter-layer moves") {
    const LayerSpec boundary{"b", 2, 64, 32, 16, 16, 3};
    const Precision p = Precision::fixed16();
    SECTION("batch split to batch split") {
        const auto m = classify_interlayer({2, 1, 1, 1}, {2, 1, 1, 1}, boundary, 3, p);
        CHECK(m.kind == MoveKind::NoMove);
        CHECK(m.volume_bits == 0);
    }
    SECTION("interleaved channels stay in place") {
        const auto m = classify_interlayer({1, 1, 1, 2}, {1, 1, 1, 2}, boundary, 3, p);
        CHECK(m.kind == MoveKind::InterleaveResolved);
        CHECK(m.volume_bits == 0);
    }
    SECTION("rows to channels reshuffles everything") {
        const auto m = classify_interlayer({1, 2, 1, 1}, {1, 1, 1, 2}, boundary, 3, p);
        CHECK(m.kind == MoveKind::FullShuffle);
        CHECK(m.volume_bits == 2 * 64 * 16 * 16 * 16);
    }
    SECTION("row split exchanges borders") {
        const auto m = classify_interlayer({1, 2, 1, 1}, {1, 2, 1, 1}, boundary, 3, p);
        CHECK(m.kind == MoveKind::BorderExchange);
        // K-1 = 2 lines of C=16 pixels over 64 channels and 2 images.
        CHECK(m.volume_bits == 2 * 16 * 64 * 2 * 16);
    }
    SECTION("1x1 kernels need no border") {
        const auto m = classify_interlayer({1, 2, 1, 1}, {1, 2, 1, 1}, boundary, 1, p);
        CHECK(m.kind == MoveKind::NoMove);
    }
}

TEST_CASE("move cost") {
    PlatformSpec p = kPlatform;
    CHECK(move_cycles({MoveKind::FullShuffle, 6400}, p) == 100);
    CHECK(move_cycles({MoveKind::BorderExchange, 6400}, p) == 0);
    p.port_bw = 0;
    CHECK(move_cycles({MoveKind::FullShuffle, 6400}, p) == 25);
}

TEST_CASE("traffic is balanced over rows and columns") {
    const LayerSpec l{"l", 4, 64, 32, 16, 16, 3};
    const PartitionScheme s{2, 2, 1, 4};
    const auto plan = build_plan(l, s, kDesign);
    const auto t = plan_traffic(plan, kDesign, kPlatform, 10000);
    const std::int64_t size_i = 8 * 7 * 7 * 16;
    const std::int64_t size_w = 16 * 8 * 9 * 16;
    for (const auto& load : t.loads) {
        if (load.link.kind == LinkKind::Row) {
            CHECK(load.bits_per_round == size_i / 4);
            CHECK(load.rounds == 3);
        } else {
            CHECK(load.bits_per_round == size_w / 4);
            CHECK(load.rounds == 3);
        }
    }
    CHECK(t.verdict.ok);
}
