#include "cnnfpga/cluster.hpp"

#include <stdexcept>

namespace cnnfpga {

std::vector<Range> balanced_split(std::int64_t size, std::int64_t parts) {
    if (parts < 1 || parts > size) throw std::invalid_argument("cannot split into empty parts");
    std::vector<Range> out;
    out.reserve(static_cast<std::size_t>(parts));
    const std::int64_t base = size / parts;
    const std::int64_t extra = size % parts;
    std::int64_t at = 0;
    for (std::int64_t i = 0; i < parts; ++i) {
        const std::int64_t len = base + (i < extra ? 1 : 0);
        out.push_back({at, at + len});
        at += len;
    }
    return out;
}

LayerSpec ClusterPlan::node_layer(const ClusterNode& node) const {
    LayerSpec s = layer;
    s.batch = node.batch.size();
    s.rows = node.rows.size();
    s.cols = node.cols.size();
    s.out_channels = static_cast<std::int64_t>(node.ofm_channels.size());
    return s;
}

ClusterPlan build_plan(const LayerSpec& layer, const PartitionScheme& scheme,
                       const AcceleratorDesign& /*design*/) {
    // Validates every factor against its dimension.
    (void)slice_layer(layer, scheme);

    ClusterPlan plan;
    plan.scheme = scheme;
    plan.layer = layer;
    plan.grid_rows = scheme.weight_group();
    plan.grid_cols = scheme.pm;

    const auto batches = balanced_split(layer.batch, scheme.pb);
    const auto rows = balanced_split(layer.rows, scheme.pr);
    const auto cols = balanced_split(layer.cols, scheme.pc);

    plan.nodes.resize(static_cast<std::size_t>(plan.grid_rows * plan.grid_cols));
    for (std::int64_t ib = 0; ib < scheme.pb; ++ib) {
        for (std::int64_t ir = 0; ir < scheme.pr; ++ir) {
            for (std::int64_t ic = 0; ic < scheme.pc; ++ic) {
                const std::int64_t grid_row = (ib * scheme.pr + ir) * scheme.pc + ic;
                for (std::int64_t gc = 0; gc < scheme.pm; ++gc) {
                    auto& n = plan.nodes[static_cast<std::size_t>(plan.node_id(grid_row, gc))];
                    n.id = plan.node_id(grid_row, gc);
                    n.row = grid_row;
                    n.col = gc;
                    n.batch = batches[static_cast<std::size_t>(ib)];
                    n.rows = rows[static_cast<std::size_t>(ir)];
                    n.cols = cols[static_cast<std::size_t>(ic)];
                    for (std::int64_t ch = gc; ch < layer.out_channels; ch += scheme.pm)
                        n.ofm_channels.push_back(ch);
                }
            }
        }
    }

    plan.links.reserve(plan.nodes.size() * 2);
    for (const auto& n : plan.nodes) {
        const std::int64_t right = plan.node_id(n.row, (n.col + 1) % plan.grid_cols);
        const std::int64_t down = plan.node_id((n.row + 1) % plan.grid_rows, n.col);
        plan.links.push_back({n.id, right, LinkKind::Row});
        plan.links.push_back({n.id, down, LinkKind::Column});
    }
    return plan;
}

std::string_view to_string(MoveKind k) {
    switch (k) {
    case MoveKind::NoMove: return "none";
    case MoveKind::BorderExchange: return "border-exchange";
    case MoveKind::InterleaveResolved: return "interleave-resolved";
    case MoveKind::FullShuffle: return "full-shuffle";
    }
    return "?";
}

InterLayerMove classify_interlayer(const PartitionScheme& prev, const PartitionScheme& next,
                                   const LayerSpec& boundary, std::int64_t next_kernel,
                                   Precision precision) {
    const std::int64_t bits = precision.bits();
    if (!(prev == next)) {
        return {MoveKind::FullShuffle, boundary.batch * boundary.out_channels * boundary.rows *
                                           boundary.cols * bits};
    }
    // Each internal cut needs K-1 lines in total, split between its two sides.
    const std::int64_t halo = next_kernel - 1;
    const std::int64_t lines = (next.pr - 1) * boundary.cols + (next.pc - 1) * boundary.rows;
    const std::int64_t border = halo * lines * boundary.out_channels * boundary.batch * bits;
    if (border > 0) return {MoveKind::BorderExchange, border};
    if (next.pm > 1) return {MoveKind::InterleaveResolved, 0};
    return {MoveKind::NoMove, 0};
}

Cycles move_cycles(const InterLayerMove& move, const PlatformSpec& platform) {
    if (move.kind != MoveKind::FullShuffle || platform.shuffle_bw() <= 0) return 0;
    return ceil_div(move.volume_bits, platform.shuffle_bw());
}

TrafficReport plan_traffic(const ClusterPlan& plan, const AcceleratorDesign& design,
                           const PlatformSpec& platform, Cycles lat1) {
    const auto& t = design.tile;
    const std::int64_t bits = design.precision.bits();
    const std::int64_t size_ifm = t.tn * t.tr * t.tc * bits;
    const std::int64_t size_wei = t.tm * t.tn * plan.layer.kernel * plan.layer.kernel * bits;
    const std::int64_t pm = plan.scheme.pm;
    const std::int64_t group = plan.scheme.weight_group();

    TrafficReport report;
    report.loads.reserve(plan.links.size());
    for (const auto& link : plan.links) {
        LinkLoad load{link, 0, 0};
        if (link.kind == LinkKind::Row && pm > 1) {
            load.bits_per_round = ceil_div(size_ifm, pm);
            load.rounds = pm - 1;
        } else if (link.kind == LinkKind::Column && group > 1) {
            load.bits_per_round = ceil_div(size_wei, group);
            load.rounds = group - 1;
        }
        report.loads.push_back(load);
    }
    report.verdict = torus_bandwidth_check(t, plan.layer.kernel, design.precision, plan.scheme,
                                           platform, lat1);
    return report;
}

} // namespace cnnfpga
