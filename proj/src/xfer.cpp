#include "cnnfpga/xfer.hpp"

#include <algorithm>
#include <sstream>

namespace cnnfpga {

std::string_view to_string(PartitionCategory c) {
    switch (c) {
    case PartitionCategory::None: return "none";
    case PartitionCategory::WeightShared: return "weight-shared";
    case PartitionCategory::IfmShared: return "ifm-shared";
    case PartitionCategory::Hybrid: return "hybrid";
    }
    return "?";
}

std::string_view to_string(XferMode m) { return m == XferMode::Xfer ? "xfer" : "baseline"; }

PartitionCategory PartitionScheme::category() const {
    const bool weights = weight_group() > 1;
    const bool ifm = pm > 1;
    if (weights && ifm) return PartitionCategory::Hybrid;
    if (weights) return PartitionCategory::WeightShared;
    if (ifm) return PartitionCategory::IfmShared;
    return PartitionCategory::None;
}

namespace {

std::int64_t split(const char* factor, std::int64_t parts, const char* dim, std::int64_t size) {
    if (parts < 1 || parts > size) {
        std::ostringstream msg;
        msg << "partition factor " << factor << "=" << parts << " does not fit " << dim << "="
            << size;
        throw std::invalid_argument(msg.str());
    }
    return ceil_div(size, parts);
}

} // namespace

LayerSpec slice_layer(const LayerSpec& layer, const PartitionScheme& scheme) {
    LayerSpec s = layer;
    s.batch = split("Pb", scheme.pb, "B", layer.batch);
    s.out_channels = split("Pm", scheme.pm, "M", layer.out_channels);
    s.rows = split("Pr", scheme.pr, "R", layer.rows);
    s.cols = split("Pc", scheme.pc, "C", layer.cols);
    return s;
}

SharedTransfer xfer_weight_shared(const TileConfig& tile, std::int64_t kernel,
                                  const PartitionScheme& scheme, std::int64_t wp,
                                  std::int64_t wp_b2b) {
    const std::int64_t group = scheme.weight_group();
    const std::int64_t volume = tile.tm * tile.tn * kernel * kernel;
    SharedTransfer t;
    t.mem = ceil_div(volume, wp * group);
    t.channels = group - 1;
    t.link = t.channels > 0 ? ceil_div(volume, wp_b2b * group) : 0;
    return t;
}

SharedTransfer xfer_ifm_shared(const TileConfig& tile, const PartitionScheme& scheme,
                               std::int64_t ip, std::int64_t ip_b2b) {
    const std::int64_t volume = tile.tn * tile.tr * tile.tc;
    SharedTransfer t;
    t.mem = ceil_div(volume, ip * scheme.pm);
    t.channels = scheme.pm - 1;
    t.link = t.channels > 0 ? ceil_div(volume, ip_b2b * scheme.pm) : 0;
    return t;
}

PhaseLatencies xfer_phase_latencies(const LayerSpec& sliced, const AcceleratorDesign& design,
                                    const XferContext& ctx) {
    PhaseLatencies ph = phase_latencies(sliced, design);
    if (ctx.mode == XferMode::Baseline) return ph;
    const auto& scheme = ctx.scheme;
    if (scheme.weight_group() > 1) {
        if (ctx.wp_b2b < 1) throw std::invalid_argument("weight link lanes must be >= 1");
        const auto w = xfer_weight_shared(design.tile, sliced.kernel, scheme, design.ports.wp,
                                          ctx.wp_b2b);
        ph.weight = w.mem;
        ph.link = std::max(ph.link, w.link);
    }
    if (scheme.pm > 1) {
        if (ctx.ip_b2b < 1) throw std::invalid_argument("IFM link lanes must be >= 1");
        const auto i = xfer_ifm_shared(design.tile, scheme, design.ports.ip, ctx.ip_b2b);
        ph.ifm = i.mem;
        ph.link = std::max(ph.link, i.link);
    }
    return ph;
}

LatencyReport latency(const LayerSpec& sliced, const AcceleratorDesign& design,
                      const XferContext& ctx) {
    if (auto v = structural_check(design, sliced); !v.ok()) throw InfeasibleDesign(v.violations);
    return assemble_report(sliced, design, xfer_phase_latencies(sliced, design, ctx));
}

LatencyReport xfer_latency(const LayerSpec& layer, const AcceleratorDesign& design,
                           const XferContext& ctx) {
    return latency(slice_layer(layer, ctx.scheme), design, ctx);
}

__extension__ typedef __int128 Wide;

TorusVerdict torus_bandwidth_check(const TileConfig& tile, std::int64_t kernel,
                                   Precision precision, const PartitionScheme& scheme,
                                   const PlatformSpec& platform, Cycles lat1) {
    const std::int64_t bits = precision.bits();
    const std::int64_t size_ifm = tile.tn * tile.tr * tile.tc * bits;
    const std::int64_t size_wei = tile.tm * tile.tn * kernel * kernel * bits;
    const std::int64_t pm = scheme.pm;
    const std::int64_t group = scheme.weight_group();

    TorusVerdict v;
    v.row_bits = static_cast<double>((pm - 1) * size_ifm) / static_cast<double>(pm);
    v.col_bits = static_cast<double>((group - 1) * size_wei) / static_cast<double>(group);
    v.capacity_bits = static_cast<double>(platform.interlink_bw) * static_cast<double>(lat1);
    if (lat1 > 0) v.demand_bits_per_cycle = (v.row_bits + v.col_bits) / static_cast<double>(lat1);

    // Exact form of row + col <= NB * Lat1 with both sides scaled by pm * group.
    const Wide lhs = static_cast<Wide>((pm - 1) * size_ifm) * group +
                     static_cast<Wide>((group - 1) * size_wei) * pm;
    const Wide rhs = static_cast<Wide>(platform.interlink_bw) * lat1 * pm * group;
    v.ok = lhs <= rhs;
    return v;
}

std::int64_t torus_stream_rate(const PartitionScheme& scheme, Precision precision,
                               std::int64_t ip_b2b, std::int64_t wp_b2b) {
    return precision.bits() * ((scheme.pm - 1) * ip_b2b + (scheme.weight_group() - 1) * wp_b2b);
}

} // namespace cnnfpga
