#pragma once

// Partitioning of a layer across an FPGA cluster and the XFER revisions of
// the analytic model, where data shared between partitions is distributed
// over the nodes' memories and exchanged on inter-FPGA links.

#include <string_view>

#include "cnnfpga/model.hpp"

namespace cnnfpga {

enum class PartitionCategory { None, WeightShared, IfmShared, Hybrid };

std::string_view to_string(PartitionCategory c);

/// Partition factors along batch, OFM rows, OFM columns and OFM channels.
/// There is no IFM-channel factor: splitting the reduction dimension would
/// force partial sums to move between off-chip memories.
struct PartitionScheme {
    std::int64_t pb = 1;
    std::int64_t pr = 1;
    std::int64_t pc = 1;
    std::int64_t pm = 1;

    /// Nodes that share one weight slice (one grid column).
    std::int64_t weight_group() const { return pb * pr * pc; }
    std::int64_t fpga_count() const { return pb * pr * pc * pm; }
    PartitionCategory category() const;
    bool valid() const { return pb >= 1 && pr >= 1 && pc >= 1 && pm >= 1; }

    friend bool operator==(const PartitionScheme&, const PartitionScheme&) = default;
};

enum class XferMode {
    Baseline, // shared data replicated, no inter-FPGA traffic
    Xfer,     // shared data distributed and exchanged
};

std::string_view to_string(XferMode m);

struct XferContext {
    PartitionScheme scheme;
    std::int64_t wp_b2b = 1; // link lanes per weight channel
    std::int64_t ip_b2b = 1; // link lanes per IFM channel
    XferMode mode = XferMode::Xfer;

    /// Link lanes sized like the memory lanes they replace.
    static XferContext matching(const PartitionScheme& scheme, const PortConfig& ports,
                                XferMode mode = XferMode::Xfer) {
        return {scheme, ports.wp, ports.ip, mode};
    }
};

/// The largest per-node slice <ceil(B/Pb), ceil(M/Pm), N, ceil(R/Pr), ceil(C/Pc), K>.
/// Throws std::invalid_argument when a factor exceeds its dimension.
LayerSpec slice_layer(const LayerSpec& layer, const PartitionScheme& scheme);

/// Memory-bus and per-channel link latency of one shared tile after XFER.
struct SharedTransfer {
    Cycles mem = 0;
    Cycles link = 0; // per channel; every channel of a group has this latency
    std::int64_t channels = 0;
};

SharedTransfer xfer_weight_shared(const TileConfig& tile, std::int64_t kernel,
                                  const PartitionScheme& scheme, std::int64_t wp,
                                  std::int64_t wp_b2b);

SharedTransfer xfer_ifm_shared(const TileConfig& tile, const PartitionScheme& scheme,
                               std::int64_t ip, std::int64_t ip_b2b);

/// Phase latencies of a node working on `sliced` (already divided by the
/// partition factors) under the given sharing context.
PhaseLatencies xfer_phase_latencies(const LayerSpec& sliced, const AcceleratorDesign& design,
                                    const XferContext& ctx);

/// Latency of one node on an already sliced layer.
LatencyReport latency(const LayerSpec& sliced, const AcceleratorDesign& design,
                      const XferContext& ctx);

/// slice_layer followed by the XFER-aware latency of the largest slice.
LatencyReport xfer_latency(const LayerSpec& layer, const AcceleratorDesign& design,
                           const XferContext& ctx);

struct TorusVerdict {
    double row_bits = 0.0;      // IFM bits leaving a node along its row per trip
    double col_bits = 0.0;      // weight bits leaving a node along its column per trip
    double capacity_bits = 0.0; // interlink bandwidth times Lat1
    /// (row_bits + col_bits) / Lat1: sustained outgoing demand.
    double demand_bits_per_cycle = 0.0;
    bool ok = true;
};

/// Checks that one Lat1 window is long enough to move the shared tiles
/// around the torus: D_row + D_col <= interlink_bw * Lat1. A dimension
/// without sharing contributes nothing.
TorusVerdict torus_bandwidth_check(const TileConfig& tile, std::int64_t kernel,
                                   Precision precision, const PartitionScheme& scheme,
                                   const PlatformSpec& platform, Cycles lat1);

/// Peak per-node link rate while all shared tiles stream at once: every
/// IFM peer on the row and every weight peer on the column receives one
/// element per link lane per cycle.
std::int64_t torus_stream_rate(const PartitionScheme& scheme, Precision precision,
                               std::int64_t ip_b2b, std::int64_t wp_b2b);

} // namespace cnnfpga
