#pragma once

// Concrete cluster layout for a partition scheme: a Pm-column by
// (Pb*Pr*Pc)-row array of nodes wired as a 2D torus. Columns exchange
// weights, rows exchange IFM tiles.

#include <string_view>
#include <vector>

#include "cnnfpga/xfer.hpp"

namespace cnnfpga {

/// Half-open index range [begin, end).
struct Range {
    std::int64_t begin = 0;
    std::int64_t end = 0;
    std::int64_t size() const { return end - begin; }
    friend bool operator==(const Range&, const Range&) = default;
};

struct ClusterNode {
    std::int64_t id = 0;
    std::int64_t row = 0; // grid row, batch-major then row then column part
    std::int64_t col = 0; // grid column, the OFM-channel part
    Range batch;
    Range rows;
    Range cols;
    std::vector<std::int64_t> ofm_channels; // interleaved: c % Pm == col
};

enum class LinkKind {
    Row,    // carries IFM slices between nodes of one grid row
    Column, // carries weight slices between nodes of one grid column
};

struct ClusterLink {
    std::int64_t from = 0;
    std::int64_t to = 0;
    LinkKind kind = LinkKind::Row;
};

struct ClusterPlan {
    PartitionScheme scheme;
    LayerSpec layer;
    std::int64_t grid_rows = 1; // Pb*Pr*Pc
    std::int64_t grid_cols = 1; // Pm
    std::vector<ClusterNode> nodes;
    std::vector<ClusterLink> links;

    std::int64_t node_id(std::int64_t row, std::int64_t col) const { return row * grid_cols + col; }
    /// The node's own slice of the layer (not the largest slice).
    LayerSpec node_layer(const ClusterNode& node) const;
};

/// Splits `size` into `parts` contiguous ranges whose sizes differ by at
/// most one, larger ranges first.
std::vector<Range> balanced_split(std::int64_t size, std::int64_t parts);

/// Throws std::invalid_argument when a factor exceeds its dimension.
ClusterPlan build_plan(const LayerSpec& layer, const PartitionScheme& scheme,
                       const AcceleratorDesign& design);

enum class MoveKind { NoMove, BorderExchange, InterleaveResolved, FullShuffle };

std::string_view to_string(MoveKind k);

struct InterLayerMove {
    MoveKind kind = MoveKind::NoMove;
    std::int64_t volume_bits = 0;
};

/// Data movement needed between two consecutive layers. `boundary` is the
/// producing layer (its OFM is the next layer's IFM). Row/column cuts need
/// a (K_next - 1)-line halo per cut; interleaved channel splits need
/// nothing; differing schemes reshuffle the whole OFM.
InterLayerMove classify_interlayer(const PartitionScheme& prev, const PartitionScheme& next,
                                   const LayerSpec& boundary, std::int64_t next_kernel,
                                   Precision precision);

struct LinkLoad {
    ClusterLink link;
    std::int64_t bits_per_round = 0;
    std::int64_t rounds = 0;
    std::int64_t total_bits() const { return bits_per_round * rounds; }
};

struct TrafficReport {
    std::vector<LinkLoad> loads; // one per plan link, same order
    TorusVerdict verdict;
};

/// Cycles a move keeps the cluster waiting between layers. Border and
/// interleave moves overlap execution; a full shuffle funnels the whole
/// OFM through one inter-FPGA port.
Cycles move_cycles(const InterLayerMove& move, const PlatformSpec& platform);

/// Per-link traffic of one XFER trip. Row links forward Pm-1 IFM slices of
/// sizeI/Pm bits; column links forward group-1 weight slices of
/// sizeW/group bits.
TrafficReport plan_traffic(const ClusterPlan& plan, const AcceleratorDesign& design,
                           const PlatformSpec& platform, Cycles lat1);

} // namespace cnnfpga
