#pragma once

// Design-space exploration: exhaustive enumeration of tilings, lane
// assignments and partition schemes, pruned by the compute lower bound.

#include <stdexcept>
#include <string>
#include <vector>

#include "cnnfpga/cluster.hpp"

namespace cnnfpga {

struct SearchSpace {
    Precision precision = Precision::fixed16();
    // Explicit tile candidates; an empty list means "derive from the layers".
    std::vector<std::int64_t> tm, tn, tr, tc;
    // Explicit lane assignments; empty means every (Ip,Wp,Op) filling the bus.
    std::vector<PortConfig> ports;
    // Explicit partition schemes; empty means all schemes with at most
    // max_fpgas nodes that fit every layer.
    std::vector<PartitionScheme> schemes;
    std::int64_t max_fpgas = 1;
    XferMode mode = XferMode::Xfer;
    bool prune = true;
    /// Upper bound on |Tm candidates| * |Tn candidates| and on the Tr/Tc pair.
    std::size_t pair_cap = 4096;
    unsigned workers = 0; // 0 = hardware concurrency
};

struct DesignPoint {
    AcceleratorDesign design;
    XferContext ctx;
    std::vector<LatencyReport> layers; // per layer, on the largest slice
    Cycles total = 0;
    ResourceUsage usage;

    const PartitionScheme& scheme() const { return ctx.scheme; }
};

struct ParetoPoint {
    std::int64_t fpgas = 1;
    Cycles best = 0;
};

struct DseResult {
    DesignPoint best;
    std::vector<ParetoPoint> pareto;      // best latency per node count, ascending
    std::vector<DesignPoint> scheme_best; // best design of every feasible scheme
    std::int64_t explored = 0;            // fully evaluated points
    std::int64_t pruned = 0;              // points cut by the lower bound
    double elapsed_seconds = 0.0;
};

class NoFeasibleDesign : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Distinct values ceil(dim/k), k = 1..dim, ascending. Any other tile size
/// has the same trip count as the smallest of these at or above it and
/// strictly larger buffers, so restricting to them loses no optimum.
std::vector<std::int64_t> tile_candidates(std::int64_t dim);

/// Every (Ip,Wp,Op) >= 1 with bits * (Ip+Wp+Op) == the widest fitting bus.
std::vector<PortConfig> bus_filling_ports(Precision precision, std::int64_t bus_width);

/// All schemes with fpga_count <= max_fpgas whose factors fit every layer.
std::vector<PartitionScheme> enumerate_schemes(std::int64_t max_fpgas,
                                               const std::vector<LayerSpec>& layers);

/// Evaluates one uniform design on every layer. Returns false when the
/// design violates a platform budget or the torus bandwidth constraint.
bool evaluate_design(const std::vector<LayerSpec>& layers, const PlatformSpec& platform,
                     const AcceleratorDesign& design, const XferContext& ctx, DesignPoint& out);

/// Human-readable reasons evaluate_design would reject the design; empty
/// when it is feasible.
std::vector<std::string> design_violations(const std::vector<LayerSpec>& layers,
                                           const PlatformSpec& platform,
                                           const AcceleratorDesign& design,
                                           const XferContext& ctx);

/// Largest clamped tile over the per-node slices of `layers`: the buffers
/// the hardware has to provide.
TileConfig hardware_tile(const TileConfig& tile, const std::vector<LayerSpec>& layers,
                         const PartitionScheme& scheme);

/// Deterministic total order used to pick among equal-latency designs:
/// latency, node count, BRAM, then <Tm,Tn,Tr,Tc,Ip,Wp,Op,Pb,Pr,Pc,Pm>.
bool better(const DesignPoint& a, const DesignPoint& b);

DseResult optimize_layer(const LayerSpec& layer, const PlatformSpec& platform,
                         const SearchSpace& space);

/// One tiling, lane assignment and scheme for all layers, minimizing the
/// summed latency. Tiles are clamped per layer.
DseResult optimize_network_uniform(const std::vector<LayerSpec>& layers,
                                   const PlatformSpec& platform, const SearchSpace& space);

/// Independent optimum for every layer.
std::vector<DseResult> optimize_network_per_layer(const std::vector<LayerSpec>& layers,
                                                  const PlatformSpec& platform,
                                                  const SearchSpace& space);

struct LayerChoice {
    DesignPoint point;
    InterLayerMove move_out; // to the next layer
    Cycles comm = 0;         // move_cycles(move_out)
};

struct LayerSpecificPlan {
    std::vector<LayerChoice> layers;
    Cycles compute = 0;
    Cycles comm = 0;
    Cycles total = 0;
    std::int64_t explored = 0;
    std::int64_t pruned = 0;
    double elapsed_seconds = 0.0;
};

/// Layer-specific designs chained to minimize compute plus inter-layer
/// movement: every layer may take the best design of any of its feasible
/// schemes, and switching schemes costs a full reshuffle of the boundary
/// feature map. Reprogramming between layers is not charged.
LayerSpecificPlan optimize_layer_specific(const std::vector<LayerSpec>& layers,
                                          const PlatformSpec& platform, const SearchSpace& space);

struct ScalePoint {
    std::int64_t fpgas = 1;
    DesignPoint best; // best uniform design using at most `fpgas` nodes
    double speedup = 1.0;
};

struct ScaleStudy {
    std::vector<ScalePoint> curve;
    std::vector<DesignPoint> points; // best design of every explored scheme
    DseResult search;
};

/// `fpga_counts` must be ascending and start at 1.
ScaleStudy scale_study(const std::vector<LayerSpec>& layers, const PlatformSpec& platform,
                       const SearchSpace& space, const std::vector<std::int64_t>& fpga_counts);

} // namespace cnnfpga
