#pragma once

// Discrete-event simulator of the double-buffered accelerator pipeline.
//
// Execution model (lockstep ping-pong):
//   * Inner stages s = 0..T, T = number of innermost trips. Stage s loads
//     trip s into buffer slot s%2 while the PE computes trip s-1 from the
//     other slot. The stage ends when every transaction issued in it has
//     completed.
//   * Consecutive output tiles form periods of ceil(N/Tn) inner stages. At
//     the start of period j the OFM of tile j-1 is drained from its slot
//     while tile j accumulates into the other one; period j+1 starts only
//     after that drain completes.
//   * Fill and drain stages issue fixed-length transactions on an empty
//     slot ("bubbles"), as a fixed-bound HLS dataflow loop does. They are
//     counted in the timeline but not as busy work.
// Transfer durations are derived from buffer volumes and lane widths here,
// independently of the analytic model.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cnnfpga/cluster.hpp"

namespace cnnfpga {

enum class SimPhase : std::uint8_t { LoadIfm, LoadWeight, Compute, StoreOfm, Link };
inline constexpr std::size_t kSimPhaseCount = 5;

std::string_view to_string(SimPhase p);

enum class EventKind : std::uint8_t { LoadIfmDone, LoadWeiDone, ComputeDone, StoreOfmDone, B2bDone };

std::string_view to_string(EventKind k);

struct SimEvent {
    Cycles time = 0;
    std::int64_t node = 0;
    EventKind kind = EventKind::ComputeDone;
    int slot = 0;
    bool bubble = false;
    // Trip indices: batch, spatial, out-channel, in-channel.
    std::int64_t f = 0, e = 0, d = 0, c = 0;
};

struct SimTrace {
    Cycles total_cycles = 0;
    std::array<Cycles, kSimPhaseCount> busy{};   // real transfers / compute
    std::array<Cycles, kSimPhaseCount> bubble{}; // fill/drain transactions
    /// Cycles the pipeline spent waiting on this phase: each stage (or
    /// drain-limited period) is charged to the transaction that ended it.
    std::array<Cycles, kSimPhaseCount> stall{};
    std::int64_t trips = 0;
    std::int64_t output_tiles = 0;
    std::int64_t event_count = 0;
    std::vector<SimEvent> events; // capped, see SimOptions::max_logged_events
    bool log_truncated = false;

    Cycles busy_of(SimPhase p) const { return busy[static_cast<std::size_t>(p)]; }
    Cycles stall_of(SimPhase p) const { return stall[static_cast<std::size_t>(p)]; }
};

struct SimOptions {
    std::int64_t node = 0;
    bool record_events = true;
    std::size_t max_logged_events = 1'000'000;
    /// Outgoing inter-FPGA bandwidth in bits per cycle; 0 = unconstrained.
    std::int64_t link_capacity = 0;
};

/// Raised when the event queue drains before the schedule completes.
class SimulationFault : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Simulates one node. With a context, `layer` is the node's slice
/// (already divided by the partition factors), as for the XFER latency.
SimTrace simulate(const LayerSpec& layer, const AcceleratorDesign& design,
                  const std::optional<XferContext>& ctx = std::nullopt,
                  const SimOptions& options = {});

/// Phase that held the pipeline back the longest (ties: Compute > Link >
/// Weight > IFM > OFM).
Bottleneck stall_attribution(const SimTrace& trace);

struct ClusterLayerTrace {
    std::string layer;
    InterLayerMove move_in; // movement from the previous layer
    std::vector<SimTrace> nodes;
    Cycles cycles = 0; // slowest node
};

struct ClusterTrace {
    std::vector<ClusterLayerTrace> layers;
    std::vector<Cycles> node_totals; // per node, summed over layers
    Cycles total_cycles = 0;
    bool bandwidth_warning = false;
};

/// Runs every node of the plan on its own slice of each layer. Layers are
/// separated by a cluster-wide barrier; border and interleave moves are
/// transmitted during execution and not charged, a full shuffle is charged
/// as move_cycles. Link oversubscription shows up as stalls.
ClusterTrace simulate_cluster(const ClusterPlan& plan, const std::vector<LayerSpec>& layers,
                              const AcceleratorDesign& design, const XferContext& ctx,
                              const PlatformSpec& platform, const SimOptions& options = {});

/// One line per event: time node kind slot bubble f e d c.
void write_event_log(std::ostream& out, const SimTrace& trace);

} // namespace cnnfpga
