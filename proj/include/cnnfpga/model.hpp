#pragma once

// Analytic model of a single-FPGA tiled convolution accelerator: resource
// usage, per-trip phase latencies, trip counts, whole-layer latency and
// bottleneck classification.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cnnfpga {

using Cycles = std::int64_t;

/// Ceiling division for non-negative numerators and positive denominators.
constexpr std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
    return (num + den - 1) / den;
}

/// One convolution layer <B,M,N,R,C,K>. R and C are output dimensions, so
/// strided layers are described by their output size.
struct LayerSpec {
    std::string name;
    std::int64_t batch = 1;        // B
    std::int64_t out_channels = 1; // M
    std::int64_t in_channels = 1;  // N
    std::int64_t rows = 1;         // R
    std::int64_t cols = 1;         // C
    std::int64_t kernel = 1;       // K

    bool valid() const {
        return batch >= 1 && out_channels >= 1 && in_channels >= 1 && rows >= 1 &&
               cols >= 1 && kernel >= 1;
    }
    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

enum class PrecisionKind { Float32, Fixed16 };

class Precision {
  public:
    constexpr Precision() = default;
    constexpr explicit Precision(PrecisionKind kind) : kind_(kind) {}

    static constexpr Precision float32() { return Precision(PrecisionKind::Float32); }
    static constexpr Precision fixed16() { return Precision(PrecisionKind::Fixed16); }

    constexpr PrecisionKind kind() const { return kind_; }
    constexpr int bits() const { return kind_ == PrecisionKind::Float32 ? 32 : 16; }
    /// A 32-bit float MAC consumes five DSP slices, a 16-bit fixed MAC one.
    constexpr int dsp_per_mac() const { return kind_ == PrecisionKind::Float32 ? 5 : 1; }

    friend constexpr bool operator==(Precision, Precision) = default;

  private:
    PrecisionKind kind_ = PrecisionKind::Fixed16;
};

std::string_view to_string(Precision p);
/// Accepts "float32" / "fixed16" (case-insensitive); throws std::invalid_argument.
Precision parse_precision(std::string_view text);

struct TileConfig {
    std::int64_t tm = 1; // OFM channels per tile
    std::int64_t tn = 1; // IFM channels per tile
    std::int64_t tr = 1; // OFM rows per tile
    std::int64_t tc = 1; // OFM columns per tile
    friend bool operator==(const TileConfig&, const TileConfig&) = default;
};

/// Parallel memory-bus lanes; one lane moves one element per cycle.
struct PortConfig {
    std::int64_t ip = 1;
    std::int64_t wp = 1;
    std::int64_t op = 1;
    std::int64_t total() const { return ip + wp + op; }
    friend bool operator==(const PortConfig&, const PortConfig&) = default;
};

struct PlatformSpec {
    std::string name;
    std::int64_t dsp_budget = 1;
    std::int64_t bram_budget = 1;  // 18Kb blocks
    std::int64_t bus_width = 1;    // bits
    std::int64_t interlink_bw = 1; // bits per cycle, one direction
    std::int64_t port_bw = 0;      // one inter-FPGA port; 0 means interlink_bw
    double freq_mhz = 0.0;         // 0 means "use the precision default"

    std::int64_t shuffle_bw() const { return port_bw > 0 ? port_bw : interlink_bw; }
    bool valid() const {
        return dsp_budget >= 1 && bram_budget >= 1 && bus_width >= 1 && interlink_bw >= 0;
    }
};

struct AcceleratorDesign {
    TileConfig tile;
    PortConfig ports;
    Precision precision;
    friend bool operator==(const AcceleratorDesign&, const AcceleratorDesign&) = default;
};

struct ResourceUsage {
    std::int64_t dsps = 0;
    std::int64_t bram_ifm = 0;
    std::int64_t bram_ofm = 0;
    std::int64_t bram_wei = 0;
    std::int64_t bus_bits = 0;
    std::int64_t bram_total() const { return bram_ifm + bram_ofm + bram_wei; }
};

enum class Bottleneck { OfmBound, IfmBound, WeightBound, ComputeBound, LinkBound };

std::string_view to_string(Bottleneck b);

/// Loop trip counts of the tiled loop nest, innermost first.
struct TripCounts {
    std::int64_t in_channel = 1;  // ceil(N/Tn)
    std::int64_t out_channel = 1; // ceil(M/Tm)
    std::int64_t spatial = 1;     // ceil(R/Tr) * ceil(C/Tc)
    std::int64_t batch = 1;       // B

    /// Number of output tiles the accelerator produces.
    std::int64_t output_tiles() const { return batch * spatial * out_channel; }
    /// Number of innermost pipeline trips.
    std::int64_t total() const { return output_tiles() * in_channel; }
    friend bool operator==(const TripCounts&, const TripCounts&) = default;
};

/// Per-trip phase latencies in cycles.
struct PhaseLatencies {
    Cycles ifm = 0;     // tI_mem
    Cycles weight = 0;  // tW_mem
    Cycles ofm = 0;     // tO_mem
    Cycles compute = 0; // tComp
    Cycles link = 0;    // slowest inter-FPGA channel; 0 without XFER
};

struct LatencyReport {
    PhaseLatencies phases;
    Cycles lat1 = 0; // one innermost trip
    Cycles lat2 = 0; // one output tile
    Cycles lat = 0;  // whole layer
    TripCounts trips;
    Bottleneck bottleneck = Bottleneck::ComputeBound;
    ResourceUsage usage;
};

enum class ViolationKind { TileBounds, Ports, Dsp, Bram, Bus };

struct Violation {
    ViolationKind kind;
    std::int64_t used = 0;
    std::int64_t limit = 0;
    std::string message;
};

struct ResourceVerdict {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(ViolationKind kind) const;
};

/// Thrown when a latency query is made for a design that does not fit.
class InfeasibleDesign : public std::runtime_error {
  public:
    explicit InfeasibleDesign(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

  private:
    std::vector<Violation> violations_;
};

inline constexpr std::int64_t kBramBlockBits = 18 * 1024;

std::int64_t dsp_usage(const TileConfig& tile, Precision precision);

/// Double-buffered BRAM usage; only the bram_* fields are filled.
ResourceUsage bram_usage(const TileConfig& tile, std::int64_t kernel, Precision precision);

/// DSPs, BRAM and bus width of a design whose weight buffers hold a
/// kernel x kernel window.
ResourceUsage resource_usage(const AcceleratorDesign& design, std::int64_t kernel);

/// Tile-vs-layer bounds and lane counts only; no platform budgets.
ResourceVerdict structural_check(const AcceleratorDesign& design, const LayerSpec& layer);

ResourceVerdict resource_check(const AcceleratorDesign& design, const LayerSpec& layer,
                               const PlatformSpec& platform);

TripCounts trip_counts(const LayerSpec& layer, const TileConfig& tile);

PhaseLatencies phase_latencies(const LayerSpec& layer, const AcceleratorDesign& design);

/// Lat1/Lat2/Lat and the bottleneck from already computed phases. This is
/// the shared tail of the single-FPGA and XFER latency paths.
LatencyReport assemble_report(const LayerSpec& layer, const AcceleratorDesign& design,
                              const PhaseLatencies& phases);

/// Throws InfeasibleDesign when the tile does not fit the layer.
LatencyReport latency(const LayerSpec& layer, const AcceleratorDesign& design);

/// Same, but also rejects designs that exceed the platform budgets.
LatencyReport latency(const LayerSpec& layer, const AcceleratorDesign& design,
                      const PlatformSpec& platform);

Bottleneck classify_bottleneck(const LatencyReport& report);

/// Each tile dimension clamped to the layer dimension it tiles.
TileConfig clamp_tile(const TileConfig& tile, const LayerSpec& layer);

} // namespace cnnfpga
