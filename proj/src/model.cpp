#include "cnnfpga/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace cnnfpga {

std::string_view to_string(Precision p) {
    return p.kind() == PrecisionKind::Float32 ? "float32" : "fixed16";
}

Precision parse_precision(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "float32" || lower == "fp32" || lower == "float")
        return Precision::float32();
    if (lower == "fixed16" || lower == "int16" || lower == "fixed")
        return Precision::fixed16();
    throw std::invalid_argument("unknown precision '" + std::string(text) +
                                "' (expected float32 or fixed16)");
}

std::string_view to_string(Bottleneck b) {
    switch (b) {
    case Bottleneck::OfmBound: return "OFM";
    case Bottleneck::IfmBound: return "IFM";
    case Bottleneck::WeightBound: return "Weight";
    case Bottleneck::ComputeBound: return "Compute";
    case Bottleneck::LinkBound: return "Link";
    }
    return "?";
}

bool ResourceVerdict::has(ViolationKind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

namespace {

std::string join_messages(const std::vector<Violation>& violations) {
    std::string out = "infeasible design:";
    for (const auto& v : violations) out += " [" + v.message + "]";
    return out;
}

void check_dim(std::vector<Violation>& out, const char* name, std::int64_t tile,
               std::int64_t dim) {
    if (tile < 1 || tile > dim) {
        std::ostringstream msg;
        msg << name << "=" << tile << " outside [1, " << dim << "]";
        out.push_back({ViolationKind::TileBounds, tile, dim, msg.str()});
    }
}

} // namespace

InfeasibleDesign::InfeasibleDesign(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

std::int64_t dsp_usage(const TileConfig& tile, Precision precision) {
    return precision.dsp_per_mac() * tile.tm * tile.tn;
}

ResourceUsage bram_usage(const TileConfig& tile, std::int64_t kernel, Precision precision) {
    const std::int64_t bits = precision.bits();
    const std::int64_t plane = ceil_div(tile.tr * tile.tc * bits, kBramBlockBits);
    const std::int64_t window = ceil_div(kernel * kernel * bits, kBramBlockBits);
    ResourceUsage u;
    // Factor 2: every buffer is double-buffered.
    u.bram_ifm = 2 * tile.tn * plane;
    u.bram_ofm = 2 * tile.tm * plane;
    u.bram_wei = 2 * tile.tm * tile.tn * window;
    return u;
}

ResourceUsage resource_usage(const AcceleratorDesign& design, std::int64_t kernel) {
    ResourceUsage u = bram_usage(design.tile, kernel, design.precision);
    u.dsps = dsp_usage(design.tile, design.precision);
    u.bus_bits = design.precision.bits() * design.ports.total();
    return u;
}

ResourceVerdict structural_check(const AcceleratorDesign& design, const LayerSpec& layer) {
    ResourceVerdict verdict;
    check_dim(verdict.violations, "Tm", design.tile.tm, layer.out_channels);
    check_dim(verdict.violations, "Tn", design.tile.tn, layer.in_channels);
    check_dim(verdict.violations, "Tr", design.tile.tr, layer.rows);
    check_dim(verdict.violations, "Tc", design.tile.tc, layer.cols);
    const auto& p = design.ports;
    if (p.ip < 1 || p.wp < 1 || p.op < 1) {
        verdict.violations.push_back(
            {ViolationKind::Ports, std::min({p.ip, p.wp, p.op}), 1, "every lane count must be >= 1"});
    }
    return verdict;
}

ResourceVerdict resource_check(const AcceleratorDesign& design, const LayerSpec& layer,
                               const PlatformSpec& platform) {
    ResourceVerdict verdict = structural_check(design, layer);
    const ResourceUsage u = resource_usage(design, layer.kernel);
    auto over = [&](ViolationKind kind, const char* what, std::int64_t used, std::int64_t limit) {
        if (used <= limit) return;
        std::ostringstream msg;
        msg << what << " " << used << " exceeds budget " << limit;
        verdict.violations.push_back({kind, used, limit, msg.str()});
    };
    over(ViolationKind::Dsp, "DSP usage", u.dsps, platform.dsp_budget);
    over(ViolationKind::Bram, "BRAM usage", u.bram_total(), platform.bram_budget);
    over(ViolationKind::Bus, "bus width", u.bus_bits, platform.bus_width);
    return verdict;
}

TripCounts trip_counts(const LayerSpec& layer, const TileConfig& tile) {
    TripCounts t;
    t.in_channel = ceil_div(layer.in_channels, tile.tn);
    t.out_channel = ceil_div(layer.out_channels, tile.tm);
    t.spatial = ceil_div(layer.cols, tile.tc) * ceil_div(layer.rows, tile.tr);
    t.batch = layer.batch;
    return t;
}

PhaseLatencies phase_latencies(const LayerSpec& layer, const AcceleratorDesign& design) {
    const auto& t = design.tile;
    const auto& p = design.ports;
    const std::int64_t k2 = layer.kernel * layer.kernel;
    PhaseLatencies ph;
    ph.ifm = ceil_div(t.tn * t.tr * t.tc, p.ip);
    ph.weight = ceil_div(t.tm * t.tn * k2, p.wp);
    ph.ofm = ceil_div(t.tm * t.tr * t.tc, p.op);
    ph.compute = k2 * t.tr * t.tc;
    return ph;
}

LatencyReport assemble_report(const LayerSpec& layer, const AcceleratorDesign& design,
                              const PhaseLatencies& phases) {
    LatencyReport r;
    r.phases = phases;
    r.trips = trip_counts(layer, design.tile);
    r.lat1 = std::max({phases.compute, phases.ifm, phases.weight, phases.link});
    r.lat2 = std::max(r.trips.in_channel * r.lat1, phases.ofm);
    r.lat = r.trips.output_tiles() * r.lat2 + (phases.ofm + r.lat1);
    r.bottleneck = classify_bottleneck(r);
    r.usage = resource_usage(design, layer.kernel);
    return r;
}

LatencyReport latency(const LayerSpec& layer, const AcceleratorDesign& design) {
    if (auto v = structural_check(design, layer); !v.ok()) throw InfeasibleDesign(v.violations);
    return assemble_report(layer, design, phase_latencies(layer, design));
}

LatencyReport latency(const LayerSpec& layer, const AcceleratorDesign& design,
                      const PlatformSpec& platform) {
    if (auto v = resource_check(design, layer, platform); !v.ok())
        throw InfeasibleDesign(v.violations);
    return assemble_report(layer, design, phase_latencies(layer, design));
}

Bottleneck classify_bottleneck(const LatencyReport& report) {
    const auto& ph = report.phases;
    if (ph.ofm > report.trips.in_channel * report.lat1) return Bottleneck::OfmBound;
    // Ties resolve Compute > Link > Weight > Ifm.
    if (ph.compute == report.lat1) return Bottleneck::ComputeBound;
    if (ph.link == report.lat1) return Bottleneck::LinkBound;
    if (ph.weight == report.lat1) return Bottleneck::WeightBound;
    return Bottleneck::IfmBound;
}

TileConfig clamp_tile(const TileConfig& tile, const LayerSpec& layer) {
    return {std::min(tile.tm, layer.out_channels), std::min(tile.tn, layer.in_channels),
            std::min(tile.tr, layer.rows), std::min(tile.tc, layer.cols)};
}

} // namespace cnnfpga
