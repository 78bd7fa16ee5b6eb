#include "cnnfpga/dse.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <tuple>

namespace cnnfpga {

std::vector<std::int64_t> tile_candidates(std::int64_t dim) {
    std::set<std::int64_t> values;
    for (std::int64_t k = 1; k <= dim; ++k) values.insert(ceil_div(dim, k));
    return {values.begin(), values.end()};
}

std::vector<PortConfig> bus_filling_ports(Precision precision, std::int64_t bus_width) {
    const std::int64_t lanes = bus_width / precision.bits();
    std::vector<PortConfig> out;
    for (std::int64_t ip = 1; ip <= lanes - 2; ++ip)
        for (std::int64_t wp = 1; ip + wp <= lanes - 1; ++wp)
            out.push_back({ip, wp, lanes - ip - wp});
    return out;
}

std::vector<PartitionScheme> enumerate_schemes(std::int64_t max_fpgas,
                                               const std::vector<LayerSpec>& layers) {
    std::int64_t max_b = max_fpgas, max_r = max_fpgas, max_c = max_fpgas, max_m = max_fpgas;
    for (const auto& l : layers) {
        max_b = std::min(max_b, l.batch);
        max_r = std::min(max_r, l.rows);
        max_c = std::min(max_c, l.cols);
        max_m = std::min(max_m, l.out_channels);
    }
    std::vector<PartitionScheme> out;
    for (std::int64_t pb = 1; pb <= max_b; ++pb)
        for (std::int64_t pr = 1; pb * pr <= max_fpgas && pr <= max_r; ++pr)
            for (std::int64_t pc = 1; pb * pr * pc <= max_fpgas && pc <= max_c; ++pc)
                for (std::int64_t pm = 1; pb * pr * pc * pm <= max_fpgas && pm <= max_m; ++pm)
                    out.push_back({pb, pr, pc, pm});
    return out;
}

namespace {

auto order_key(const DesignPoint& p) {
    const auto& t = p.design.tile;
    const auto& q = p.design.ports;
    const auto& s = p.ctx.scheme;
    return std::make_tuple(p.total, s.fpga_count(), p.usage.bram_total(), t.tm, t.tn, t.tr, t.tc,
                           q.ip, q.wp, q.op, s.pb, s.pr, s.pc, s.pm);
}

std::int64_t max_kernel(const std::vector<LayerSpec>& layers) {
    std::int64_t k = 1;
    for (const auto& l : layers) k = std::max(k, l.kernel);
    return k;
}

/// The buffers the hardware must provide: the largest clamped tile any
/// layer uses.
TileConfig hardware_tile(const TileConfig& tile, const std::vector<LayerSpec>& slices) {
    TileConfig hw{0, 0, 0, 0};
    for (const auto& s : slices) {
        const TileConfig eff = clamp_tile(tile, s);
        hw.tm = std::max(hw.tm, eff.tm);
        hw.tn = std::max(hw.tn, eff.tn);
        hw.tr = std::max(hw.tr, eff.tr);
        hw.tc = std::max(hw.tc, eff.tc);
    }
    return hw;
}

bool fits(const ResourceUsage& u, const PlatformSpec& p) {
    return u.dsps <= p.dsp_budget && u.bram_total() <= p.bram_budget && u.bus_bits <= p.bus_width;
}

/// Summed latency over the slices; nullopt if a torus constraint fails.
std::optional<Cycles> total_latency(const std::vector<LayerSpec>& slices, const TileConfig& tile,
                                    const PortConfig& ports, Precision precision,
                                    const XferContext& ctx, const PlatformSpec& platform) {
    Cycles total = 0;
    const bool sharing = ctx.mode == XferMode::Xfer && ctx.scheme.fpga_count() > 1;
    for (const auto& s : slices) {
        const AcceleratorDesign d{clamp_tile(tile, s), ports, precision};
        const PhaseLatencies ph = xfer_phase_latencies(s, d, ctx);
        const TripCounts trips = trip_counts(s, d.tile);
        const Cycles lat1 = std::max({ph.compute, ph.ifm, ph.weight, ph.link});
        const Cycles lat2 = std::max(trips.in_channel * lat1, ph.ofm);
        total += trips.output_tiles() * lat2 + ph.ofm + lat1;
        if (sharing &&
            !torus_bandwidth_check(d.tile, s.kernel, precision, ctx.scheme, platform, lat1).ok)
            return std::nullopt;
    }
    return total;
}

void trim_pair(std::vector<std::int64_t>& a, std::vector<std::int64_t>& b, std::size_t cap) {
    // Lists are descending; drop the smallest tiles of the longer list first.
    while (a.size() * b.size() > cap && (a.size() > 1 || b.size() > 1)) {
        if (a.size() >= b.size())
            a.pop_back();
        else
            b.pop_back();
    }
}

std::vector<std::int64_t> candidates_for(const std::vector<std::int64_t>& given,
                                         const std::vector<LayerSpec>& slices,
                                         std::int64_t LayerSpec::*dim) {
    std::set<std::int64_t> values;
    if (!given.empty()) {
        std::int64_t largest = 1;
        for (const auto& s : slices) largest = std::max(largest, s.*dim);
        for (auto v : given) values.insert(std::clamp<std::int64_t>(v, 1, largest));
    } else {
        for (const auto& s : slices)
            for (auto v : tile_candidates(s.*dim)) values.insert(v);
    }
    return {values.rbegin(), values.rend()};
}

struct SchemeOutcome {
    std::optional<DesignPoint> best;
    std::int64_t explored = 0;
    std::int64_t pruned = 0;
};

SchemeOutcome search_scheme(const std::vector<LayerSpec>& layers, const PlatformSpec& platform,
                            const SearchSpace& space, const std::vector<PortConfig>& ports,
                            const PartitionScheme& scheme) {
    SchemeOutcome out;
    std::vector<LayerSpec> slices;
    slices.reserve(layers.size());
    for (const auto& l : layers) slices.push_back(slice_layer(l, scheme));

    auto tms = candidates_for(space.tm, slices, &LayerSpec::out_channels);
    auto tns = candidates_for(space.tn, slices, &LayerSpec::in_channels);
    auto trs = candidates_for(space.tr, slices, &LayerSpec::rows);
    auto tcs = candidates_for(space.tc, slices, &LayerSpec::cols);
    trim_pair(tms, tns, space.pair_cap);
    trim_pair(trs, tcs, space.pair_cap);

    const Precision precision = space.precision;
    const std::int64_t kmax = max_kernel(layers);
    const std::int64_t window = ceil_div(kmax * kmax * precision.bits(), kBramBlockBits);
    const XferContext base_ctx{scheme, 1, 1, space.mode};

    Cycles incumbent = -1;
    DesignPoint candidate;
    for (auto tm : tms) {
        for (auto tn : tns) {
            if (precision.dsp_per_mac() * tm * tn > platform.dsp_budget) continue;
            // Weight buffers plus the smallest possible IFM/OFM buffers.
            if (2 * tm * tn * window + 2 * (tm + tn) > platform.bram_budget) continue;
            for (auto tr : trs) {
                for (auto tc : tcs) {
                    const TileConfig hw{tm, tn, tr, tc};
                    if (bram_usage(hw, kmax, precision).bram_total() > platform.bram_budget)
                        continue;

                    Cycles bound = 0;
                    for (const auto& s : slices) {
                        const TileConfig eff = clamp_tile(hw, s);
                        bound += trip_counts(s, eff).total() * s.kernel * s.kernel * eff.tr * eff.tc;
                    }
                    if (space.prune && incumbent >= 0 && bound > incumbent) {
                        out.pruned += static_cast<std::int64_t>(ports.size());
                        continue;
                    }
                    for (const auto& p : ports) {
                        ++out.explored;
                        XferContext ctx = base_ctx;
                        ctx.wp_b2b = p.wp;
                        ctx.ip_b2b = p.ip;
                        const auto total =
                            total_latency(slices, hw, p, precision, ctx, platform);
                        if (!total || (incumbent >= 0 && *total > incumbent)) continue;
                        const AcceleratorDesign design{hw, p, precision};
                        if (!evaluate_design(layers, platform, design, ctx, candidate)) continue;
                        if (!out.best || better(candidate, *out.best)) {
                            out.best = candidate;
                            incumbent = candidate.total;
                        }
                    }
                }
            }
        }
    }
    return out;
}

} // namespace

bool better(const DesignPoint& a, const DesignPoint& b) { return order_key(a) < order_key(b); }

TileConfig hardware_tile(const TileConfig& tile, const std::vector<LayerSpec>& layers,
                         const PartitionScheme& scheme) {
    std::vector<LayerSpec> slices;
    for (const auto& l : layers) slices.push_back(slice_layer(l, scheme));
    return hardware_tile(tile, slices);
}

std::vector<std::string> design_violations(const std::vector<LayerSpec>& layers,
                                           const PlatformSpec& platform,
                                           const AcceleratorDesign& design,
                                           const XferContext& ctx) {
    std::vector<std::string> out;
    const auto& t = design.tile;
    const auto& p = design.ports;
    if (t.tm < 1 || t.tn < 1 || t.tr < 1 || t.tc < 1) out.push_back("tile factors must be >= 1");
    if (p.ip < 1 || p.wp < 1 || p.op < 1) out.push_back("port lanes must be >= 1");
    if (!ctx.scheme.valid()) out.push_back("partition factors must be >= 1");
    if (!out.empty()) return out;

    std::vector<LayerSpec> slices;
    for (const auto& l : layers) {
        try {
            slices.push_back(slice_layer(l, ctx.scheme));
        } catch (const std::invalid_argument& e) {
            out.push_back(l.name + ": " + e.what());
        }
    }
    if (!out.empty()) return out;

    AcceleratorDesign hw = design;
    hw.tile = hardware_tile(design.tile, slices);
    const ResourceUsage u = resource_usage(hw, max_kernel(layers));
    auto over = [&](const char* what, std::int64_t used, std::int64_t limit) {
        if (used > limit)
            out.push_back(std::string(what) + " " + std::to_string(used) + " exceeds budget " +
                          std::to_string(limit));
    };
    over("DSP", u.dsps, platform.dsp_budget);
    over("BRAM", u.bram_total(), platform.bram_budget);
    over("bus width (bits)", u.bus_bits, platform.bus_width);
    if (!out.empty()) return out;

    if (ctx.mode == XferMode::Xfer && ctx.scheme.fpga_count() > 1) {
        for (const auto& s : slices) {
            AcceleratorDesign d = design;
            d.tile = clamp_tile(design.tile, s);
            const LatencyReport r = latency(s, d, ctx);
            const TorusVerdict v =
                torus_bandwidth_check(d.tile, s.kernel, d.precision, ctx.scheme, platform, r.lat1);
            if (!v.ok)
                out.push_back(s.name + ": torus demand " + std::to_string(v.demand_bits_per_cycle) +
                              " bits/cycle exceeds link capacity " +
                              std::to_string(platform.interlink_bw));
        }
    }
    return out;
}

bool evaluate_design(const std::vector<LayerSpec>& layers, const PlatformSpec& platform,
                     const AcceleratorDesign& design, const XferContext& ctx, DesignPoint& out) {
    std::vector<LayerSpec> slices;
    slices.reserve(layers.size());
    for (const auto& l : layers) slices.push_back(slice_layer(l, ctx.scheme));

    AcceleratorDesign hw = design;
    hw.tile = hardware_tile(design.tile, slices);
    const ResourceUsage usage = resource_usage(hw, max_kernel(layers));
    if (!fits(usage, platform)) return false;

    out.design = design;
    out.ctx = ctx;
    out.usage = usage;
    out.layers.clear();
    out.total = 0;
    const bool sharing = ctx.mode == XferMode::Xfer && ctx.scheme.fpga_count() > 1;
    for (const auto& s : slices) {
        AcceleratorDesign d = design;
        d.tile = clamp_tile(design.tile, s);
        LatencyReport r = latency(s, d, ctx);
        if (sharing &&
            !torus_bandwidth_check(d.tile, s.kernel, d.precision, ctx.scheme, platform, r.lat1).ok)
            return false;
        out.total += r.lat;
        out.layers.push_back(r);
    }
    return true;
}

DseResult optimize_network_uniform(const std::vector<LayerSpec>& layers,
                                   const PlatformSpec& platform, const SearchSpace& space) {
    const auto started = std::chrono::steady_clock::now();
    if (layers.empty()) throw std::invalid_argument("no convolution layers to optimize");
    for (const auto& l : layers)
        if (!l.valid()) throw std::invalid_argument("layer '" + l.name + "' has a zero dimension");

    const std::vector<PortConfig> ports =
        space.ports.empty() ? bus_filling_ports(space.precision, platform.bus_width) : space.ports;
    std::vector<PortConfig> usable;
    for (const auto& p : ports)
        if (p.ip >= 1 && p.wp >= 1 && p.op >= 1 &&
            space.precision.bits() * p.total() <= platform.bus_width)
            usable.push_back(p);

    std::vector<PartitionScheme> schemes = space.schemes;
    if (schemes.empty()) {
        schemes = enumerate_schemes(std::max<std::int64_t>(space.max_fpgas, 1), layers);
    } else {
        std::erase_if(schemes, [&](const PartitionScheme& s) {
            return std::any_of(layers.begin(), layers.end(), [&](const LayerSpec& l) {
                return s.pb > l.batch || s.pr > l.rows || s.pc > l.cols || s.pm > l.out_channels;
            });
        });
    }
    if (usable.empty() || schemes.empty())
        throw NoFeasibleDesign("search space is empty (no usable lanes or partition schemes)");

    std::vector<SchemeOutcome> outcomes(schemes.size());
    unsigned workers = space.workers ? space.workers : std::thread::hardware_concurrency();
    workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(schemes.size()));
    auto run = [&](unsigned worker) {
        for (std::size_t i = worker; i < schemes.size(); i += workers)
            outcomes[i] = search_scheme(layers, platform, space, usable, schemes[i]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    DseResult result;
    std::map<std::int64_t, Cycles> per_count;
    bool found = false;
    for (auto& o : outcomes) {
        result.explored += o.explored;
        result.pruned += o.pruned;
        if (!o.best) continue;
        const std::int64_t n = o.best->scheme().fpga_count();
        auto [it, inserted] = per_count.try_emplace(n, o.best->total);
        if (!inserted) it->second = std::min(it->second, o.best->total);
        if (!found || better(*o.best, result.best)) result.best = *o.best;
        found = true;
        result.scheme_best.push_back(std::move(*o.best));
    }
    if (!found) throw NoFeasibleDesign("no design point satisfies the platform constraints");
    for (const auto& [n, lat] : per_count) result.pareto.push_back({n, lat});
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

DseResult optimize_layer(const LayerSpec& layer, const PlatformSpec& platform,
                         const SearchSpace& space) {
    return optimize_network_uniform({layer}, platform, space);
}

std::vector<DseResult> optimize_network_per_layer(const std::vector<LayerSpec>& layers,
                                                  const PlatformSpec& platform,
                                                  const SearchSpace& space) {
    std::vector<DseResult> out;
    out.reserve(layers.size());
    for (const auto& l : layers) out.push_back(optimize_layer(l, platform, space));
    return out;
}

LayerSpecificPlan optimize_layer_specific(const std::vector<LayerSpec>& layers,
                                          const PlatformSpec& platform, const SearchSpace& space) {
    const auto results = optimize_network_per_layer(layers, platform, space);
    LayerSpecificPlan plan;
    for (const auto& r : results) {
        plan.explored += r.explored;
        plan.pruned += r.pruned;
        plan.elapsed_seconds += r.elapsed_seconds;
    }

    // cost[i][j]: best chain ending with option j of layer i.
    const std::size_t n = layers.size();
    std::vector<std::vector<Cycles>> cost(n);
    std::vector<std::vector<std::size_t>> from(n);
    auto move = [&](std::size_t i, const DesignPoint& a, const DesignPoint& b) {
        return classify_interlayer(a.scheme(), b.scheme(), layers[i], layers[i + 1].kernel,
                                   space.precision);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto& opts = results[i].scheme_best;
        cost[i].assign(opts.size(), 0);
        from[i].assign(opts.size(), 0);
        for (std::size_t j = 0; j < opts.size(); ++j) {
            if (i == 0) {
                cost[i][j] = opts[j].total;
                continue;
            }
            const auto& prev = results[i - 1].scheme_best;
            Cycles best = -1;
            for (std::size_t k = 0; k < prev.size(); ++k) {
                const Cycles c = cost[i - 1][k] + move_cycles(move(i - 1, prev[k], opts[j]), platform);
                if (best < 0 || c < best || (c == best && better(prev[k], prev[from[i][j]]))) {
                    best = c;
                    from[i][j] = k;
                }
            }
            cost[i][j] = best + opts[j].total;
        }
    }

    const auto& last = results[n - 1].scheme_best;
    std::size_t pick = 0;
    for (std::size_t j = 1; j < last.size(); ++j)
        if (cost[n - 1][j] < cost[n - 1][pick] ||
            (cost[n - 1][j] == cost[n - 1][pick] && better(last[j], last[pick])))
            pick = j;

    plan.layers.resize(n);
    for (std::size_t i = n; i-- > 0;) {
        plan.layers[i].point = results[i].scheme_best[pick];
        if (i > 0) pick = from[i][pick];
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = plan.layers[i];
        if (i + 1 < n) {
            c.move_out = move(i, c.point, plan.layers[i + 1].point);
            c.comm = move_cycles(c.move_out, platform);
        }
        plan.compute += c.point.total;
        plan.comm += c.comm;
    }
    plan.total = plan.compute + plan.comm;
    return plan;
}

ScaleStudy scale_study(const std::vector<LayerSpec>& layers, const PlatformSpec& platform,
                       const SearchSpace& space, const std::vector<std::int64_t>& fpga_counts) {
    if (fpga_counts.empty() || fpga_counts.front() != 1 ||
        !std::is_sorted(fpga_counts.begin(), fpga_counts.end()))
        throw std::invalid_argument("node counts must be ascending and start at 1");

    SearchSpace s = space;
    s.max_fpgas = fpga_counts.back();
    s.schemes.clear();

    ScaleStudy study;
    study.search = optimize_network_uniform(layers, platform, s);
    study.points = study.search.scheme_best;

    for (auto count : fpga_counts) {
        const DesignPoint* best = nullptr;
        for (const auto& p : study.points)
            if (p.scheme().fpga_count() <= count && (!best || better(p, *best))) best = &p;
        if (!best) throw NoFeasibleDesign("no feasible design for the single-node baseline");
        ScalePoint point{count, *best, 1.0};
        point.speedup = static_cast<double>(study.curve.empty() ? best->total
                                                                : study.curve.front().best.total) /
                        static_cast<double>(best->total);
        study.curve.push_back(std::move(point));
    }
    return study;
}

} // namespace cnnfpga
