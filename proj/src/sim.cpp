#include "cnnfpga/sim.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <sstream>

namespace cnnfpga {

std::string_view to_string(SimPhase p) {
    switch (p) {
    case SimPhase::LoadIfm: return "load-ifm";
    case SimPhase::LoadWeight: return "load-wei";
    case SimPhase::Compute: return "compute";
    case SimPhase::StoreOfm: return "store-ofm";
    case SimPhase::Link: return "b2b";
    }
    return "?";
}

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::LoadIfmDone: return "LoadIfmDone";
    case EventKind::LoadWeiDone: return "LoadWeiDone";
    case EventKind::ComputeDone: return "ComputeDone";
    case EventKind::StoreOfmDone: return "StoreOfmDone";
    case EventKind::B2bDone: return "B2bDone";
    }
    return "?";
}

namespace {

constexpr std::size_t idx(SimPhase p) { return static_cast<std::size_t>(p); }

// Same-time events complete in the order store < compute < load < b2b.
int tie_order(EventKind k) {
    switch (k) {
    case EventKind::StoreOfmDone: return 0;
    case EventKind::ComputeDone: return 1;
    case EventKind::LoadIfmDone:
    case EventKind::LoadWeiDone: return 2;
    case EventKind::B2bDone: return 3;
    }
    return 4;
}

/// Per-transaction durations, computed from buffer volumes.
struct Durations {
    Cycles ifm = 0;
    Cycles weight = 0;
    Cycles compute = 0;
    Cycles store = 0;
    Cycles link = 0;
    std::int64_t link_channels = 0;
};

Cycles transfer_cycles(std::int64_t elements, std::int64_t lanes) {
    return (elements + lanes - 1) / lanes;
}

Durations derive_durations(const LayerSpec& layer, const AcceleratorDesign& design,
                           const std::optional<XferContext>& ctx, std::int64_t link_capacity) {
    const auto& t = design.tile;
    const auto& p = design.ports;
    const std::int64_t ifm_elems = t.tn * t.tr * t.tc;
    const std::int64_t wei_elems = t.tm * t.tn * layer.kernel * layer.kernel;
    const std::int64_t ofm_elems = t.tm * t.tr * t.tc;

    Durations d;
    d.compute = layer.kernel * layer.kernel * t.tr * t.tc; // one MAC wave per cycle
    d.store = transfer_cycles(ofm_elems, p.op);
    d.ifm = transfer_cycles(ifm_elems, p.ip);
    d.weight = transfer_cycles(wei_elems, p.wp);

    if (!ctx || ctx->mode == XferMode::Baseline) return d;

    // Each node holds one share of a shared tile and receives the other
    // shares from its peers, one channel per peer.
    std::int64_t link_bits = 0;
    const std::int64_t group = ctx->scheme.weight_group();
    if (group > 1) {
        const std::int64_t share = (wei_elems + group - 1) / group;
        d.weight = transfer_cycles(share, p.wp);
        d.link = std::max(d.link, transfer_cycles(share, ctx->wp_b2b));
        d.link_channels += group - 1;
        link_bits += (group - 1) * share * design.precision.bits();
    }
    const std::int64_t pm = ctx->scheme.pm;
    if (pm > 1) {
        const std::int64_t share = (ifm_elems + pm - 1) / pm;
        d.ifm = transfer_cycles(share, p.ip);
        d.link = std::max(d.link, transfer_cycles(share, ctx->ip_b2b));
        d.link_channels += pm - 1;
        link_bits += (pm - 1) * share * design.precision.bits();
    }
    if (link_capacity > 0 && d.link_channels > 0)
        d.link = std::max(d.link, (link_bits + link_capacity - 1) / link_capacity);
    return d;
}

class NodeSimulator {
  public:
    NodeSimulator(const LayerSpec& layer, const AcceleratorDesign& design, const Durations& dur,
                  const SimOptions& options)
        : dur_(dur), options_(options) {
        const auto& t = design.tile;
        in_trips_ = (layer.in_channels + t.tn - 1) / t.tn;
        out_trips_ = (layer.out_channels + t.tm - 1) / t.tm;
        spatial_trips_ = ((layer.rows + t.tr - 1) / t.tr) * ((layer.cols + t.tc - 1) / t.tc);
        tiles_ = layer.batch * spatial_trips_ * out_trips_;
        trips_ = tiles_ * in_trips_;
        trace_.trips = trips_;
        trace_.output_tiles = tiles_;
    }

    SimTrace run() {
        start_stage(0, 0);
        while (!queue_.empty()) {
            const Pending ev = queue_.top();
            queue_.pop();
            now_ = ev.time;
            complete(ev);
        }
        if (!done_) {
            std::ostringstream msg;
            msg << "simulation deadlock at cycle " << now_ << ": stage " << stage_ << " of "
                << trips_ << ", " << outstanding_ << " transactions outstanding, store "
                << (store_outstanding_ ? "pending" : "idle");
            throw SimulationFault(msg.str());
        }
        return std::move(trace_);
    }

  private:
    struct Pending {
        Cycles time;
        int order;
        std::int64_t seq;
        EventKind kind;
        int slot;
        bool bubble;
        std::int64_t unit; // trip index, or tile index for stores
    };
    struct Later {
        bool operator()(const Pending& a, const Pending& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.order != b.order) return a.order > b.order;
            return a.seq > b.seq;
        }
    };

    void issue(EventKind kind, SimPhase phase, Cycles duration, bool bubble, std::int64_t unit,
               int slot) {
        queue_.push({now_ + duration, tie_order(kind), seq_++, kind, slot, bubble, unit});
        if (bubble)
            trace_.bubble[idx(phase)] += duration;
        else
            trace_.busy[idx(phase)] += duration;
    }

    void start_stage(std::int64_t stage, Cycles at) {
        now_ = at;
        stage_ = stage;
        stage_start_ = at;
        outstanding_ = 0;

        const bool load_real = stage < trips_;
        const int load_slot = static_cast<int>(stage % 2);
        issue(EventKind::LoadIfmDone, SimPhase::LoadIfm, dur_.ifm, !load_real, stage, load_slot);
        issue(EventKind::LoadWeiDone, SimPhase::LoadWeight, dur_.weight, !load_real, stage,
              load_slot);
        outstanding_ += 2;
        for (std::int64_t ch = 0; ch < dur_.link_channels; ++ch) {
            queue_.push({now_ + dur_.link, tie_order(EventKind::B2bDone), seq_++,
                         EventKind::B2bDone, load_slot, !load_real, stage});
            ++outstanding_;
        }
        // The link group counts once: its channels run side by side.
        if (dur_.link_channels > 0) {
            if (load_real)
                trace_.busy[idx(SimPhase::Link)] += dur_.link;
            else
                trace_.bubble[idx(SimPhase::Link)] += dur_.link;
        }

        const bool compute_real = stage >= 1;
        issue(EventKind::ComputeDone, SimPhase::Compute, dur_.compute, !compute_real, stage - 1,
              static_cast<int>((stage + 1) % 2));
        ++outstanding_;

        if (stage >= 1 && (stage - 1) % in_trips_ == 0) {
            // First stage of a period: drain the previous tile's OFM slot.
            const std::int64_t tile = (stage - 1) / in_trips_;
            period_start_ = at;
            period_stall_ = {};
            store_outstanding_ = true;
            issue(EventKind::StoreOfmDone, SimPhase::StoreOfm, dur_.store, tile == 0, tile - 1,
                  static_cast<int>((tile + 1) % 2));
        }
    }

    SimPhase critical_inner_phase(Cycles length) const {
        if (dur_.compute == length) return SimPhase::Compute;
        if (dur_.link_channels > 0 && dur_.link == length) return SimPhase::Link;
        if (dur_.weight == length) return SimPhase::LoadWeight;
        return SimPhase::LoadIfm;
    }

    void log(const Pending& ev) {
        ++trace_.event_count;
        if (!options_.record_events) return;
        if (trace_.events.size() >= options_.max_logged_events) {
            trace_.log_truncated = true;
            return;
        }
        SimEvent out;
        out.time = ev.time;
        out.node = options_.node;
        out.kind = ev.kind;
        out.slot = ev.slot;
        out.bubble = ev.bubble;
        std::int64_t unit = std::max<std::int64_t>(ev.unit, 0);
        if (ev.kind == EventKind::StoreOfmDone) {
            out.c = in_trips_ - 1;
        } else {
            out.c = unit % in_trips_;
            unit /= in_trips_;
        }
        out.d = unit % out_trips_;
        unit /= out_trips_;
        out.e = unit % spatial_trips_;
        out.f = unit / spatial_trips_;
        trace_.events.push_back(out);
    }

    void complete(const Pending& ev) {
        log(ev);
        if (ev.kind == EventKind::StoreOfmDone) {
            store_outstanding_ = false;
            store_end_ = ev.time;
            if (final_store_) {
                done_ = true;
                trace_.total_cycles = ev.time;
                trace_.stall[idx(SimPhase::StoreOfm)] += ev.time - period_start_;
            } else if (awaiting_period_end_) {
                finish_period();
            }
            return;
        }
        if (--outstanding_ > 0) return;
        stage_done();
    }

    void stage_done() {
        const Cycles length = now_ - stage_start_;
        const SimPhase critical = critical_inner_phase(length);
        if (stage_ == 0) {
            trace_.stall[idx(critical)] += length;
            start_stage(1, now_);
            return;
        }
        period_stall_[idx(critical)] += length;
        if (stage_ % in_trips_ != 0) {
            start_stage(stage_ + 1, now_);
            return;
        }
        inner_end_ = now_;
        if (store_outstanding_)
            awaiting_period_end_ = true;
        else
            finish_period();
    }

    void finish_period() {
        awaiting_period_end_ = false;
        if (store_end_ > inner_end_) {
            trace_.stall[idx(SimPhase::StoreOfm)] += now_ - period_start_;
        } else {
            for (std::size_t i = 0; i < kSimPhaseCount; ++i) trace_.stall[i] += period_stall_[i];
        }
        if (stage_ < trips_) {
            start_stage(stage_ + 1, now_);
            return;
        }
        // Drain the last tile.
        final_store_ = true;
        store_outstanding_ = true;
        period_start_ = now_;
        const std::int64_t tile = tiles_ - 1;
        issue(EventKind::StoreOfmDone, SimPhase::StoreOfm, dur_.store, false, tile,
              static_cast<int>(tile % 2));
    }

    Durations dur_;
    SimOptions options_;
    std::int64_t in_trips_ = 1, out_trips_ = 1, spatial_trips_ = 1, tiles_ = 1, trips_ = 1;

    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
    std::int64_t seq_ = 0;
    Cycles now_ = 0;

    std::int64_t stage_ = 0;
    Cycles stage_start_ = 0;
    std::int64_t outstanding_ = 0;

    Cycles period_start_ = 0;
    Cycles inner_end_ = 0;
    Cycles store_end_ = 0;
    std::array<Cycles, kSimPhaseCount> period_stall_{};
    bool store_outstanding_ = false;
    bool awaiting_period_end_ = false;
    bool final_store_ = false;
    bool done_ = false;

    SimTrace trace_;
};

} // namespace

SimTrace simulate(const LayerSpec& layer, const AcceleratorDesign& design,
                  const std::optional<XferContext>& ctx, const SimOptions& options) {
    if (auto v = structural_check(design, layer); !v.ok()) throw InfeasibleDesign(v.violations);
    const Durations dur = derive_durations(layer, design, ctx, options.link_capacity);
    return NodeSimulator(layer, design, dur, options).run();
}

Bottleneck stall_attribution(const SimTrace& trace) {
    static constexpr std::array<std::pair<SimPhase, Bottleneck>, kSimPhaseCount> order{{
        {SimPhase::Compute, Bottleneck::ComputeBound},
        {SimPhase::Link, Bottleneck::LinkBound},
        {SimPhase::LoadWeight, Bottleneck::WeightBound},
        {SimPhase::LoadIfm, Bottleneck::IfmBound},
        {SimPhase::StoreOfm, Bottleneck::OfmBound},
    }};
    Bottleneck best = Bottleneck::ComputeBound;
    Cycles best_stall = -1;
    for (const auto& [phase, verdict] : order) {
        if (trace.stall_of(phase) > best_stall) {
            best_stall = trace.stall_of(phase);
            best = verdict;
        }
    }
    return best;
}

ClusterTrace simulate_cluster(const ClusterPlan& plan, const std::vector<LayerSpec>& layers,
                              const AcceleratorDesign& design, const XferContext& ctx,
                              const PlatformSpec& platform, const SimOptions& options) {
    ClusterTrace out;
    out.node_totals.assign(plan.nodes.size(), 0);
    const PartitionScheme& scheme = plan.scheme;

    for (std::size_t li = 0; li < layers.size(); ++li) {
        const LayerSpec& layer = layers[li];
        const ClusterPlan layer_plan = build_plan(layer, scheme, design);
        ClusterLayerTrace lt;
        lt.layer = layer.name;
        if (li > 0) {
            lt.move_in = classify_interlayer(scheme, scheme, layers[li - 1], layer.kernel,
                                             design.precision);
        }
        const Cycles shuffle = move_cycles(lt.move_in, platform);

        // Every node of a sharing group moves equal shares, so the largest
        // slice carries the link budget check for the whole layer.
        const LayerSpec largest = slice_layer(layer, scheme);
        AcceleratorDesign largest_design = design;
        largest_design.tile = clamp_tile(design.tile, largest);
        const LatencyReport model = latency(largest, largest_design, ctx);
        if (ctx.mode == XferMode::Xfer &&
            !torus_bandwidth_check(largest_design.tile, layer.kernel, design.precision, scheme,
                                   platform, model.lat1)
                 .ok)
            out.bandwidth_warning = true;

        for (const auto& node : layer_plan.nodes) {
            const LayerSpec slice = layer_plan.node_layer(node);
            AcceleratorDesign node_design = design;
            node_design.tile = clamp_tile(design.tile, slice);
            SimOptions node_opts = options;
            node_opts.node = node.id;
            if (ctx.mode == XferMode::Xfer) node_opts.link_capacity = platform.interlink_bw;
            SimTrace trace = simulate(slice, node_design, ctx, node_opts);
            trace.total_cycles += shuffle;
            lt.cycles = std::max(lt.cycles, trace.total_cycles);
            out.node_totals[static_cast<std::size_t>(node.id)] += trace.total_cycles;
            lt.nodes.push_back(std::move(trace));
        }
        out.total_cycles += lt.cycles;
        out.layers.push_back(std::move(lt));
    }
    return out;
}

void write_event_log(std::ostream& out, const SimTrace& trace) {
    for (const auto& e : trace.events) {
        out << e.time << ' ' << e.node << ' ' << to_string(e.kind) << ' ' << e.slot << ' '
            << (e.bubble ? 1 : 0) << ' ' << e.f << ' ' << e.e << ' ' << e.d << ' ' << e.c << '\n';
    }
}

} // namespace cnnfpga
