#include "cnnfpga/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

namespace cnnfpga {

using nlohmann::json;

namespace {

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                std::ostringstream ss;
                ss << std::fixed << std::setprecision(4) << v;
                return ss.str();
            } else {
                return v;
            }
        },
        c);
}

json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>)
                return nullptr;
            else
                return v;
        },
        c);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string triple(std::int64_t a, std::int64_t b, std::int64_t c) {
    return std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c);
}

std::string quad(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return triple(a, b, c) + "," + std::to_string(d);
}

double to_ms(Cycles cycles, double freq_mhz) {
    return static_cast<double>(cycles) / (freq_mhz * 1e3);
}

/// Assumption block common to every report that evaluates designs.
void add_assumptions(Report& r, const NetworkFile& net, const PlatformSpec& platform,
                     const DesignDocument& doc, double freq_mhz) {
    std::vector<std::string> ports, schemes;
    bool xfer = false;
    for (const auto& g : doc.groups) {
        const auto& p = g.design.ports;
        const auto& s = g.ctx.scheme;
        const std::string pt = triple(p.ip, p.wp, p.op);
        const std::string sc = quad(s.pb, s.pr, s.pc, s.pm);
        if (std::find(ports.begin(), ports.end(), pt) == ports.end()) ports.push_back(pt);
        if (std::find(schemes.begin(), schemes.end(), sc) == schemes.end()) schemes.push_back(sc);
        xfer = xfer || (g.ctx.mode == XferMode::Xfer && s.fpga_count() > 1);
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
        return out.empty() ? std::string("-") : out;
    };
    r.assumptions = {
        {"network", net.name},
        {"platform", platform.name},
        {"precision", std::string(to_string(doc.precision))},
        {"ports", join(ports)},
        {"batch", std::to_string(net.batch)},
        {"partition", join(schemes)},
        {"xfer", xfer ? "on" : "off"},
        {"freq_mhz", cell_text(Cell{freq_mhz})},
    };
}

const NetworkLayer& find_layer(const NetworkFile& net, const std::string& name) {
    for (const auto& l : net.layers)
        if (l.name == name) {
            if (!l.modeled()) throw ParseError("design refers to unmodeled layer '" + name + "'");
            return l;
        }
    throw ParseError("design refers to unknown layer '" + name + "'");
}

} // namespace

const Section* Report::section(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

Format parse_format(std::string_view text) {
    if (text == "table") return Format::Table;
    if (text == "csv") return Format::Csv;
    if (text == "json") return Format::Json;
    throw ParseError("unknown format '" + std::string(text) + "'");
}

std::string render(const Report& report, Format format) {
    std::ostringstream out;
    if (format == Format::Json) {
        json doc;
        doc["command"] = report.command;
        json a = json::object();
        for (const auto& [k, v] : report.assumptions) a[k] = v;
        doc["assumptions"] = a;
        json sections = json::object();
        for (const auto& s : report.sections) {
            json rows = json::array();
            for (const auto& row : s.rows) {
                json r = json::object();
                for (std::size_t i = 0; i < s.columns.size() && i < row.size(); ++i)
                    r[s.columns[i]] = cell_json(row[i]);
                rows.push_back(r);
            }
            sections[s.name] = {{"columns", s.columns}, {"rows", rows}};
        }
        doc["sections"] = sections;
        json t = json::object();
        for (const auto& [k, v] : report.totals) t[k] = cell_json(v);
        doc["totals"] = t;
        doc["notes"] = report.notes;
        out << doc.dump(2) << '\n';
        return out.str();
    }

    if (format == Format::Csv) {
        for (const auto& [k, v] : report.assumptions) out << "# " << k << '=' << v << '\n';
        bool first = true;
        for (const auto& s : report.sections) {
            if (!first) out << '\n';
            first = false;
            if (report.sections.size() > 1) out << "# section=" << s.name << '\n';
            for (std::size_t i = 0; i < s.columns.size(); ++i)
                out << (i ? "," : "") << csv_escape(s.columns[i]);
            out << '\n';
            for (const auto& row : s.rows) {
                for (std::size_t i = 0; i < row.size(); ++i)
                    out << (i ? "," : "") << csv_escape(cell_text(row[i]));
                out << '\n';
            }
        }
        for (const auto& [k, v] : report.totals) out << "# total." << k << '=' << cell_text(v) << '\n';
        for (const auto& n : report.notes) out << "# note: " << n << '\n';
        return out.str();
    }

    out << report.command << '\n';
    for (const auto& [k, v] : report.assumptions) out << "  " << k << ": " << v << '\n';
    for (const auto& s : report.sections) {
        out << '\n' << '[' << s.name << ']' << '\n';
        std::vector<std::size_t> width(s.columns.size());
        for (std::size_t i = 0; i < s.columns.size(); ++i) width[i] = s.columns[i].size();
        // Text columns align left, numeric ones right.
        std::vector<bool> left(s.columns.size(), false);
        std::vector<std::vector<std::string>> text;
        for (const auto& row : s.rows) {
            auto& line = text.emplace_back();
            for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
                line.push_back(cell_text(row[i]));
                width[i] = std::max(width[i], line.back().size());
                if (std::holds_alternative<std::string>(row[i])) left[i] = true;
            }
        }
        auto cell = [&](std::size_t i, const std::string& v) {
            out << (i ? "  " : "") << (left[i] ? std::left : std::right)
                << std::setw(static_cast<int>(width[i])) << v;
        };
        for (std::size_t i = 0; i < s.columns.size(); ++i) cell(i, s.columns[i]);
        out << std::right << '\n';
        for (const auto& line : text) {
            for (std::size_t i = 0; i < line.size(); ++i) cell(i, line[i]);
            out << std::right << '\n';
        }
    }
    if (!report.totals.empty()) {
        out << "\n[totals]\n";
        for (const auto& [k, v] : report.totals) out << "  " << k << ": " << cell_text(v) << '\n';
    }
    for (const auto& n : report.notes) out << "note: " << n << '\n';
    return out.str();
}

DesignRejected::DesignRejected(std::vector<std::string> reasons)
    : std::runtime_error([&] {
          std::string msg = "infeasible design:";
          for (const auto& r : reasons) msg += "\n  " + r;
          return msg;
      }()),
      reasons_(std::move(reasons)) {}

const std::vector<std::string>& model_columns() {
    static const std::vector<std::string> cols = {
        "layer", "type", "B",     "M",    "N",    "R",    "C",      "K",  "Pb",
        "Pr",    "Pc",   "Pm",    "Tm",   "Tn",   "Tr",   "Tc",     "Ip", "Wp",
        "Op",    "tI",   "tW",    "tO",   "tComp", "tLink", "lat1", "lat2", "cycles",
        "comm",  "ms",   "bottleneck", "dsp", "bram"};
    return cols;
}

const std::vector<std::string>& scale_columns() {
    static const std::vector<std::string> cols = {"row", "fpgas", "Pb", "Pr", "Pc", "Pm",
                                                  "Tm",  "Tn",    "Tr", "Tc", "cycles",
                                                  "speedup", "bottleneck"};
    return cols;
}

Bottleneck dominant_bottleneck(const DesignPoint& point) {
    const LatencyReport* worst = nullptr;
    for (const auto& l : point.layers)
        if (!worst || l.lat > worst->lat) worst = &l;
    return worst ? worst->bottleneck : Bottleneck::ComputeBound;
}

std::vector<DesignPoint> evaluate_document(const NetworkFile& net, const PlatformSpec& platform,
                                           const DesignDocument& doc) {
    std::vector<DesignPoint> out;
    for (const auto& g : doc.groups) {
        std::vector<LayerSpec> layers;
        for (const auto& name : g.layers) layers.push_back(find_layer(net, name).spec);
        if (layers.empty()) throw ParseError("design group without layers");
        AcceleratorDesign design = g.design;
        design.precision = doc.precision;
        auto reasons = design_violations(layers, platform, design, g.ctx);
        if (!reasons.empty()) throw DesignRejected(std::move(reasons));
        DesignPoint p;
        if (!evaluate_design(layers, platform, design, g.ctx, p))
            throw DesignRejected({"design rejected by the platform constraints"});
        out.push_back(std::move(p));
    }
    return out;
}

DesignDocument uniform_document(const NetworkFile& net, const PlatformSpec& platform,
                                const AcceleratorDesign& design, const XferContext& ctx) {
    DesignDocument doc;
    doc.network = net.name;
    doc.platform = platform.name;
    doc.mode = "fixed";
    doc.precision = design.precision;
    DesignGroup g;
    g.design = design;
    g.ctx = ctx;
    for (const auto& l : net.layers)
        if (l.modeled()) g.layers.push_back(l.name);
    doc.groups.push_back(std::move(g));
    return doc;
}

namespace {

/// Fills the document's cycle fields and returns the per-layer rows.
Section layer_section(const NetworkFile& net, const PlatformSpec& platform, DesignDocument& doc,
                      const std::vector<DesignPoint>& points, double freq_mhz) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> where; // layer -> (group, index)
    for (std::size_t gi = 0; gi < doc.groups.size(); ++gi)
        for (std::size_t li = 0; li < doc.groups[gi].layers.size(); ++li)
            where[doc.groups[gi].layers[li]] = {gi, li};

    doc.total = 0;
    for (std::size_t gi = 0; gi < doc.groups.size(); ++gi) {
        auto& g = doc.groups[gi];
        g.cycles.clear();
        for (const auto& r : points[gi].layers) g.cycles.push_back(r.lat);
        g.total = points[gi].total;
        doc.total += g.total;
    }

    // Movement out of every layer into the next modeled one.
    std::map<std::string, Cycles> comm;
    const NetworkLayer* prev = nullptr;
    for (const auto& l : net.layers) {
        if (!l.modeled() || !where.count(l.name)) continue;
        if (prev) {
            const auto& a = points[where[prev->name].first].ctx.scheme;
            const auto& b = points[where[l.name].first].ctx.scheme;
            const Cycles c = move_cycles(
                classify_interlayer(a, b, prev->spec, l.spec.kernel, doc.precision), platform);
            comm[prev->name] = c;
            doc.total += c;
        }
        prev = &l;
    }

    Section s{"layers", model_columns(), {}};
    for (const auto& l : net.layers) {
        std::vector<Cell> row(model_columns().size());
        row[0] = l.name;
        row[1] = std::string(to_string(l.kind));
        auto it = where.find(l.name);
        if (!l.modeled() || it == where.end()) {
            static const std::size_t kBottleneck = static_cast<std::size_t>(
                std::find(model_columns().begin(), model_columns().end(), "bottleneck") -
                model_columns().begin());
            row[kBottleneck] = std::string(l.modeled() ? "not-in-design" : "unmodeled");
            s.rows.push_back(std::move(row));
            continue;
        }
        const auto [gi, li] = it->second;
        const DesignPoint& p = points[gi];
        const LatencyReport& r = p.layers[li];
        const LayerSpec& sp = l.spec;
        const auto& sc = p.ctx.scheme;
        const TileConfig eff = clamp_tile(p.design.tile, slice_layer(sp, sc));
        const auto& q = p.design.ports;
        const std::vector<Cell> vals = {
            sp.batch,    sp.out_channels, sp.in_channels, sp.rows,    sp.cols,       sp.kernel,
            sc.pb,       sc.pr,           sc.pc,          sc.pm,      eff.tm,        eff.tn,
            eff.tr,      eff.tc,          q.ip,           q.wp,       q.op,          r.phases.ifm,
            r.phases.weight, r.phases.ofm, r.phases.compute, r.phases.link, r.lat1,  r.lat2,
            r.lat,       comm[l.name], to_ms(r.lat, freq_mhz), std::string(to_string(r.bottleneck)),
            p.usage.dsps, p.usage.bram_total()};
        std::copy(vals.begin(), vals.end(), row.begin() + 2);
        s.rows.push_back(std::move(row));
    }
    return s;
}

void add_totals(Report& r, const DesignDocument& doc, const std::vector<DesignPoint>& points,
                double freq_mhz) {
    std::int64_t fpgas = 1, dsps = 0, bram = 0;
    for (const auto& p : points) {
        fpgas = std::max(fpgas, p.ctx.scheme.fpga_count());
        dsps = std::max(dsps, p.usage.dsps);
        bram = std::max(bram, p.usage.bram_total());
    }
    r.totals = {{"cycles", doc.total},
                {"ms", to_ms(doc.total, freq_mhz)},
                {"fpgas", fpgas},
                {"dsp", dsps},
                {"bram", bram}};
}

} // namespace

Report model_report(const NetworkFile& net, const PlatformSpec& platform, DesignDocument& doc,
                    double freq_mhz) {
    const auto points = evaluate_document(net, platform, doc);
    Report r;
    r.command = "model";
    add_assumptions(r, net, platform, doc, freq_mhz);
    r.sections.push_back(layer_section(net, platform, doc, points, freq_mhz));
    add_totals(r, doc, points, freq_mhz);
    return r;
}

OptimizeOutcome run_optimize(const NetworkFile& net, const PlatformSpec& platform,
                             const OptimizeOptions& options, double freq_mhz) {
    const auto layers = net.conv_layers();
    OptimizeOutcome out;
    DesignDocument& doc = out.document;
    doc.network = net.name;
    doc.platform = platform.name;
    doc.mode = options.per_layer ? "per-layer" : "uniform";
    doc.precision = options.space.precision;

    std::int64_t explored = 0, pruned = 0;
    double elapsed = 0.0;
    std::vector<DesignPoint> points;
    std::optional<DseResult> uniform;
    if (options.per_layer) {
        const LayerSpecificPlan plan = optimize_layer_specific(layers, platform, options.space);
        explored = plan.explored;
        pruned = plan.pruned;
        elapsed = plan.elapsed_seconds;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const DesignPoint& p = plan.layers[i].point;
            doc.groups.push_back({p.design, p.ctx, {layers[i].name}, {}, 0});
            points.push_back(p);
        }
    } else {
        uniform = optimize_network_uniform(layers, platform, options.space);
        explored = uniform->explored;
        pruned = uniform->pruned;
        elapsed = uniform->elapsed_seconds;
        DesignGroup g{uniform->best.design, uniform->best.ctx, {}, {}, 0};
        for (const auto& l : layers) g.layers.push_back(l.name);
        doc.groups.push_back(std::move(g));
        points.push_back(uniform->best);
    }

    Report& r = out.report;
    r.command = "optimize";
    add_assumptions(r, net, platform, doc, freq_mhz);
    r.sections.push_back(layer_section(net, platform, doc, points, freq_mhz));

    Section pareto{"pareto", {"fpgas", "cycles"}, {}};
    if (uniform)
        for (const auto& p : uniform->pareto) pareto.rows.push_back({p.fpgas, p.best});
    if (!pareto.rows.empty()) r.sections.push_back(std::move(pareto));

    add_totals(r, doc, points, freq_mhz);
    r.totals.emplace_back("explored", explored);
    r.totals.emplace_back("pruned", pruned);
    r.totals.emplace_back("elapsed_s", elapsed);
    return out;
}

Report scale_report(const NetworkFile& net, const PlatformSpec& platform, const SearchSpace& space,
                    std::int64_t max_fpgas) {
    if (max_fpgas < 1) throw std::invalid_argument("max-fpgas must be >= 1");
    std::vector<std::int64_t> counts;
    for (std::int64_t n = 1; n <= max_fpgas; ++n) counts.push_back(n);
    const ScaleStudy study = scale_study(net.conv_layers(), platform, space, counts);
    const double base = static_cast<double>(study.curve.front().best.total);

    auto row = [&](const std::string& kind, std::int64_t fpgas, const DesignPoint& p) {
        const auto& s = p.scheme();
        const auto& t = p.design.tile;
        return std::vector<Cell>{kind, fpgas, s.pb, s.pr, s.pc, s.pm, t.tm, t.tn, t.tr, t.tc,
                                 p.total, base / static_cast<double>(p.total),
                                 std::string(to_string(dominant_bottleneck(p)))};
    };

    Report r;
    r.command = "scale";
    Section s{"scale", scale_columns(), {}};
    std::vector<const DesignPoint*> points;
    for (const auto& p : study.points) points.push_back(&p);
    std::sort(points.begin(), points.end(), [](const DesignPoint* a, const DesignPoint* b) {
        if (a->scheme().fpga_count() != b->scheme().fpga_count())
            return a->scheme().fpga_count() < b->scheme().fpga_count();
        return better(*a, *b);
    });
    for (const auto* p : points) s.rows.push_back(row("point", p->scheme().fpga_count(), *p));
    for (const auto& c : study.curve) s.rows.push_back(row("best", c.fpgas, c.best));
    r.sections.push_back(std::move(s));

    DesignDocument echo;
    echo.precision = space.precision;
    DesignGroup g;
    g.design = study.curve.front().best.design;
    g.ctx = study.curve.front().best.ctx;
    echo.groups.push_back(g);
    add_assumptions(r, net, platform, echo, effective_freq_mhz(std::nullopt, platform, space.precision));
    r.assumptions[3].second = space.ports.empty() ? "bus-filling" : r.assumptions[3].second;
    r.assumptions[5].second = "1.." + std::to_string(max_fpgas) + " nodes";
    r.totals = {{"explored", study.search.explored},
                {"pruned", study.search.pruned},
                {"elapsed_s", study.search.elapsed_seconds},
                {"speedup_max_fpgas", study.curve.back().speedup}};
    return r;
}

SimulateOutcome run_simulate(const NetworkFile& net, const PlatformSpec& platform,
                             DesignDocument& doc, double freq_mhz, bool record_events) {
    const auto points = evaluate_document(net, platform, doc);
    SimulateOutcome out;
    Report& r = out.report;
    r.command = "simulate";
    add_assumptions(r, net, platform, doc, freq_mhz);
    r.sections.push_back(layer_section(net, platform, doc, points, freq_mhz));

    Section dev{"deviation",
                {"layer", "model_cycles", "sim_cycles", "deviation_pct", "model_bottleneck",
                 "sim_bottleneck", "events", "nodes"},
                {}};
    Cycles sim_total = 0;
    for (std::size_t gi = 0; gi < doc.groups.size(); ++gi) {
        const auto& g = doc.groups[gi];
        const DesignPoint& p = points[gi];
        std::vector<LayerSpec> layers;
        for (const auto& name : g.layers) {
            LayerSpec spec;
            for (const auto& l : net.layers)
                if (l.name == name) spec = l.spec;
            layers.push_back(spec);
        }
        SimOptions opts;
        opts.record_events = record_events;
        const ClusterPlan plan = build_plan(layers.front(), p.ctx.scheme, p.design);
        const ClusterTrace trace =
            simulate_cluster(plan, layers, p.design, p.ctx, platform, opts);
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const auto& lt = trace.layers[li];
            const Cycles model = p.layers[li].lat;
            const double pct = 100.0 * std::abs(static_cast<double>(lt.cycles - model)) /
                               static_cast<double>(model);
            out.max_deviation_pct = std::max(out.max_deviation_pct, pct);
            // The slowest node stands for the layer.
            const SimTrace* slowest = &lt.nodes.front();
            std::int64_t events = 0;
            for (const auto& n : lt.nodes) {
                events += n.event_count;
                if (n.total_cycles > slowest->total_cycles) slowest = &n;
            }
            dev.rows.push_back({layers[li].name, model, lt.cycles, pct,
                                std::string(to_string(p.layers[li].bottleneck)),
                                std::string(to_string(stall_attribution(*slowest))), events,
                                static_cast<std::int64_t>(lt.nodes.size())});
            sim_total += lt.cycles;
            if (record_events) out.traces.emplace_back(layers[li].name, *slowest);
        }
        if (trace.bandwidth_warning)
            r.notes.push_back("inter-FPGA link demand exceeds capacity in group " +
                              std::to_string(gi));
    }
    r.sections.push_back(std::move(dev));
    add_totals(r, doc, points, freq_mhz);
    r.totals.emplace_back("sim_cycles", sim_total);
    r.totals.emplace_back("max_deviation_pct", out.max_deviation_pct);
    return out;
}

Report plan_report(const NetworkFile& net, const PlatformSpec& platform, DesignDocument& doc) {
    const auto points = evaluate_document(net, platform, doc);
    Report r;
    r.command = "plan";
    add_assumptions(r, net, platform, doc,
                    effective_freq_mhz(std::nullopt, platform, doc.precision));

    Section layers{"layers",
                   {"layer", "Pb", "Pr", "Pc", "Pm", "grid", "move_in", "move_bits",
                    "row_bits_per_round", "col_bits_per_round", "demand_bits_per_cycle",
                    "capacity_bits_per_cycle", "bandwidth_ok"},
                   {}};
    Section nodes{"nodes", {"layer", "node", "row", "col", "batch", "rows", "cols", "ofm_channels"}, {}};
    Section links{"links", {"from", "to", "kind", "bits_per_round", "rounds"}, {}};

    std::optional<PartitionScheme> prev_scheme;
    std::optional<LayerSpec> prev_layer;
    for (std::size_t gi = 0; gi < doc.groups.size(); ++gi) {
        const auto& g = doc.groups[gi];
        const DesignPoint& p = points[gi];
        for (std::size_t li = 0; li < g.layers.size(); ++li) {
            const LayerSpec& spec = find_layer(net, g.layers[li]).spec;
            const PartitionScheme& sc = p.ctx.scheme;
            const ClusterPlan plan = build_plan(spec, sc, p.design);
            const TileConfig eff = clamp_tile(p.design.tile, slice_layer(spec, sc));
            AcceleratorDesign d = p.design;
            d.tile = eff;
            const TrafficReport traffic = plan_traffic(plan, d, platform, p.layers[li].lat1);

            InterLayerMove move;
            if (prev_scheme)
                move = classify_interlayer(*prev_scheme, sc, *prev_layer, spec.kernel, doc.precision);
            std::int64_t row_bits = 0, col_bits = 0;
            for (const auto& load : traffic.loads) {
                if (load.link.kind == LinkKind::Row) row_bits = std::max(row_bits, load.bits_per_round);
                else col_bits = std::max(col_bits, load.bits_per_round);
            }
            const bool sharing = p.ctx.mode == XferMode::Xfer && sc.fpga_count() > 1;
            layers.rows.push_back(
                {spec.name, sc.pb, sc.pr, sc.pc, sc.pm,
                 std::to_string(plan.grid_rows) + "x" + std::to_string(plan.grid_cols),
                 prev_scheme ? std::string(to_string(move.kind)) : std::string("input"),
                 move.volume_bits, row_bits, col_bits, traffic.verdict.demand_bits_per_cycle,
                 platform.interlink_bw,
                 std::string(!sharing || traffic.verdict.ok ? "yes" : "no")});

            // Node and link detail for the first layer of every distinct scheme.
            if (!prev_scheme || !(*prev_scheme == sc)) {
                for (const auto& n : plan.nodes) {
                    std::string ch;
                    if (n.ofm_channels.size() <= 8) {
                        for (auto c : n.ofm_channels) ch += (ch.empty() ? "" : " ") + std::to_string(c);
                    } else {
                        ch = std::to_string(n.ofm_channels.front()) + ".." +
                             std::to_string(n.ofm_channels.back()) + " step " +
                             std::to_string(sc.pm) + " (" + std::to_string(n.ofm_channels.size()) + ")";
                    }
                    auto range = [](const Range& rg) {
                        return "[" + std::to_string(rg.begin) + "," + std::to_string(rg.end) + ")";
                    };
                    nodes.rows.push_back({spec.name, n.id, n.row, n.col, range(n.batch),
                                          range(n.rows), range(n.cols), ch});
                }
                for (const auto& load : traffic.loads)
                    links.rows.push_back({load.link.from, load.link.to,
                                          std::string(load.link.kind == LinkKind::Row ? "row" : "column"),
                                          load.bits_per_round, load.rounds});
            }
            prev_scheme = sc;
            prev_layer = spec;
        }
    }
    r.sections.push_back(std::move(layers));
    r.sections.push_back(std::move(nodes));
    r.sections.push_back(std::move(links));
    return r;
}

} // namespace cnnfpga
