// cnnfpga: model, optimize, scale, simulate and plan tiled CNN accelerators
// on single- and multi-FPGA clusters.
//
// Exit codes: 0 ok, 2 parse error, 3 infeasible design or search space,
// 4 simulation fault or model/simulator disagreement above 1%.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cnnfpga/report.hpp"

using namespace cnnfpga;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSimFault = 4;
constexpr double kMaxDeviationPct = 1.0;

struct Common {
    std::string network;
    std::string platform;
    std::string precision;
    std::string format = "table";
    std::string out;
    double freq_mhz = 0.0;
};

struct DesignFlags {
    std::string tile;
    std::string ports;
    std::string partition;
    std::string design;
    bool baseline = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--network", c.network, "Network JSON file")->required();
    cmd->add_option("--platform", c.platform, "Platform JSON file")->required();
    cmd->add_option("--precision", c.precision, "Override the network precision")
        ->check(CLI::IsMember({"float32", "fixed16"}));
    cmd->add_option("--format", c.format, "Report format")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_option("--freq-mhz", c.freq_mhz, "Clock for wall-clock figures");
}

void add_design(CLI::App* cmd, DesignFlags& d) {
    cmd->add_option("--tile", d.tile, "Tm,Tn,Tr,Tc");
    cmd->add_option("--ports", d.ports, "Ip,Wp,Op memory lanes");
    cmd->add_option("--partition", d.partition, "Pb,Pr,Pc,Pm");
    cmd->add_option("--design", d.design, "Design document written by optimize");
    cmd->add_flag("--baseline", d.baseline, "Replicate shared data instead of XFER exchange");
}

struct Inputs {
    NetworkFile net;
    PlatformSpec platform;
    Precision precision;
    double freq = 0.0;
};

Inputs load_inputs(const Common& c) {
    Inputs in;
    in.net = load_network(c.network);
    in.platform = load_platform(c.platform);
    in.precision = in.net.precision;
    if (!c.precision.empty()) in.precision = parse_precision(c.precision);
    in.freq = effective_freq_mhz(c.freq_mhz > 0.0 ? std::optional<double>(c.freq_mhz) : std::nullopt,
                                 in.platform, in.precision);
    return in;
}

/// Quarter of the lanes for IFM and OFM, half for weights.
PortConfig default_ports(Precision p, const PlatformSpec& platform) {
    const std::int64_t lanes = std::max<std::int64_t>(platform.bus_width / p.bits(), 3);
    const std::int64_t io = std::max<std::int64_t>(lanes / 4, 1);
    return {io, lanes - 2 * io, io};
}

PortConfig ports_of(const std::string& text) {
    const auto v = parse_int_list(text, 3, "--ports");
    return {v[0], v[1], v[2]};
}

PartitionScheme scheme_of(const std::string& text) {
    const auto v = parse_int_list(text, 4, "--partition");
    return {v[0], v[1], v[2], v[3]};
}

DesignDocument design_from_flags(const Inputs& in, const DesignFlags& f) {
    if (!f.design.empty()) {
        return load_design(f.design);
    }
    if (f.tile.empty()) throw ParseError("either --tile or --design is required");
    const auto t = parse_int_list(f.tile, 4, "--tile");
    AcceleratorDesign design{{t[0], t[1], t[2], t[3]},
                             f.ports.empty() ? default_ports(in.precision, in.platform)
                                             : ports_of(f.ports),
                             in.precision};
    const PartitionScheme scheme = f.partition.empty() ? PartitionScheme{} : scheme_of(f.partition);
    const XferContext ctx = XferContext::matching(
        scheme, design.ports, f.baseline ? XferMode::Baseline : XferMode::Xfer);
    return uniform_document(in.net, in.platform, design, ctx);
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytic model, design-space search and simulator for tiled CNN accelerators "
                 "on FPGA clusters"};
    app.require_subcommand(1);

    Common model_c, opt_c, scale_c, sim_c, plan_c;
    DesignFlags model_d, sim_d, plan_d;

    auto* model = app.add_subcommand("model", "Evaluate a fixed design layer by layer");
    add_common(model, model_c);
    add_design(model, model_d);
    model->add_option("--out", model_c.out, "Write the report here instead of stdout");

    auto* optimize = app.add_subcommand("optimize", "Search the best design");
    add_common(optimize, opt_c);
    std::int64_t fpgas = 1;
    bool per_layer = false, uniform = false, opt_baseline = false, no_prune = false;
    std::string opt_ports, opt_tile, opt_partition;
    unsigned workers = 0;
    optimize->add_option("--fpgas", fpgas, "Largest cluster to consider")->check(CLI::PositiveNumber);
    auto* pl = optimize->add_flag("--per-layer", per_layer, "Independent optimum per layer");
    optimize->add_flag("--uniform", uniform, "One design for every layer (default)")->excludes(pl);
    optimize->add_option("--ports", opt_ports, "Fix the lanes Ip,Wp,Op");
    optimize->add_option("--tile", opt_tile, "Fix the tile Tm,Tn,Tr,Tc");
    optimize->add_option("--partition", opt_partition, "Fix the scheme Pb,Pr,Pc,Pm");
    optimize->add_flag("--baseline", opt_baseline, "Replicate shared data instead of XFER exchange");
    optimize->add_flag("--no-prune", no_prune, "Disable the compute lower-bound pruning");
    optimize->add_option("--workers", workers, "Search threads (0 = all cores)");
    optimize->add_option("--out", opt_c.out, "Write the best-design document here");

    auto* scale = app.add_subcommand("scale", "Best design for 1..N FPGAs and its speedup");
    add_common(scale, scale_c);
    scale_c.format = "csv";
    std::int64_t max_fpgas = 1;
    std::string scale_ports, scale_tile;
    bool scale_baseline = false;
    scale->add_option("--max-fpgas", max_fpgas, "Largest cluster")->check(CLI::PositiveNumber);
    scale->add_option("--ports", scale_ports, "Fix the lanes Ip,Wp,Op");
    scale->add_option("--tile", scale_tile, "Fix the tile Tm,Tn,Tr,Tc");
    scale->add_flag("--baseline", scale_baseline, "Replicate shared data instead of XFER exchange");
    scale->add_option("--out", scale_c.out, "Write the CSV here instead of stdout");

    auto* simulate = app.add_subcommand("simulate", "Compare the model with the event simulator");
    add_common(simulate, sim_c);
    add_design(simulate, sim_d);
    std::string trace_path;
    simulate->add_option("--trace", trace_path, "Write the event log of the slowest node");
    simulate->add_option("--out", sim_c.out, "Write the report here instead of stdout");

    auto* plan = app.add_subcommand("plan", "Cluster layout, link loads and inter-layer moves");
    add_common(plan, plan_c);
    add_design(plan, plan_d);
    plan->add_option("--out", plan_c.out, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (*model) {
            const Inputs in = load_inputs(model_c);
            DesignDocument doc = design_from_flags(in, model_d);
            if (!model_c.precision.empty()) doc.precision = in.precision;
            const Report r = model_report(in.net, in.platform, doc, in.freq);
            emit(render(r, parse_format(model_c.format)), model_c.out);
        } else if (*optimize) {
            const Inputs in = load_inputs(opt_c);
            OptimizeOptions o;
            o.per_layer = per_layer;
            o.space.precision = in.precision;
            o.space.max_fpgas = fpgas;
            o.space.mode = opt_baseline ? XferMode::Baseline : XferMode::Xfer;
            o.space.prune = !no_prune;
            o.space.workers = workers;
            if (!opt_ports.empty()) o.space.ports = {ports_of(opt_ports)};
            if (!opt_tile.empty()) {
                const auto t = parse_int_list(opt_tile, 4, "--tile");
                o.space.tm = {t[0]};
                o.space.tn = {t[1]};
                o.space.tr = {t[2]};
                o.space.tc = {t[3]};
            }
            if (!opt_partition.empty()) o.space.schemes = {scheme_of(opt_partition)};
            const OptimizeOutcome res = run_optimize(in.net, in.platform, o, in.freq);
            std::cout << render(res.report, parse_format(opt_c.format));
            if (!opt_c.out.empty()) emit(write_design(res.document), opt_c.out);
        } else if (*scale) {
            const Inputs in = load_inputs(scale_c);
            SearchSpace s;
            s.precision = in.precision;
            s.mode = scale_baseline ? XferMode::Baseline : XferMode::Xfer;
            if (!scale_ports.empty()) s.ports = {ports_of(scale_ports)};
            if (!scale_tile.empty()) {
                const auto t = parse_int_list(scale_tile, 4, "--tile");
                s.tm = {t[0]};
                s.tn = {t[1]};
                s.tr = {t[2]};
                s.tc = {t[3]};
            }
            const Report r = scale_report(in.net, in.platform, s, max_fpgas);
            emit(render(r, parse_format(scale_c.format)), scale_c.out);
        } else if (*simulate) {
            const Inputs in = load_inputs(sim_c);
            DesignDocument doc = design_from_flags(in, sim_d);
            if (!sim_c.precision.empty()) doc.precision = in.precision;
            const SimulateOutcome res =
                run_simulate(in.net, in.platform, doc, in.freq, !trace_path.empty());
            emit(render(res.report, parse_format(sim_c.format)), sim_c.out);
            if (!trace_path.empty()) {
                std::ofstream out(trace_path);
                if (!out) throw ParseError("cannot write '" + trace_path + "'");
                for (const auto& [name, trace] : res.traces) {
                    out << "# layer " << name << " cycles " << trace.total_cycles
                        << (trace.log_truncated ? " truncated" : "") << '\n';
                    write_event_log(out, trace);
                }
            }
            if (res.max_deviation_pct > kMaxDeviationPct) {
                std::cerr << "error: model and simulator disagree by " << res.max_deviation_pct
                          << "% (limit " << kMaxDeviationPct << "%)\n";
                return kExitSimFault;
            }
        } else if (*plan) {
            const Inputs in = load_inputs(plan_c);
            DesignDocument doc = design_from_flags(in, plan_d);
            if (!plan_c.precision.empty()) doc.precision = in.precision;
            const Report r = plan_report(in.net, in.platform, doc);
            emit(render(r, parse_format(plan_c.format)), plan_c.out);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const DesignRejected& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const InfeasibleDesign& e) {
        std::cerr << "error: infeasible design:\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v.message << '\n';
        return kExitInfeasible;
    } catch (const NoFeasibleDesign& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const SimulationFault& e) {
        std::cerr << "error: simulation fault: " << e.what() << '\n';
        return kExitSimFault;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
