#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cnnfpga/dse.hpp"
#include "cnnfpga/io.hpp"
#include "cnnfpga/report.hpp"
#include "cnnfpga/sim.hpp"

namespace py = pybind11;
using namespace cnnfpga;

namespace {

Precision precision_arg(const std::string& name) { return parse_precision(name); }

py::dict phases_dict(const PhaseLatencies& p) {
    py::dict d;
    d["ifm"] = p.ifm;
    d["weight"] = p.weight;
    d["ofm"] = p.ofm;
    d["compute"] = p.compute;
    d["link"] = p.link;
    return d;
}

py::dict report_dict(const LatencyReport& r) {
    py::dict d;
    d["phases"] = phases_dict(r.phases);
    d["lat1"] = r.lat1;
    d["lat2"] = r.lat2;
    d["cycles"] = r.lat;
    d["bottleneck"] = std::string(to_string(r.bottleneck));
    d["dsp"] = r.usage.dsps;
    d["bram"] = r.usage.bram_total();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Analytic latency model, XFER partitioning, simulator and design search for "
              "CNN accelerators on FPGA clusters.";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InfeasibleDesign>(m, "InfeasibleDesign", PyExc_RuntimeError);
    py::register_exception<NoFeasibleDesign>(m, "NoFeasibleDesign", PyExc_RuntimeError);
    py::register_exception<SimulationFault>(m, "SimulationFault", PyExc_RuntimeError);

    py::class_<LayerSpec>(m, "Layer")
        .def(py::init([](std::string name, std::int64_t b, std::int64_t mo, std::int64_t n,
                         std::int64_t r, std::int64_t c, std::int64_t k) {
                 return LayerSpec{std::move(name), b, mo, n, r, c, k};
             }),
             py::arg("name"), py::arg("B"), py::arg("M"), py::arg("N"), py::arg("R"),
             py::arg("C"), py::arg("K"))
        .def_readwrite("name", &LayerSpec::name)
        .def_readwrite("B", &LayerSpec::batch)
        .def_readwrite("M", &LayerSpec::out_channels)
        .def_readwrite("N", &LayerSpec::in_channels)
        .def_readwrite("R", &LayerSpec::rows)
        .def_readwrite("C", &LayerSpec::cols)
        .def_readwrite("K", &LayerSpec::kernel)
        .def("__repr__", [](const LayerSpec& l) {
            return "Layer(" + l.name + ", B=" + std::to_string(l.batch) +
                   ", M=" + std::to_string(l.out_channels) + ", N=" + std::to_string(l.in_channels) +
                   ", R=" + std::to_string(l.rows) + ", C=" + std::to_string(l.cols) +
                   ", K=" + std::to_string(l.kernel) + ")";
        });

    m.def("dsp_usage",
          [](std::int64_t tm, std::int64_t tn, const std::string& precision) {
              return dsp_usage({tm, tn, 1, 1}, precision_arg(precision));
          },
          py::arg("tm"), py::arg("tn"), py::arg("precision") = "fixed16");

    m.def("latency",
          [](const LayerSpec& layer, std::array<std::int64_t, 4> tile,
             std::array<std::int64_t, 3> ports, const std::string& precision,
             std::array<std::int64_t, 4> partition, bool xfer) {
              const AcceleratorDesign d{{tile[0], tile[1], tile[2], tile[3]},
                                        {ports[0], ports[1], ports[2]}, precision_arg(precision)};
              const PartitionScheme s{partition[0], partition[1], partition[2], partition[3]};
              const auto ctx =
                  XferContext::matching(s, d.ports, xfer ? XferMode::Xfer : XferMode::Baseline);
              return report_dict(xfer_latency(layer, d, ctx));
          },
          py::arg("layer"), py::arg("tile"), py::arg("ports") = std::array<std::int64_t, 3>{4, 8, 4},
          py::arg("precision") = "fixed16",
          py::arg("partition") = std::array<std::int64_t, 4>{1, 1, 1, 1}, py::arg("xfer") = true,
          "Model of the largest per-node slice. The tile must fit that slice.");

    m.def("simulate",
          [](const LayerSpec& layer, std::array<std::int64_t, 4> tile,
             std::array<std::int64_t, 3> ports, const std::string& precision,
             std::array<std::int64_t, 4> partition, bool xfer) {
              const AcceleratorDesign d{{tile[0], tile[1], tile[2], tile[3]},
                                        {ports[0], ports[1], ports[2]}, precision_arg(precision)};
              const PartitionScheme s{partition[0], partition[1], partition[2], partition[3]};
              const auto ctx =
                  XferContext::matching(s, d.ports, xfer ? XferMode::Xfer : XferMode::Baseline);
              SimOptions o;
              o.record_events = false;
              const auto t = simulate(slice_layer(layer, s), d, ctx, o);
              py::dict out;
              out["cycles"] = t.total_cycles;
              out["trips"] = t.trips;
              out["bottleneck"] = std::string(to_string(stall_attribution(t)));
              py::dict busy, stall;
              for (std::size_t i = 0; i < kSimPhaseCount; ++i) {
                  const auto name = std::string(to_string(static_cast<SimPhase>(i)));
                  busy[name.c_str()] = t.busy[i];
                  stall[name.c_str()] = t.stall[i];
              }
              out["busy"] = busy;
              out["stall"] = stall;
              return out;
          },
          py::arg("layer"), py::arg("tile"), py::arg("ports") = std::array<std::int64_t, 3>{4, 8, 4},
          py::arg("precision") = "fixed16",
          py::arg("partition") = std::array<std::int64_t, 4>{1, 1, 1, 1}, py::arg("xfer") = true);

    m.def("optimize_layer",
          [](const LayerSpec& layer, const std::string& platform_path, std::int64_t fpgas,
             const std::string& precision) {
              SearchSpace space;
              space.precision = precision_arg(precision);
              space.max_fpgas = fpgas;
              const auto r = optimize_layer(layer, load_platform(platform_path), space);
              const auto& b = r.best;
              py::dict out;
              out["cycles"] = b.total;
              out["tile"] = std::array<std::int64_t, 4>{b.design.tile.tm, b.design.tile.tn,
                                                        b.design.tile.tr, b.design.tile.tc};
              out["ports"] = std::array<std::int64_t, 3>{b.design.ports.ip, b.design.ports.wp,
                                                         b.design.ports.op};
              out["partition"] = std::array<std::int64_t, 4>{b.scheme().pb, b.scheme().pr,
                                                             b.scheme().pc, b.scheme().pm};
              out["bottleneck"] = std::string(to_string(b.layers.front().bottleneck));
              out["explored"] = r.explored;
              out["pruned"] = r.pruned;
              return out;
          },
          py::arg("layer"), py::arg("platform"), py::arg("fpgas") = 1,
          py::arg("precision") = "fixed16");

    m.def("torus_stream_rate",
          [](std::array<std::int64_t, 4> partition, const std::string& precision,
             std::int64_t ip_b2b, std::int64_t wp_b2b) {
              return torus_stream_rate({partition[0], partition[1], partition[2], partition[3]},
                                       precision_arg(precision), ip_b2b, wp_b2b);
          },
          py::arg("partition"), py::arg("precision") = "fixed16", py::arg("ip_b2b") = 1,
          py::arg("wp_b2b") = 1);

    m.def("load_network",
          [](const std::string& path) { return load_network(path).conv_layers(); },
          py::arg("path"), "Conv layers of a network file.");

    m.def("model_report",
          [](const std::string& network, const std::string& platform,
             std::array<std::int64_t, 4> tile, std::array<std::int64_t, 3> ports,
             std::array<std::int64_t, 4> partition, const std::string& format) {
              const auto net = load_network(network);
              const auto pf = load_platform(platform);
              const AcceleratorDesign d{{tile[0], tile[1], tile[2], tile[3]},
                                        {ports[0], ports[1], ports[2]}, net.precision};
              const PartitionScheme s{partition[0], partition[1], partition[2], partition[3]};
              auto doc = uniform_document(net, pf, d, XferContext::matching(s, d.ports));
              const auto r =
                  model_report(net, pf, doc, effective_freq_mhz(std::nullopt, pf, net.precision));
              return render(r, parse_format(format));
          },
          py::arg("network"), py::arg("platform"), py::arg("tile"),
          py::arg("ports") = std::array<std::int64_t, 3>{4, 8, 4},
          py::arg("partition") = std::array<std::int64_t, 4>{1, 1, 1, 1},
          py::arg("format") = "json");
}
