// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cnnfpga/dse.hpp"
#include "cnnfpga/io.hpp"
#include "cnnfpga/report.hpp"
#include "cnnfpga/sim.hpp"
#include "oracle.hpp"

using namespace cnnfpga;

namespace {

const std::string kData = CNNFPGA_DATA_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

PlatformSpec zcu102() { return load_platform(kData + "/platforms/zcu102.json"); }
NetworkFile network(const std::string& name) {
    return load_network(kData + "/networks/" + name + ".json");
}

const LayerSpec kConv5{"conv5", 1, 256, 192, 13, 13, 3};
const AcceleratorDesign kDesignA{{8, 32, 13, 13}, {2, 2, 2}, Precision::float32()};
const AcceleratorDesign kDesignC{{64, 20, 7, 13}, {4, 8, 4}, Precision::fixed16()};

Outcome dsp_exactness() {
    const auto a = dsp_usage({8, 32, 1, 1}, Precision::float32());
    const auto c = dsp_usage({64, 20, 1, 1}, Precision::fixed16());
    std::ostringstream d;
    d << "float32 <8,32> -> " << a << ", fixed16 <64,20> -> " << c << " (expect 1280, 1280)";
    return {a == 1280 && c == 1280, d.str()};
}

Outcome conv3_reproduction() {
    const auto t0 = Clock::now();
    const auto net = network("alexnet");
    const LayerSpec l = net.conv_layers().at(2);
    const AcceleratorDesign d{{55, 9, 13, 13}, {4, 8, 4}, Precision::fixed16()};
    const PartitionScheme s{4, 1, 1, 1};
    const auto r = xfer_latency(l, d, XferContext::matching(s, d.ports));
    const double dev = std::abs(static_cast<double>(r.lat) - 314000.0) / 314000.0;
    const double secs = seconds_since(t0);
    std::ostringstream out;
    out << "conv3 " << r.lat << " cycles vs 314000, deviation " << dev * 100 << "%, " << secs
        << " s";
    return {dev <= 0.02 && secs < 1.0, out.str()};
}

Outcome network_reproduction() {
    const auto t0 = Clock::now();
    const auto net = network("alexnet");
    const auto platform = zcu102();
    auto doc = load_design(kData + "/designs/alexnet_per_layer_reference.json");
    const auto points = evaluate_document(net, platform, doc);
    const double expected[] = {375000, 514000, 314000, 242000, 167000};
    bool ok = true;
    std::ostringstream out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double got = static_cast<double>(points[i].total);
        const double dev = std::abs(got - expected[i]) / expected[i];
        ok = ok && dev <= 0.10;
        out << doc.groups[i].layers.front() << " " << points[i].total << " (" << dev * 100
            << "%) ";
    }
    const double secs = seconds_since(t0);
    out << secs << " s";
    return {ok && points.size() == 5 && secs < 1.0, out.str()};
}

Outcome cross_layer_claim() {
    const auto t0 = Clock::now();
    const auto net = network("alexnet");
    const auto platform = zcu102();
    const auto layers = net.conv_layers();
    SearchSpace space;
    space.precision = net.precision;
    space.max_fpgas = 4;
    space.ports = {{4, 8, 4}};
    const auto specific = optimize_layer_specific(layers, platform, space);
    const auto uniform = optimize_network_uniform(layers, platform, space);
    const double secs = seconds_since(t0);
    const double ratio =
        static_cast<double>(uniform.best.total) / static_cast<double>(specific.total);
    std::ostringstream out;
    out << "uniform " << uniform.best.total << " / layer-specific " << specific.total
        << " (compute " << specific.compute << " + comm " << specific.comm << ") = " << ratio
        << ", " << secs << " s";
    return {ratio <= 1.05 && secs < 900.0, out.str()};
}

Outcome bottleneck_flips() {
    const auto a = latency(kConv5, kDesignA);
    const auto b = xfer_latency(kConv5, kDesignA,
                                XferContext::matching({1, 1, 1, 2}, kDesignA.ports));
    const auto c = latency(kConv5, kDesignC);
    const auto d = xfer_latency(kConv5, kDesignC,
                                XferContext::matching({1, 2, 1, 1}, kDesignC.ports));
    const double sab = static_cast<double>(a.lat) / static_cast<double>(b.lat);
    const double scd = static_cast<double>(c.lat) / static_cast<double>(d.lat);
    const bool flips = a.bottleneck == Bottleneck::IfmBound &&
                       b.bottleneck == Bottleneck::ComputeBound &&
                       c.bottleneck == Bottleneck::WeightBound &&
                       d.bottleneck == Bottleneck::ComputeBound;
    const bool ranges = sab >= 3.0 && sab <= 3.6 && scd >= 3.0 && scd <= 3.6;
    const bool close = std::abs(sab - 3.30) / 3.30 <= 0.10 && std::abs(scd - 3.43) / 3.43 <= 0.10;
    std::ostringstream out;
    out << "A " << to_string(a.bottleneck) << " -> B " << to_string(b.bottleneck) << " x" << sab
        << "; C " << to_string(c.bottleneck) << " -> D " << to_string(d.bottleneck) << " x"
        << scd;
    return {flips && ranges && close, out.str()};
}

/// Whether the analytic bottleneck is decided by more than one cycle.
bool clear_bottleneck(const LatencyReport& r) {
    const auto& ph = r.phases;
    const Cycles inner = r.trips.in_channel * r.lat1;
    if (std::abs(ph.ofm - inner) <= 1) return false;
    if (ph.ofm > inner) return true;
    std::vector<Cycles> v{ph.compute, ph.link, ph.weight, ph.ifm};
    std::sort(v.rbegin(), v.rend());
    return v[0] - v[1] > 1;
}

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(6);
    int n = 0, worst_i = -1, mismatched = 0, compared = 0;
    double worst = 0.0;
    SimOptions opts;
    opts.record_events = false;
    for (int i = 0; i < 1000; ++i) {
        const auto in =
            oracle::random_instance(rng, i % 2 ? Precision::fixed16() : Precision::float32());
        const auto mode = i % 3 ? XferMode::Xfer : XferMode::Baseline;
        const auto ctx = XferContext::matching(in.scheme, in.design.ports, mode);
        const LayerSpec s = slice_layer(in.layer, in.scheme);
        const auto model = latency(s, in.design, ctx);
        const auto sim = simulate(s, in.design, ctx, opts);
        const double dev = std::abs(static_cast<double>(sim.total_cycles - model.lat)) /
                           static_cast<double>(model.lat);
        if (dev > worst) {
            worst = dev;
            worst_i = i;
        }
        if (clear_bottleneck(model)) {
            ++compared;
            if (stall_attribution(sim) != model.bottleneck) ++mismatched;
        }
        ++n;
    }
    const double secs = seconds_since(t0);
    std::ostringstream out;
    out << n << " instances, max deviation " << worst * 100 << "%";
    if (worst_i >= 0) out << " (#" << worst_i << ")";
    out << ", bottleneck mismatches " << mismatched << "/" << compared << ", " << secs << " s";
    return {n >= 500 && worst < 0.01 && mismatched == 0 && secs < 300.0, out.str()};
}

Outcome xfer_monotonicity() {
    std::mt19937_64 rng(6);
    int violations = 0, n = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto in =
            oracle::random_instance(rng, i % 2 ? Precision::fixed16() : Precision::float32());
        const LayerSpec s = slice_layer(in.layer, in.scheme);
        const auto x = latency(s, in.design, XferContext::matching(in.scheme, in.design.ports));
        const auto b = latency(
            s, in.design, XferContext::matching(in.scheme, in.design.ports, XferMode::Baseline));
        if (x.lat > b.lat) ++violations;
        ++n;
    }
    std::ostringstream out;
    out << violations << " violations in " << n << " instances";
    return {violations == 0, out.str()};
}

double speedup_at(const std::vector<LayerSpec>& layers, const PlatformSpec& platform,
                  SearchSpace space, std::int64_t k, std::string& how) {
    std::vector<std::int64_t> counts;
    for (std::int64_t i = 1; i <= k; ++i) counts.push_back(i);
    space.max_fpgas = k;
    const auto study = scale_study(layers, platform, space, counts);
    const auto& top = study.curve.back();
    std::ostringstream s;
    const auto& sc = top.best.scheme();
    s << "<" << sc.pb << "," << sc.pr << "," << sc.pc << "," << sc.pm << "> "
      << to_string(dominant_bottleneck(study.curve.front().best)) << "->"
      << to_string(dominant_bottleneck(top.best));
    how = s.str();
    return top.speedup;
}

Outcome super_linearity() {
    const auto t0 = Clock::now();
    const auto platform = zcu102();
    bool ok = true;
    std::ostringstream out;
    // Memory-bound configuration: a small pinned tile on lean ports.
    for (const char* name : {"alexnet", "vgg16", "yolo"}) {
        const auto net = network(name);
        SearchSpace space;
        space.precision = net.precision;
        space.ports = {{4, 8, 4}};
        space.tm = {32};
        space.tn = {24};
        space.tr = {4};
        space.tc = {4};
        std::string how;
        const double s2 = speedup_at(net.conv_layers(), platform, space, 2, how);
        ok = ok && s2 > 2.0;
        out << name << " s(2)=" << s2 << " " << how << "; ";
    }
    // Free search on SqueezeNet: compute-bound layers cap the gain.
    const auto sq = network("squeezenet");
    SearchSpace space;
    space.precision = sq.precision;
    space.ports = {{4, 8, 4}};
    std::vector<std::int64_t> counts{1, 2, 3};
    space.max_fpgas = 3;
    const auto study = scale_study(sq.conv_layers(), platform, space, counts);
    bool sublinear = false;
    out << "squeezenet";
    for (const auto& c : study.curve) {
        out << " s(" << c.fpgas << ")=" << c.speedup;
        if (c.fpgas > 1 && c.speedup < static_cast<double>(c.fpgas)) sublinear = true;
    }
    out << "; " << seconds_since(t0) << " s";
    return {ok && sublinear, out.str()};
}

Outcome torus_arithmetic() {
    // 4x4 torus, fixed16, one lane per peer channel.
    const PartitionScheme s{4, 1, 1, 4};
    const auto rate = torus_stream_rate(s, Precision::fixed16(), 1, 1);
    const bool fits = rate <= 256;
    const bool flips = rate > 143;
    std::ostringstream out;
    out << "demand " << rate << " bits/cycle (expect 144), fits 256: " << (fits ? "yes" : "no")
        << ", violates 143: " << (flips ? "yes" : "no");
    return {rate == 144 && fits && flips, out.str()};
}

Outcome pruning_soundness() {
    std::mt19937_64 rng(10);
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    const PlatformSpec platform{"small", 256, 400, 256, 256, 64, 0.0};
    int mismatches = 0;
    std::int64_t pruned = 0;
    for (int i = 0; i < 20; ++i) {
        const LayerSpec l{"l", pick(1, 4), pick(1, 64), pick(1, 64), pick(1, 28), pick(1, 28),
                          std::array<std::int64_t, 3>{1, 3, 5}[static_cast<std::size_t>(pick(0, 2))]};
        SearchSpace space;
        space.max_fpgas = pick(1, 4);
        space.ports = {{4, 8, 4}, {2, 12, 2}, {6, 4, 6}};
        const auto fast = optimize_layer(l, platform, space);
        space.prune = false;
        const auto full = optimize_layer(l, platform, space);
        pruned += fast.pruned;
        if (fast.best.total != full.best.total || !(fast.best.design == full.best.design) ||
            !(fast.best.scheme() == full.best.scheme()))
            ++mismatches;
    }
    std::ostringstream out;
    out << mismatches << " mismatches in 20 layers (" << pruned << " points pruned)";
    return {mismatches == 0 && pruned > 0, out.str()};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"DSP formula exactness", dsp_exactness},
        {"AlexNet conv3 within 2%", conv3_reproduction},
        {"AlexNet per-layer rows within 10%", network_reproduction},
        {"uniform within 5% of layer-specific", cross_layer_claim},
        {"XFER bottleneck flips", bottleneck_flips},
        {"simulator agrees with the model", oracle_equivalence},
        {"XFER never slower than baseline", xfer_monotonicity},
        {"super-linear and sub-linear scaling", super_linearity},
        {"torus bandwidth arithmetic", torus_arithmetic},
        {"pruning soundness", pruning_soundness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
