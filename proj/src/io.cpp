#include "cnnfpga/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cnnfpga {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const std::string& origin) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

std::int64_t positive(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ParseError(where + ": field '" + key + "' must be an integer");
    const auto n = v.get<std::int64_t>();
    if (n < 1) throw ParseError(where + ": field '" + key + "' must be >= 1");
    return n;
}

std::int64_t positive_or(const json& obj, const char* key, std::int64_t fallback,
                         const std::string& where) {
    return obj.contains(key) ? positive(obj, key, where) : fallback;
}

std::string string_or(const json& obj, const char* key, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return obj.at(key).get<std::string>();
}

Precision precision_field(const json& obj, const std::string& where) {
    try {
        return parse_precision(string_or(obj, "precision", "fixed16"));
    } catch (const std::invalid_argument& e) {
        throw ParseError(where + ": " + e.what());
    }
}

LayerKind parse_kind(const std::string& s, const std::string& where) {
    if (s == "conv") return LayerKind::Conv;
    if (s == "pool") return LayerKind::Pool;
    if (s == "fc") return LayerKind::Fc;
    if (s == "other") return LayerKind::Other;
    throw ParseError(where + ": unknown layer type '" + s + "'");
}

std::vector<std::int64_t> int_array(const json& obj, const char* key, std::size_t count,
                                    const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_array() || obj.at(key).size() != count)
        throw ParseError(where + ": field '" + key + "' must be an array of " +
                         std::to_string(count) + " integers");
    std::vector<std::int64_t> out;
    for (const auto& v : obj.at(key)) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
            throw ParseError(where + ": field '" + key + "' must hold integers >= 1");
        out.push_back(v.get<std::int64_t>());
    }
    return out;
}

} // namespace

std::string_view to_string(LayerKind k) {
    switch (k) {
    case LayerKind::Conv: return "conv";
    case LayerKind::Pool: return "pool";
    case LayerKind::Fc: return "fc";
    case LayerKind::Other: return "other";
    }
    return "?";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<LayerSpec> NetworkFile::conv_layers() const {
    std::vector<LayerSpec> out;
    for (const auto& l : layers)
        if (l.modeled()) out.push_back(l.spec);
    return out;
}

NetworkFile parse_network(std::string_view text, const std::string& origin) {
    const json doc = parse_json(text, origin);
    if (!doc.is_object()) throw ParseError(origin + ": expected a JSON object");
    NetworkFile net;
    try {
        net.name = string_or(doc, "name", "network");
    } catch (const ParseError& e) {
        throw ParseError(origin + ": " + e.what());
    }
    net.precision = precision_field(doc, origin);
    net.batch = positive_or(doc, "batch", 1, origin);
    if (!doc.contains("layers") || !doc.at("layers").is_array())
        throw ParseError(origin + ": missing 'layers' array");

    std::size_t index = 0;
    for (const auto& item : doc.at("layers")) {
        const std::string where = origin + ": layer " + std::to_string(index++);
        if (!item.is_object()) throw ParseError(where + ": expected an object");
        NetworkLayer layer;
        try {
            layer.name = string_or(item, "name", "layer" + std::to_string(index - 1));
            layer.kind = parse_kind(string_or(item, "type", "conv"), where);
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (layer.kind == LayerKind::Conv) {
            const std::string at = where + " (" + layer.name + ")";
            layer.groups = positive_or(item, "groups", 1, at);
            LayerSpec& s = layer.spec;
            s.name = layer.name;
            s.batch = positive_or(item, "B", net.batch, at);
            s.out_channels = positive(item, "M", at);
            s.in_channels = positive(item, "N", at);
            s.rows = positive(item, "R", at);
            s.cols = positive(item, "C", at);
            s.kernel = positive(item, "K", at);
            if (s.out_channels % layer.groups != 0 || s.in_channels % layer.groups != 0)
                throw ParseError(at + ": groups must divide M and N");
            s.in_channels /= layer.groups;
        }
        net.layers.push_back(std::move(layer));
    }
    if (net.conv_layers().empty()) throw ParseError(origin + ": no conv layers");
    return net;
}

NetworkFile load_network(const std::filesystem::path& path) {
    return parse_network(read_file(path), path.string());
}

PlatformSpec parse_platform(std::string_view text, const std::string& origin) {
    const json doc = parse_json(text, origin);
    if (!doc.is_object()) throw ParseError(origin + ": expected a JSON object");
    PlatformSpec p;
    try {
        p.name = string_or(doc, "name", "platform");
    } catch (const ParseError& e) {
        throw ParseError(origin + ": " + e.what());
    }
    p.dsp_budget = positive(doc, "dsp", origin);
    p.bram_budget = positive(doc, "bram18k", origin);
    p.bus_width = positive(doc, "bus_width_bits", origin);
    if (doc.contains("interlink_bits_per_cycle")) {
        const json& v = doc.at("interlink_bits_per_cycle");
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
            throw ParseError(origin + ": 'interlink_bits_per_cycle' must be an integer >= 0");
        p.interlink_bw = v.get<std::int64_t>();
    } else {
        p.interlink_bw = 0;
    }
    if (doc.contains("port_bits_per_cycle")) p.port_bw = positive(doc, "port_bits_per_cycle", origin);
    if (doc.contains("freq_mhz")) {
        const json& v = doc.at("freq_mhz");
        if (!v.is_number() || v.get<double>() <= 0.0)
            throw ParseError(origin + ": 'freq_mhz' must be a positive number");
        p.freq_mhz = v.get<double>();
    }
    return p;
}

PlatformSpec load_platform(const std::filesystem::path& path) {
    return parse_platform(read_file(path), path.string());
}

double effective_freq_mhz(std::optional<double> flag, const PlatformSpec& platform,
                          Precision precision) {
    if (flag && *flag > 0.0) return *flag;
    if (platform.freq_mhz > 0.0) return platform.freq_mhz;
    return precision == Precision::float32() ? 100.0 : 200.0;
}

std::string write_design(const DesignDocument& doc) {
    json out;
    out["network"] = doc.network;
    out["platform"] = doc.platform;
    out["mode"] = doc.mode;
    out["precision"] = std::string(to_string(doc.precision));
    out["total_cycles"] = doc.total;
    json groups = json::array();
    for (const auto& g : doc.groups) {
        const auto& t = g.design.tile;
        const auto& p = g.design.ports;
        const auto& s = g.ctx.scheme;
        json layers = json::array();
        for (std::size_t i = 0; i < g.layers.size(); ++i)
            layers.push_back({{"name", g.layers[i]}, {"cycles", i < g.cycles.size() ? g.cycles[i] : 0}});
        groups.push_back({{"tile", {t.tm, t.tn, t.tr, t.tc}},
                          {"ports", {p.ip, p.wp, p.op}},
                          {"partition", {s.pb, s.pr, s.pc, s.pm}},
                          {"link_lanes", {g.ctx.ip_b2b, g.ctx.wp_b2b}},
                          {"xfer", g.ctx.mode == XferMode::Xfer},
                          {"layers", layers},
                          {"cycles", g.total}});
    }
    out["groups"] = groups;
    return out.dump(2) + "\n";
}

DesignDocument parse_design(std::string_view text, const std::string& origin) {
    const json doc = parse_json(text, origin);
    if (!doc.is_object()) throw ParseError(origin + ": expected a JSON object");
    DesignDocument d;
    try {
        d.network = string_or(doc, "network", "");
        d.platform = string_or(doc, "platform", "");
        d.mode = string_or(doc, "mode", "fixed");
    } catch (const ParseError& e) {
        throw ParseError(origin + ": " + e.what());
    }
    d.precision = precision_field(doc, origin);
    if (!doc.contains("groups") || !doc.at("groups").is_array() || doc.at("groups").empty())
        throw ParseError(origin + ": missing 'groups' array");
    std::size_t index = 0;
    for (const auto& item : doc.at("groups")) {
        const std::string where = origin + ": group " + std::to_string(index++);
        if (!item.is_object()) throw ParseError(where + ": expected an object");
        DesignGroup g;
        const auto t = int_array(item, "tile", 4, where);
        const auto p = int_array(item, "ports", 3, where);
        const auto s = int_array(item, "partition", 4, where);
        g.design = {{t[0], t[1], t[2], t[3]}, {p[0], p[1], p[2]}, d.precision};
        g.ctx.scheme = {s[0], s[1], s[2], s[3]};
        if (item.contains("link_lanes")) {
            const auto l = int_array(item, "link_lanes", 2, where);
            g.ctx.ip_b2b = l[0];
            g.ctx.wp_b2b = l[1];
        } else {
            g.ctx.ip_b2b = p[0];
            g.ctx.wp_b2b = p[1];
        }
        g.ctx.mode = item.value("xfer", true) ? XferMode::Xfer : XferMode::Baseline;
        if (!item.contains("layers") || !item.at("layers").is_array())
            throw ParseError(where + ": missing 'layers' array");
        for (const auto& l : item.at("layers")) {
            if (l.is_string()) {
                g.layers.push_back(l.get<std::string>());
                g.cycles.push_back(0);
            } else if (l.is_object() && l.contains("name") && l.at("name").is_string()) {
                g.layers.push_back(l.at("name").get<std::string>());
                g.cycles.push_back(l.value("cycles", std::int64_t{0}));
            } else {
                throw ParseError(where + ": layer entries need a 'name'");
            }
        }
        g.total = item.value("cycles", std::int64_t{0});
        d.groups.push_back(std::move(g));
    }
    d.total = doc.value("total_cycles", std::int64_t{0});
    return d;
}

DesignDocument load_design(const std::filesystem::path& path) {
    return parse_design(read_file(path), path.string());
}

std::vector<std::int64_t> parse_int_list(std::string_view text, std::size_t count,
                                         std::string_view what) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view part = text.substr(pos, comma - pos);
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || v < 1)
            throw ParseError(std::string(what) + ": expected " + std::to_string(count) +
                             " comma-separated positive integers, got '" + std::string(text) + "'");
        out.push_back(v);
        pos = comma + 1;
    }
    if (out.size() != count)
        throw ParseError(std::string(what) + ": expected " + std::to_string(count) +
                         " comma-separated positive integers, got '" + std::string(text) + "'");
    return out;
}

} // namespace cnnfpga
