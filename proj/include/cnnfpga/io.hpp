#pragma once

// Network, platform and design documents (JSON).
//
// Network file:
//   { "name": "alexnet", "precision": "fixed16", "batch": 4,
//     "layers": [ { "name": "conv1", "type": "conv", "B": 4, "M": 96, "N": 3,
//                   "R": 55, "C": 55, "K": 11, "groups": 1 }, ... ] }
//   "B" defaults to the network batch. N is the total input channel count;
//   grouped layers are modeled per group, i.e. with N/groups.
// Platform file:
//   { "name": "zcu102", "dsp": 2520, "bram18k": 1824, "bus_width_bits": 256,
//     "interlink_bits_per_cycle": 256, "port_bits_per_cycle": 64,
//     "freq_mhz": 200 }   (port width and clock optional)

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cnnfpga/model.hpp"
#include "cnnfpga/xfer.hpp"

namespace cnnfpga {

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class LayerKind { Conv, Pool, Fc, Other };

std::string_view to_string(LayerKind k);

struct NetworkLayer {
    std::string name;
    LayerKind kind = LayerKind::Conv;
    std::int64_t groups = 1;
    LayerSpec spec; // meaningful for conv layers only

    bool modeled() const { return kind == LayerKind::Conv; }
};

struct NetworkFile {
    std::string name;
    Precision precision = Precision::fixed16();
    std::int64_t batch = 1;
    std::vector<NetworkLayer> layers;

    /// The modeled layers, in file order.
    std::vector<LayerSpec> conv_layers() const;
};

NetworkFile parse_network(std::string_view text, const std::string& origin = "<network>");
NetworkFile load_network(const std::filesystem::path& path);

PlatformSpec parse_platform(std::string_view text, const std::string& origin = "<platform>");
PlatformSpec load_platform(const std::filesystem::path& path);

/// Clock for wall-clock figures: explicit flag, else the platform, else
/// 200 MHz for fixed16 and 100 MHz for float32.
double effective_freq_mhz(std::optional<double> flag, const PlatformSpec& platform,
                          Precision precision);

/// One design shared by a set of layers. A uniform design is one group
/// over every layer, a per-layer result one group per layer.
struct DesignGroup {
    AcceleratorDesign design;
    XferContext ctx;
    std::vector<std::string> layers;
    std::vector<Cycles> cycles; // per layer, as evaluated when written
    Cycles total = 0;
};

struct DesignDocument {
    std::string network;
    std::string platform;
    std::string mode; // "uniform", "per-layer" or "fixed"
    Precision precision = Precision::fixed16();
    std::vector<DesignGroup> groups;
    Cycles total = 0;
};

std::string write_design(const DesignDocument& doc);
DesignDocument parse_design(std::string_view text, const std::string& origin = "<design>");
DesignDocument load_design(const std::filesystem::path& path);

/// "a,b,c" with exactly `count` positive integers; throws ParseError.
std::vector<std::int64_t> parse_int_list(std::string_view text, std::size_t count,
                                         std::string_view what);

std::string read_file(const std::filesystem::path& path);

} // namespace cnnfpga
