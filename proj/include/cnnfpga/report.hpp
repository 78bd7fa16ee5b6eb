#pragma once

// Command-level evaluation and report rendering shared by the CLI and the
// python module.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cnnfpga/dse.hpp"
#include "cnnfpga/io.hpp"
#include "cnnfpga/sim.hpp"

namespace cnnfpga {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Section {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Report {
    std::string command;
    /// Always carries precision, ports and batch.
    std::vector<std::pair<std::string, std::string>> assumptions;
    std::vector<Section> sections;
    std::vector<std::pair<std::string, Cell>> totals;
    std::vector<std::string> notes;

    const Section* section(const std::string& name) const;
};

enum class Format { Table, Csv, Json };

Format parse_format(std::string_view text);
std::string render(const Report& report, Format format);

/// Raised when a fixed design does not fit; carries one line per reason.
class DesignRejected : public std::runtime_error {
  public:
    explicit DesignRejected(std::vector<std::string> reasons);
    const std::vector<std::string>& reasons() const { return reasons_; }

  private:
    std::vector<std::string> reasons_;
};

/// Column set of the per-layer model table; fixed, golden-file tested.
const std::vector<std::string>& model_columns();
/// Column set of the scale-study CSV.
const std::vector<std::string>& scale_columns();

/// Resolves every group of `doc` against the network and evaluates it.
/// Returns the evaluated points in group order; throws DesignRejected or
/// ParseError (unknown layer names).
std::vector<DesignPoint> evaluate_document(const NetworkFile& net, const PlatformSpec& platform,
                                           const DesignDocument& doc);

/// Uniform document covering every conv layer with one design.
DesignDocument uniform_document(const NetworkFile& net, const PlatformSpec& platform,
                                const AcceleratorDesign& design, const XferContext& ctx);

/// Per-layer report of evaluated groups; fills the cycle fields of `doc`.
Report model_report(const NetworkFile& net, const PlatformSpec& platform, DesignDocument& doc,
                    double freq_mhz);

struct OptimizeOptions {
    SearchSpace space;
    bool per_layer = false;
};

struct OptimizeOutcome {
    DesignDocument document;
    Report report;
};

OptimizeOutcome run_optimize(const NetworkFile& net, const PlatformSpec& platform,
                             const OptimizeOptions& options, double freq_mhz);

Report scale_report(const NetworkFile& net, const PlatformSpec& platform, const SearchSpace& space,
                    std::int64_t max_fpgas);

struct SimulateOutcome {
    Report report;
    double max_deviation_pct = 0.0;
    std::vector<std::pair<std::string, SimTrace>> traces;
};

SimulateOutcome run_simulate(const NetworkFile& net, const PlatformSpec& platform,
                             DesignDocument& doc, double freq_mhz, bool record_events);

Report plan_report(const NetworkFile& net, const PlatformSpec& platform, DesignDocument& doc);

/// Bottleneck of the layer contributing the most cycles.
Bottleneck dominant_bottleneck(const DesignPoint& point);

} // namespace cnnfpga
