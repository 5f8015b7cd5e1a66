#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mimodf/croc.hpp"
#include "mimodf/inversion.hpp"
#include "mimodf/protocol.hpp"

namespace mimodf {

/// Parse failure; `line` is 1-based, 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

enum class EngineSelection { MonteCarlo, Analytic, Both };

struct ScenarioSpec {
    ProtocolKind kind;
    int K;
    int N;
    double snr_db;
    PowerConstraint constraint;

    std::string id() const;
};

struct ExperimentConfig {
    std::vector<ProtocolKind> protocols;
    std::vector<int> K{2};
    std::vector<int> N{2};
    std::vector<double> snr_db{0.0};
    std::vector<PowerConstraint> constraints{PowerConstraint::UnitPower};
    LocalSensor sensor;
    EngineSelection engine = EngineSelection::Both;
    long long trials = 100000;
    int nodes = 500;
    std::optional<MgfBackend> backend;
    int grid_points = 101;
    std::optional<std::pair<double, double>> grid_range;  // fixed [lo, hi]; pilot run otherwise
    std::uint64_t seed = 0x5eed5eedULL;
    bool common_random_numbers = false;
    unsigned workers = 1;
    std::filesystem::path output_dir = "out";

    /// Cartesian product of the scenario axes, in file order.
    std::vector<ScenarioSpec> scenarios() const;
};

double db_to_linear(double db);

/// Flat `key = value` document; `#` starts a comment, lists are
/// comma-separated. Unknown keys and out-of-range values are rejected.
ExperimentConfig parse_config(std::string_view text);

/// parse_config, then apply the output-directory environment override.
ExperimentConfig load_config(const std::filesystem::path& file);

inline constexpr const char* kOutputDirEnv = "MIMODF_OUTPUT_DIR";

struct ResultRow {
    std::string scenario_id;
    std::string protocol;
    int K = 0;
    int N = 0;
    double snr_db = 0;
    std::string constraint;
    std::string engine;  // mc, analytic or bound (gamma then holds g)
    double gamma = 0;
    double q_f = 0;
    double q_d = 0;
    double q_m = 0;

    bool operator==(const ResultRow&) const = default;
};

using ResultTable = std::vector<ResultRow>;

inline constexpr std::string_view kCsvHeader = "scenario_id,protocol,K,N,snr_db,constraint,engine,gamma,q_f,q_d,q_m";

/// Shortest round-trip decimal representation, independent of locale.
std::string format_double(double v);

std::string emit_csv(const ResultTable& table);
ResultTable parse_csv(std::string_view text);

void append_curve(ResultTable& table, const ScenarioSpec& spec, const CrocCurve& curve);
void append_bound(ResultTable& table, const ScenarioSpec& spec, const std::vector<BoundPoint>& bound);

struct SweepReport {
    ResultTable table;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> errors;  // "scenario: message"

    bool ok() const { return errors.empty(); }
};

/// Runs every scenario and writes `<id>.csv` per scenario, `combined.csv`,
/// and `diagnostics.csv` (per-point MC minus analytic) when both engines run.
SweepReport run_sweep(const ExperimentConfig& config);

/// Log-log CROC figure: q_f on x, q_m on y.
std::string render_plot(const ResultTable& table, const std::string& title = "CROC");

}  // namespace mimodf
