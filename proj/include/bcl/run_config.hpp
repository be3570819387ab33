#pragma once

// Run configuration shared by every subcommand, with a strict JSON mapping.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bcl/scan_fit.hpp"

namespace bcl {

struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 1;

    /// "start:stop:points"; throws ConfigError when malformed.
    static GridSpec parse(const std::string &text);
    std::vector<double> values() const;
};

/// Bin layout: either `bins` uniform bins, or explicit positions with
/// optional counts (spread evenly when absent).
struct InhomSpec {
    std::optional<int> bins;
    std::vector<double> positions;
    std::vector<int> counts;

    InhomConfig layout(int n_atoms) const;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
    ModelParams params;
    std::optional<double> alpha;
    Method method = Method::Ed;
    std::optional<GridSpec> grid;
    /// Atom numbers for the scaling command.
    std::vector<int> n_list;
    std::optional<std::pair<double, double>> bracket;
    double min_tol = 1e-4;
    TruncationPolicy truncation;
    std::optional<InhomSpec> inhom;
    std::optional<PumpLevelScheme> pump;
    int threads = 1;
    std::string out;
    OutputFormat format = OutputFormat::Csv;

    /// Effective model parameters: pump-derived w and 1/T2 when a pump
    /// scheme is configured.
    ModelParams model() const;
    /// Solver settings for `n_atoms` atoms (bins are laid out for that N).
    MethodSettings settings(int n_atoms) const;
    void validate() const;
};

/// 2J from a J bound given in J units (integer or half-integer).
int two_j_from_jmax(double jmax);
OutputFormat parse_format(const std::string &name);

/// Strict reader: unknown keys and wrong types throw ConfigError. A JSON
/// output sidecar is accepted as well; its embedded snapshot is used.
RunConfig config_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const RunConfig &c);
RunConfig load_config(const std::string &path);

} // namespace bcl
