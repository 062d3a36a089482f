#pragma once

// Experiment runner behind the command-line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chirpwave/config.hpp"
#include "chirpwave/simulations.hpp"

namespace chirpwave {

inline constexpr std::string_view kVersion = "0.1.0";

/// Names accepted by run(), in documentation order.
const std::vector<std::string>& experiment_names();

/// Scenario knobs that are not frame parameters.
struct Scenario {
    double snr_db = kInfinity;
    std::optional<double> isr_db;
    std::size_t target_delay = 10;
    std::size_t interferer_delay = 20;
    std::size_t velocity_bin = 0;
    std::size_t paths = 3;
    SensingChain chain = SensingChain::MatchedFilter;
    Detector detector = Detector::Ml;
    std::vector<WaveformKind> waveforms;
    /// Constellation order and chirp order used for the chirp-modulated
    /// curve in BER runs (equal spectral efficiency with the QPSK curves).
    std::size_t cm_Q = 2;
    std::size_t cm_P = 16;
};

struct Sweep {
    std::string variable;  // empty for experiments without a sweep
    std::vector<double> values;
};

struct ExperimentSpec {
    std::string name;
    WaveformConfig config;
    Scenario scenario;
    Sweep sweep;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // not part of the result; 0 = hardware threads
};

/// Defaults for one experiment. Throws ConfigError for an unknown name.
ExperimentSpec default_spec(const std::string& name);

/// Builds a validated spec from a JSON document with optional keys
/// experiment, config, scenario, sweep, trials, seed, workers. Unknown or
/// mistyped fields throw ConfigError naming the field.
ExperimentSpec parse_config(const nlohmann::json& doc);
ExperimentSpec parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::string& path);

/// Applies `key=value` to a config document before parse_config. Keys may
/// be qualified (config.N, scenario.snr_db, sweep.values) or bare when
/// unambiguous (N, snr_db, trials). Lists are comma separated.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Throws ConfigError on the first violated constraint.
void validate(const ExperimentSpec& spec);

nlohmann::json spec_to_json(const ExperimentSpec& spec);

using Cell = std::variant<double, std::string>;

struct ResultDocument {
    ExperimentSpec spec;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::string x_unit;
    std::vector<std::string> y_units;  // one per column after the first
    std::optional<nlohmann::json> map;
    std::optional<nlohmann::json> summary;
    std::optional<double> wall_time_s;
};

ResultDocument run(const ExperimentSpec& spec);

std::string to_csv(const ResultDocument& doc);
std::string to_json(const ResultDocument& doc);

/// %.9g, with inf / -inf / nan spelled out.
std::string format_number(double v);

}  // namespace chirpwave
