// chirpwave: run one named experiment and write CSV or JSON results.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "chirpwave/errors.hpp"
#include "chirpwave/harness.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

std::string experiment_list() {
    std::string s;
    for (const auto& n : chirpwave::experiment_names()) {
        s += (s.empty() ? "" : ", ") + n;
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chirped DFT-s-OFDM waveform and sensing experiments"};
    std::string experiment;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    unsigned workers = 0;
    bool timing = false;

    app.add_option("experiment", experiment, "One of: " + experiment_list())->required();
    app.add_option("--config", config_path, "JSON experiment file");
    app.add_option("--set", overrides, "Override key=value (repeatable), e.g. N=64 or scenario.snr_db=-5");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--trials", trials, "Monte Carlo trials / frames");
    app.add_option("--workers", workers, "Worker threads (0 = all hardware threads)");
    app.add_option("--out", out_path, "Output file (default stdout)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--timing", timing, "Record wall time in the JSON meta block");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        nlohmann::json doc = config_path.empty() ? nlohmann::json::object() : chirpwave::load_config_file(config_path);
        if (doc.contains("experiment") && doc["experiment"] != experiment) {
            throw chirpwave::ConfigError("experiment: config file names " + doc["experiment"].dump() +
                                         " but the command line asks for \"" + experiment + "\"");
        }
        doc["experiment"] = experiment;
        for (const auto& o : overrides) {
            chirpwave::apply_override(doc, o);
        }
        if (seed) doc["seed"] = *seed;
        if (trials) doc["trials"] = *trials;
        chirpwave::ExperimentSpec spec = chirpwave::parse_config(doc);
        spec.workers = workers;

        const auto start = std::chrono::steady_clock::now();
        chirpwave::ResultDocument result = chirpwave::run(spec);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (timing) {
            result.wall_time_s = elapsed;
        }
        std::cerr << "chirpwave " << experiment << ": " << elapsed << " s\n";

        const std::string text = format == "json" ? chirpwave::to_json(result) : chirpwave::to_csv(result);
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out || !(out << text)) {
                std::cerr << "error: cannot write " << out_path << "\n";
                return kExitUsage;
            }
        }
        return 0;
    } catch (const chirpwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const chirpwave::DimensionError& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const chirpwave::PayloadError& e) {
        std::cerr << "payload error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const chirpwave::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const chirpwave::UndefinedMetricError& e) {
        std::cerr << "undefined metric: " << e.what() << "\n";
        return kExitNumerical;
    }
}
