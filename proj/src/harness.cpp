#include "chirpwave/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "chirpwave/errors.hpp"
#include "chirpwave/metrics.hpp"
#include "chirpwave/sensing.hpp"

namespace chirpwave {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys{"N",      "M",       "Q",     "P",          "L_CP",          "K",
                                        "bandwidth_hz", "B", "carrier_hz", "f_c", "constellation", "waveform",
                                        "M_otfs", "N_otfs", "afdm_c2", "chirp_shape"};
const std::set<std::string> kScenarioKeys{"snr_db", "isr_db",   "target_delay", "interferer_delay", "velocity_bin",
                                          "paths",  "chain",    "detector",     "waveforms",        "cm_Q",
                                          "cm_P"};
const std::set<std::string> kTopKeys{"experiment", "config", "scenario", "sweep", "trials", "seed", "workers"};

// sweep variable per experiment; empty means the experiment takes no sweep
std::string sweep_variable(const std::string& name) {
    if (name == "papr_ccdf") return "lambda_db";
    if (name == "ber_vs_snr") return "snr_db";
    if (name == "pmsr_vs_isr") return "isr_db";
    if (name == "pd_vs_clipping") return "clipping_ratio_db";
    return "";
}

std::vector<double> linspace_step(double first, double last, double step) {
    std::vector<double> v;
    const auto count = static_cast<std::size_t>(std::llround((last - first) / step));
    for (std::size_t i = 0; i <= count; ++i) {
        v.push_back(first + step * static_cast<double>(i));
    }
    return v;
}

double read_double(const json& v, const std::string& field) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity") return kInfinity;
        if (s == "-inf" || s == "-infinity") return -kInfinity;
    }
    throw ConfigError(field + ": expected a number or \"inf\"");
}

std::uint64_t read_u64(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && std::floor(d) == d && d < 1.8e19) {
            return static_cast<std::uint64_t>(d);
        }
    }
    throw ConfigError(field + ": expected a non-negative integer");
}

std::size_t read_size(const json& v, const std::string& field) { return static_cast<std::size_t>(read_u64(v, field)); }

std::string read_string(const json& v, const std::string& field) {
    if (!v.is_string()) {
        throw ConfigError(field + ": expected a string");
    }
    return v.get<std::string>();
}

WaveformKind read_waveform(const json& v, const std::string& field) {
    const auto s = read_string(v, field);
    const auto kind = parse_waveform_kind(s);
    if (!kind) {
        throw ConfigError(field + ": unknown waveform \"" + s + "\"");
    }
    return *kind;
}

void require_object(const json& v, const std::string& field) {
    if (!v.is_object()) {
        throw ConfigError(field + ": expected an object");
    }
}

void apply_config(const json& obj, WaveformConfig& cfg) {
    require_object(obj, "config");
    for (const auto& [key, v] : obj.items()) {
        const std::string field = "config." + key;
        if (key == "N") cfg.N = read_size(v, field);
        else if (key == "M") cfg.M = read_size(v, field);
        else if (key == "Q") cfg.Q = read_size(v, field);
        else if (key == "P") cfg.P = read_size(v, field);
        else if (key == "L_CP") cfg.L_CP = read_size(v, field);
        else if (key == "K") cfg.K = read_size(v, field);
        else if (key == "bandwidth_hz" || key == "B") cfg.bandwidth_hz = read_double(v, field);
        else if (key == "carrier_hz" || key == "f_c") cfg.carrier_hz = read_double(v, field);
        else if (key == "M_otfs") cfg.M_otfs = read_size(v, field);
        else if (key == "N_otfs") cfg.N_otfs = read_size(v, field);
        else if (key == "afdm_c2") cfg.afdm_c2 = read_double(v, field);
        else if (key == "waveform") cfg.waveform = read_waveform(v, field);
        else if (key == "constellation") {
            const auto s = read_string(v, field);
            const auto kind = parse_constellation_kind(s);
            if (!kind) {
                throw ConfigError(field + ": expected \"psk\" or \"qam\"");
            }
            cfg.constellation = *kind;
        } else if (key == "chirp_shape") {
            if (read_string(v, field) != "linear") {
                throw ConfigError(field + ": only \"linear\" is implemented");
            }
        } else {
            throw ConfigError(field + ": unknown field");
        }
    }
}

void apply_scenario(const json& obj, Scenario& sc) {
    require_object(obj, "scenario");
    for (const auto& [key, v] : obj.items()) {
        const std::string field = "scenario." + key;
        if (key == "snr_db") sc.snr_db = read_double(v, field);
        else if (key == "isr_db") sc.isr_db = v.is_null() ? std::nullopt : std::optional<double>(read_double(v, field));
        else if (key == "target_delay") sc.target_delay = read_size(v, field);
        else if (key == "interferer_delay") sc.interferer_delay = read_size(v, field);
        else if (key == "velocity_bin") sc.velocity_bin = read_size(v, field);
        else if (key == "paths") sc.paths = read_size(v, field);
        else if (key == "cm_Q") sc.cm_Q = read_size(v, field);
        else if (key == "cm_P") sc.cm_P = read_size(v, field);
        else if (key == "chain") {
            const auto s = read_string(v, field);
            if (s == "mix") sc.chain = SensingChain::Mix;
            else if (s == "matched_filter") sc.chain = SensingChain::MatchedFilter;
            else throw ConfigError(field + ": expected \"mix\" or \"matched_filter\"");
        } else if (key == "detector") {
            const auto s = read_string(v, field);
            if (s == "ml") sc.detector = Detector::Ml;
            else if (s == "lmmse") sc.detector = Detector::Lmmse;
            else throw ConfigError(field + ": expected \"ml\" or \"lmmse\"");
        } else if (key == "waveforms") {
            if (!v.is_array() || v.empty()) {
                throw ConfigError(field + ": expected a non-empty list of waveform names");
            }
            sc.waveforms.clear();
            for (const auto& w : v) {
                sc.waveforms.push_back(read_waveform(w, field));
            }
        } else {
            throw ConfigError(field + ": unknown field");
        }
    }
}

json number_json(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

json scalar_from_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    return out;
}

std::string column_name(const std::string& prefix, WaveformKind kind) { return prefix + std::string(to_string(kind)); }

// one waveform's config for a BER run
WaveformConfig ber_config(const ExperimentSpec& spec, WaveformKind kind) {
    WaveformConfig cfg = spec.config;
    cfg.waveform = kind;
    if (kind == WaveformKind::DftSOfdmCm) {
        cfg.Q = spec.scenario.cm_Q;
        cfg.P = spec.scenario.cm_P;
        cfg.constellation = ConstellationKind::Psk;
    }
    return cfg;
}

SensingSetup sensing_setup(const ExperimentSpec& spec, WaveformKind kind) {
    SensingSetup s;
    s.cfg = spec.config;
    s.cfg.waveform = kind;
    s.chain = spec.scenario.chain;
    s.snr_db = spec.scenario.snr_db;
    s.isr_db = spec.scenario.isr_db;
    s.interferer_delay = spec.scenario.interferer_delay;
    s.target_delay = spec.scenario.target_delay;
    s.velocity_bin = spec.scenario.velocity_bin;
    s.trials = spec.trials;
    s.seed = spec.seed;
    s.workers = spec.workers;
    return s;
}

std::vector<WaveformKind> waveforms_or_config(const ExperimentSpec& spec) {
    if (spec.scenario.waveforms.empty()) {
        return {spec.config.waveform};
    }
    return spec.scenario.waveforms;
}

double to_db_relative(double v, double ref) {
    if (v <= 0.0) {
        return -kInfinity;
    }
    return 20.0 * std::log10(v / ref);
}

ResultDocument run_papr_ccdf(const ExperimentSpec& spec) {
    ResultDocument doc;
    doc.columns = {"lambda_db"};
    doc.x_unit = "dB";
    std::vector<MetricSeries> curves;
    json summary = json::object();
    const auto kinds = waveforms_or_config(spec);
    for (std::size_t w = 0; w < kinds.size(); ++w) {
        WaveformConfig cfg = spec.config;
        cfg.waveform = kinds[w];
        const auto samples = papr_samples(cfg, spec.trials, trial_seed(spec.seed, 0x1000 + w), spec.workers);
        curves.push_back(ccdf(samples, spec.sweep.values));
        doc.columns.push_back(column_name("ccdf_", kinds[w]));
        doc.y_units.push_back("probability");
        summary[column_name("lambda_at_1e-2_", kinds[w])] = lambda_at_ccdf(samples, 1e-2);
    }
    for (std::size_t i = 0; i < spec.sweep.values.size(); ++i) {
        std::vector<Cell> row{spec.sweep.values[i]};
        for (const auto& c : curves) {
            row.emplace_back(c.points[i].y);
        }
        doc.rows.push_back(std::move(row));
    }
    doc.summary = summary;
    return doc;
}

ResultDocument run_complexity(const ExperimentSpec& spec) {
    ResultDocument doc;
    doc.columns = {"waveform", "multiplications", "normalized_to_ofdm"};
    doc.y_units = {"count", "ratio"};
    for (auto kind : waveforms_or_config(spec)) {
        WaveformConfig cfg = spec.config;
        cfg.waveform = kind;
        const ComplexityReport rep = modulation_complexity(cfg);
        doc.rows.push_back({std::string(to_string(kind)), static_cast<double>(rep.multiplications),
                            rep.normalized_to_ofdm});
    }
    return doc;
}

ResultDocument run_spectral_efficiency(const ExperimentSpec& spec) {
    ResultDocument doc;
    doc.columns = {"waveform", "bits_per_sample"};
    doc.y_units = {"bit/s/Hz"};
    for (auto kind : waveforms_or_config(spec)) {
        WaveformConfig cfg = spec.config;
        cfg.waveform = kind;
        doc.rows.push_back({std::string(to_string(kind)), spectral_efficiency(cfg)});
    }
    return doc;
}

ResultDocument run_ber(const ExperimentSpec& spec) {
    ResultDocument doc;
    doc.columns = {"snr_db"};
    doc.x_unit = "dB";
    std::vector<std::vector<double>> curves;
    json summary = json::object();
    const auto kinds = waveforms_or_config(spec);
    for (std::size_t w = 0; w < kinds.size(); ++w) {
        BerSetup setup;
        setup.cfg = ber_config(spec, kinds[w]);
        setup.snr_db = spec.sweep.values;
        setup.frames = spec.trials;
        setup.paths = spec.scenario.paths;
        setup.detector = spec.scenario.detector;
        setup.seed = spec.seed;
        setup.workers = spec.workers;
        const auto errors = ber_sweep(setup);
        std::vector<double> ber;
        for (const auto& e : errors) {
            ber.push_back(e.rate());
        }
        const auto div = diversity_order(spec.sweep.values, ber);
        summary[column_name("diversity_", kinds[w])] = div ? json(*div) : json(nullptr);
        curves.push_back(std::move(ber));
        doc.columns.push_back(column_name("ber_", kinds[w]));
        doc.y_units.push_back("ber");
    }
    for (std::size_t i = 0; i < spec.sweep.values.size(); ++i) {
        std::vector<Cell> row{spec.sweep.values[i]};
        for (const auto& c : curves) {
            row.emplace_back(c[i]);
        }
        doc.rows.push_back(std::move(row));
    }
    doc.summary = summary;
    return doc;
}

ResultDocument run_mix_profile(const ExperimentSpec& spec) {
    ResultDocument doc;
    doc.columns = {"range_bin", "range_m"};
    doc.x_unit = "bin";
    doc.y_units = {"m"};
    std::vector<RangeProfile> profiles;
    json summary = json::object();
    for (auto kind : waveforms_or_config(spec)) {
        SensingSetup setup = sensing_setup(spec, kind);
        setup.chain = SensingChain::Mix;
        const SensingEcho echo = sensing_echo(setup, 0);
        WaveformConfig cfg = echo.tx.config();
        profiles.push_back(mix_and_range(echo.tx.body(0), echo.rx.body(0), cfg));
        const DetectionReport rep = detect(profiles.back(), spec.scenario.target_delay);
        summary[std::string(to_string(kind))] = {{"peak_bin", rep.range_bin},
                                                 {"range_m", rep.range_m},
                                                 {"pmsr_db", number_json(rep.pmsr_db)},
                                                 {"detected", rep.detected}};
        doc.columns.push_back(column_name("magnitude_db_", kind));
        doc.y_units.push_back("dB");
    }
    const std::size_t n = spec.config.N;
    std::vector<double> peaks;
    for (const auto& p : profiles) {
        peaks.push_back(*std::max_element(p.magnitudes.begin(), p.magnitudes.end()));
    }
    for (std::size_t b = 0; b < n; ++b) {
        std::vector<Cell> row{static_cast<double>(b), static_cast<double>(b) * profiles.front().bin_to_meters};
        for (std::size_t w = 0; w < profiles.size(); ++w) {
            row.emplace_back(to_db_relative(profiles[w].magnitudes[b], peaks[w]));
        }
        doc.rows.push_back(std::move(row));
    }
    doc.summary = summary;
    return doc;
}

ResultDocument run_pmsr_vs_isr(const ExperimentSpec& spec) {
    ResultDocument doc;
    doc.columns = {"isr_db"};
    doc.x_unit = "dB";
    const auto kinds = waveforms_or_config(spec);
    for (auto kind : kinds) {
        doc.columns.push_back(column_name("pmsr_db_", kind));
        doc.y_units.push_back("dB");
    }
    for (auto kind : kinds) {
        doc.columns.push_back(column_name("ghost_rate_", kind));
        doc.y_units.push_back("probability");
    }
    for (double isr : spec.sweep.values) {
        std::vector<Cell> row{isr};
        std::vector<Cell> ghosts;
        for (auto kind : kinds) {
            SensingSetup setup = sensing_setup(spec, kind);
            setup.isr_db = isr;
            const SensingSummary s = summarize(sensing_trials(setup));
            row.emplace_back(s.mean_pmsr_db);
            ghosts.emplace_back(s.ghost_rate);
        }
        row.insert(row.end(), ghosts.begin(), ghosts.end());
        doc.rows.push_back(std::move(row));
    }
    return doc;
}

ResultDocument run_mf_map(const ExperimentSpec& spec) {
    SensingSetup setup = sensing_setup(spec, spec.config.waveform);
    setup.chain = SensingChain::MatchedFilter;
    const SensingEcho echo = sensing_echo(setup, 0);
    const RangeVelocityMap map = matched_filter_map(echo.tx, echo.rx);
    const double peak = *std::max_element(map.magnitudes.begin(), map.magnitudes.end());

    ResultDocument doc;
    doc.columns = {"range_bin", "velocity_bin", "range_m", "velocity_mps", "magnitude_db"};
    doc.x_unit = "bin";
    doc.y_units = {"bin", "m", "m/s", "dB"};
    json rows = json::array();
    for (std::size_t r = 0; r < map.range_bins; ++r) {
        json line = json::array();
        for (std::size_t v = 0; v < map.velocity_bins; ++v) {
            const double db = to_db_relative(map.at(r, v), peak);
            doc.rows.push_back({static_cast<double>(r), static_cast<double>(v), static_cast<double>(r) * map.bin_to_meters,
                                map.velocity_of(v), db});
            line.push_back(number_json(db));
        }
        rows.push_back(std::move(line));
    }
    doc.map = json{{"range_bins", map.range_bins},
                   {"velocity_bins", map.velocity_bins},
                   {"bin_to_meters", map.bin_to_meters},
                   {"bin_to_mps", map.bin_to_mps},
                   {"magnitude_db", std::move(rows)}};
    const DetectionReport rep = detect(map, TargetBins{spec.scenario.target_delay, spec.scenario.velocity_bin % map.velocity_bins});
    doc.summary = json{{"peak_range_bin", rep.range_bin},
                       {"peak_velocity_bin", *rep.velocity_bin},
                       {"range_m", rep.range_m},
                       {"velocity_mps", *rep.velocity_mps},
                       {"pmsr_db", number_json(rep.pmsr_db)},
                       {"detected", rep.detected}};
    return doc;
}

ResultDocument run_pd_vs_clipping(const ExperimentSpec& spec) {
    ResultDocument doc;
    doc.columns = {"clipping_ratio_db"};
    doc.x_unit = "dB";
    const auto kinds = waveforms_or_config(spec);
    for (auto kind : kinds) {
        doc.columns.push_back(column_name("pmsr_db_", kind));
        doc.y_units.push_back("dB");
    }
    for (auto kind : kinds) {
        doc.columns.push_back(column_name("pd_", kind));
        doc.y_units.push_back("probability");
    }
    for (double cr : spec.sweep.values) {
        std::vector<Cell> row{cr};
        std::vector<Cell> pd;
        for (auto kind : kinds) {
            SensingSetup setup = sensing_setup(spec, kind);
            setup.clipping_ratio_db = cr;
            const SensingSummary s = summarize(sensing_trials(setup));
            row.emplace_back(s.mean_pmsr_db);
            pd.emplace_back(s.detection_rate);
        }
        row.insert(row.end(), pd.begin(), pd.end());
        doc.rows.push_back(std::move(row));
    }
    return doc;
}

ResultDocument run_resolutions(const ExperimentSpec& spec) {
    const Resolutions res = resolutions(spec.config);
    ResultDocument doc;
    doc.columns = {"range_res_m", "velocity_res_mps"};
    doc.y_units = {"m/s"};
    doc.x_unit = "m";
    doc.rows.push_back({res.range_m, res.velocity_mps});
    return doc;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"papr_ccdf",   "complexity_table", "spectral_efficiency",
                                                "ber_vs_snr",  "mix_range_profile", "pmsr_vs_isr",
                                                "mf_map",      "pd_vs_clipping",   "resolutions"};
    return names;
}

ExperimentSpec default_spec(const std::string& name) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw ConfigError("experiment: unknown name \"" + name + "\"");
    }
    ExperimentSpec spec;
    spec.name = name;
    spec.config = WaveformConfig::scenario_one();
    spec.sweep.variable = sweep_variable(name);
    Scenario& sc = spec.scenario;
    using W = WaveformKind;
    if (name == "papr_ccdf") {
        spec.trials = 10000;
        spec.sweep.values = linspace_step(0.0, 12.0, 0.25);
        sc.waveforms = {W::DftSOfdm, W::ChirpedDftSOfdm, W::DftSOfdmCm, W::Ofdm, W::Afdm, W::Otfs, W::Fmcw};
    } else if (name == "complexity_table" || name == "spectral_efficiency") {
        sc.waveforms = {W::Ofdm, W::DftSOfdm, W::ChirpedDftSOfdm, W::DftSOfdmCm, W::Afdm, W::Otfs};
    } else if (name == "ber_vs_snr") {
        spec.config = WaveformConfig::scenario_two();
        spec.trials = 10000;
        spec.sweep.values = linspace_step(0.0, 24.0, 1.0);
        sc.waveforms = {W::DftSOfdm, W::ChirpedDftSOfdm, W::DftSOfdmCm};
    } else if (name == "mix_range_profile") {
        sc.snr_db = -5.0;
        sc.isr_db = -10.0;
        sc.chain = SensingChain::Mix;
        sc.waveforms = {W::Fmcw, W::ChirpedDftSOfdm};
    } else if (name == "pmsr_vs_isr") {
        spec.trials = 200;
        spec.sweep.values = {-20.0, -15.0, -10.0, -5.0, 0.0};
        sc.snr_db = -5.0;
        sc.chain = SensingChain::Mix;
        sc.waveforms = {W::Fmcw, W::ChirpedDftSOfdm};
    } else if (name == "mf_map") {
        sc.velocity_bin = 3;
    } else if (name == "pd_vs_clipping") {
        spec.trials = 200;
        spec.config.constellation = ConstellationKind::Psk;
        spec.sweep.values = {0.0, 3.0, 6.0, kInfinity};
        sc.snr_db = -20.0;
        sc.velocity_bin = 3;
        sc.waveforms = {W::ChirpedDftSOfdm, W::Afdm, W::Otfs};
    }
    return spec;
}

void validate(const ExperimentSpec& spec) {
    default_spec(spec.name);
    spec.config.validate();
    if (spec.trials < 1) {
        throw ConfigError("trials: must be >= 1");
    }
    const std::string expected = sweep_variable(spec.name);
    if (spec.sweep.variable != expected) {
        throw ConfigError("sweep.variable: " + spec.name + " sweeps " +
                          (expected.empty() ? std::string("nothing") : "\"" + expected + "\"") + ", got \"" +
                          spec.sweep.variable + "\"");
    }
    if (!expected.empty() && spec.sweep.values.empty()) {
        throw ConfigError("sweep.values: must not be empty");
    }
    const bool allow_inf = expected == "clipping_ratio_db";
    for (std::size_t i = 0; i < spec.sweep.values.size(); ++i) {
        const double v = spec.sweep.values[i];
        if (std::isnan(v) || (std::isinf(v) && !(allow_inf && v > 0))) {
            throw ConfigError("sweep.values: must be finite" + std::string(allow_inf ? " (or inf)" : ""));
        }
        if (i > 0 && !(spec.sweep.values[i - 1] < v)) {
            throw ConfigError("sweep.values: must be distinct");
        }
    }
    if (spec.scenario.isr_db && !std::isfinite(*spec.scenario.isr_db)) {
        throw ConfigError("scenario.isr_db: must be finite");
    }
    const bool sensing = spec.name == "mix_range_profile" || spec.name == "pmsr_vs_isr" || spec.name == "mf_map" ||
                         spec.name == "pd_vs_clipping";
    if (sensing && spec.scenario.target_delay > spec.config.L_CP) {
        throw ConfigError("scenario.target_delay: exceeds L_CP");
    }
    if (spec.name == "ber_vs_snr") {
        for (auto kind : waveforms_or_config(spec)) {
            ber_config(spec, kind).validate();
        }
    }
}

ExperimentSpec parse_config(const json& doc) {
    require_object(doc, "document");
    for (const auto& [key, v] : doc.items()) {
        (void)v;
        if (!kTopKeys.count(key)) {
            throw ConfigError(key + ": unknown field");
        }
    }
    if (!doc.contains("experiment")) {
        throw ConfigError("experiment: required");
    }
    ExperimentSpec spec = default_spec(read_string(doc["experiment"], "experiment"));
    if (doc.contains("config")) apply_config(doc["config"], spec.config);
    if (doc.contains("scenario")) apply_scenario(doc["scenario"], spec.scenario);
    if (doc.contains("trials")) spec.trials = read_size(doc["trials"], "trials");
    if (doc.contains("seed")) spec.seed = read_u64(doc["seed"], "seed");
    if (doc.contains("workers")) spec.workers = static_cast<unsigned>(read_size(doc["workers"], "workers"));
    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        require_object(sw, "sweep");
        for (const auto& [key, v] : sw.items()) {
            if (key == "variable") {
                spec.sweep.variable = read_string(v, "sweep.variable");
            } else if (key == "values") {
                if (!v.is_array()) {
                    throw ConfigError("sweep.values: expected a list");
                }
                spec.sweep.values.clear();
                for (const auto& x : v) {
                    spec.sweep.values.push_back(read_double(x, "sweep.values"));
                }
            } else {
                throw ConfigError("sweep." + key + ": unknown field");
            }
        }
    }
    auto& values = spec.sweep.values;
    std::sort(values.begin(), values.end());
    validate(spec);
    return spec;
}

ExperimentSpec parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON (") + e.what() + ")");
    }
    return parse_config(doc);
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: malformed JSON in " + path + " (" + e.what() + ")");
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set: expected key=value, got \"" + assignment + "\"");
    }
    std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    std::string section;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
        section = key.substr(0, dot);
        key = key.substr(dot + 1);
    } else if (kConfigKeys.count(key)) {
        section = "config";
    } else if (kScenarioKeys.count(key)) {
        section = "scenario";
    } else if (key == "sweep") {
        section = "sweep";
        key = "values";
    } else if (key == "trials" || key == "seed" || key == "workers" || key == "experiment") {
        doc[key] = scalar_from_text(value);
        return;
    } else {
        throw ConfigError(key + ": unknown field");
    }
    if (section != "config" && section != "scenario" && section != "sweep") {
        throw ConfigError(section + ": unknown section");
    }
    json parsed;
    if (key == "waveforms" || key == "values") {
        parsed = json::array();
        for (const auto& item : split(value, ',')) {
            parsed.push_back(scalar_from_text(item));
        }
    } else {
        parsed = scalar_from_text(value);
    }
    doc[section][key] = parsed;
}

json spec_to_json(const ExperimentSpec& spec) {
    const WaveformConfig& c = spec.config;
    json config{{"N", c.N},
                {"M", c.M},
                {"Q", c.Q},
                {"P", c.P},
                {"L_CP", c.L_CP},
                {"K", c.K},
                {"bandwidth_hz", c.bandwidth_hz},
                {"carrier_hz", c.carrier_hz},
                {"constellation", to_string(c.constellation)},
                {"waveform", to_string(c.waveform)},
                {"M_otfs", c.M_otfs},
                {"N_otfs", c.N_otfs},
                {"afdm_c2", c.afdm_c2},
                {"chirp_shape", "linear"}};
    const Scenario& s = spec.scenario;
    json waveforms = json::array();
    for (auto w : s.waveforms) {
        waveforms.push_back(to_string(w));
    }
    json scenario{{"snr_db", number_json(s.snr_db)},
                  {"isr_db", s.isr_db ? json(*s.isr_db) : json(nullptr)},
                  {"target_delay", s.target_delay},
                  {"interferer_delay", s.interferer_delay},
                  {"velocity_bin", s.velocity_bin},
                  {"paths", s.paths},
                  {"chain", s.chain == SensingChain::Mix ? "mix" : "matched_filter"},
                  {"detector", s.detector == Detector::Ml ? "ml" : "lmmse"},
                  {"cm_Q", s.cm_Q},
                  {"cm_P", s.cm_P}};
    if (!waveforms.empty()) {
        scenario["waveforms"] = waveforms;
    }
    json values = json::array();
    for (double v : spec.sweep.values) {
        values.push_back(number_json(v));
    }
    json out{{"experiment", spec.name},
             {"config", config},
             {"scenario", scenario},
             {"trials", spec.trials},
             {"seed", spec.seed}};
    if (!spec.sweep.variable.empty()) {
        out["sweep"] = json{{"variable", spec.sweep.variable}, {"values", values}};
    }
    return out;
}

ResultDocument run(const ExperimentSpec& spec) {
    validate(spec);
    ResultDocument doc;
    const std::string& n = spec.name;
    if (n == "papr_ccdf") doc = run_papr_ccdf(spec);
    else if (n == "complexity_table") doc = run_complexity(spec);
    else if (n == "spectral_efficiency") doc = run_spectral_efficiency(spec);
    else if (n == "ber_vs_snr") doc = run_ber(spec);
    else if (n == "mix_range_profile") doc = run_mix_profile(spec);
    else if (n == "pmsr_vs_isr") doc = run_pmsr_vs_isr(spec);
    else if (n == "mf_map") doc = run_mf_map(spec);
    else if (n == "pd_vs_clipping") doc = run_pd_vs_clipping(spec);
    else doc = run_resolutions(spec);
    doc.spec = spec;
    return doc;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string to_csv(const ResultDocument& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.columns.size(); ++i) {
        out += (i ? "," : "") + doc.columns[i];
    }
    out += '\n';
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const auto* d = std::get_if<double>(&row[i])) {
                out += format_number(*d);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const ResultDocument& doc) {
    json out;
    out["spec"] = spec_to_json(doc.spec);
    json rows = json::array();
    for (const auto& row : doc.rows) {
        json line = json::array();
        for (const auto& cell : row) {
            if (const auto* d = std::get_if<double>(&cell)) {
                line.push_back(number_json(*d));
            } else {
                line.push_back(std::get<std::string>(cell));
            }
        }
        rows.push_back(std::move(line));
    }
    out["table"] = json{{"columns", doc.columns}, {"rows", rows}};

    // numeric tables become one (x, y) series per column after the first
    const bool numeric_x = !doc.rows.empty() && std::holds_alternative<double>(doc.rows.front().front());
    if (numeric_x && !doc.map) {
        json series = json::array();
        for (std::size_t c = 1; c < doc.columns.size(); ++c) {
            json points = json::array();
            for (const auto& row : doc.rows) {
                points.push_back(json::array({number_json(std::get<double>(row[0])), number_json(std::get<double>(row[c]))}));
            }
            series.push_back(json{{"label", doc.columns[c]},
                                  {"x_unit", doc.x_unit},
                                  {"y_unit", c - 1 < doc.y_units.size() ? doc.y_units[c - 1] : ""},
                                  {"points", std::move(points)}});
        }
        out["series"] = std::move(series);
    }
    if (doc.map) {
        out["map"] = *doc.map;
    }
    if (doc.summary) {
        out["summary"] = *doc.summary;
    }
    json meta{{"library", "chirpwave"}, {"version", kVersion}};
    if (doc.wall_time_s) {
        meta["wall_time_s"] = *doc.wall_time_s;
    }
    out["meta"] = meta;
    return out.dump(2) + "\n";
}

}  // namespace chirpwave
