// cli.cpp - polaron-rates subcommands

#include "polaron/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "polaron/errors.hpp"
#include "polaron/io.hpp"
#include "polaron/moment_matching.hpp"
#include "polaron/oracle.hpp"

namespace polaron::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw ConfigError(what); }

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : object.items())
        if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
}

double number(const json& j, const std::string& what) {
    if (!j.is_number()) config_error(what + " must be a number");
    return j.get<double>();
}

Engine parse_engine(const std::string& name) {
    if (name == "zero_t" || name == "truncation_zero_t") return Engine::TruncationZeroT;
    if (name == "infinite_t" || name == "truncation_infinite_t") return Engine::TruncationInfiniteT;
    if (name == "oracle") return Engine::Oracle;
    if (name == "weak") return Engine::Weak;
    if (name == "flat") return Engine::Flat;
    config_error("unknown engine '" + name + "' (zero_t, infinite_t, oracle, weak, flat)");
}

// "S:w,S:w,..."
std::vector<DiscreteMode> parse_mode_list(const std::string& text) {
    std::vector<DiscreteMode> modes;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) config_error("discrete mode '" + item + "' is not of the form S:omega");
        try {
            modes.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::logic_error&) {
            config_error("discrete mode '" + item + "' is not numeric");
        }
    }
    return modes;
}

// Two numeric columns, '#' comments and one optional header line.
void read_table(const std::string& path, std::vector<double>& x, std::vector<double>& y) {
    std::ifstream in(path);
    if (!in) config_error("cannot open tabulated density '" + path + "'");
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double a, b;
        if (!(fields >> a >> b)) {
            if (first) {
                first = false;
                continue;
            }
            config_error("malformed row in '" + path + "': " + line);
        }
        first = false;
        x.push_back(a);
        y.push_back(b);
    }
}

VibrationalSettings parse_vibrational(const json& j) {
    if (!j.is_object()) config_error("'vibrational' must be an object");
    reject_unknown_keys(j, {"family", "S", "lambda", "omega_c", "modes", "tabulated"}, "vibrational");
    VibrationalSettings v;
    if (j.contains("family")) v.family = j["family"].get<std::string>();
    if (j.contains("S")) v.huang_rhys = number(j["S"], "vibrational.S");
    if (j.contains("lambda")) v.reorganisation = number(j["lambda"], "vibrational.lambda");
    if (j.contains("omega_c")) v.cutoff = number(j["omega_c"], "vibrational.omega_c");
    if (j.contains("modes")) {
        const auto& m = j["modes"];
        if (m.is_string()) {
            v.modes = parse_mode_list(m.get<std::string>());
        } else if (m.is_array()) {
            for (const auto& mode : m) v.modes.push_back({number(mode.at("S"), "mode S"), number(mode.at("omega"), "mode omega")});
        } else {
            config_error("vibrational.modes must be a string or an array");
        }
    }
    if (j.contains("tabulated")) {
        const auto& t = j["tabulated"];
        if (t.is_string()) {
            read_table(t.get<std::string>(), v.frequency, v.value);
        } else if (t.is_object()) {
            v.frequency = t.at("frequency").get<std::vector<double>>();
            v.value = t.at("value").get<std::vector<double>>();
        } else {
            config_error("vibrational.tabulated must be a file name or an object");
        }
    }
    static const std::set<std::string> families{"cubic_exponential", "gaussian", "log_normal", "discrete", "tabulated"};
    if (!families.count(v.family)) config_error("unknown vibrational family '" + v.family + "'");
    return v;
}

std::string expansion_label(Engine e) { return e == Engine::TruncationInfiniteT ? "infinite_t" : "zero_t"; }

bool is_truncation(Engine e) { return e == Engine::TruncationZeroT || e == Engine::TruncationInfiniteT; }

RateResult compute_engine(const Settings& s, Engine engine, int nstar, const SpectralDensity& sd,
                          const OpticalBath& ob) {
    const double lambda = reorganisation_energy(sd);
    const double delta_prime = s.energy.kind == SystemEnergy::Kind::Bare ? s.energy.value - lambda : s.energy.value;
    switch (engine) {
        case Engine::TruncationZeroT:
        case Engine::TruncationInfiniteT: {
            RateOptions opts;
            opts.n_modes = nstar;
            opts.expansion =
                engine == Engine::TruncationZeroT ? Expansion::ZeroTemperature : Expansion::InfiniteTemperature;
            opts.sideband.amplitude.tolerance = s.tolerance;
            return rates(s.energy, sd, ob, s.vibrational_temperature, opts);
        }
        case Engine::Oracle:
            return oracle_rates(delta_prime, sd, ob, s.vibrational_temperature).rates;
        case Engine::Weak:
            return weak_limit_rates(delta_prime + lambda, ob);
        case Engine::Flat:
            return flat_limit_rates(delta_prime, ob);
    }
    throw InvalidArgument("unknown engine");
}

EngineOutcome evaluate_engine(const Settings& s, Engine engine, int nstar, const SpectralDensity& sd,
                              const OpticalBath& ob) {
    EngineOutcome outcome{engine, is_truncation(engine) ? nstar : 0, std::nullopt, {}};
    try {
        outcome.result = compute_engine(s, engine, nstar, sd, ob);
    } catch (const Error& e) {
        outcome.error = e.what();
    }
    return outcome;
}

// ---- flags ----------------------------------------------------------------

enum class Kind { Number, Text, NumberList, TextList };

struct FlagSpec {
    const char* flag;
    const char* pointer;  // JSON pointer into the configuration
    Kind kind;
    const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--family", "/vibrational/family", Kind::Text, "cubic_exponential | gaussian | log_normal | discrete | tabulated"},
    {"--S", "/vibrational/S", Kind::Number, "bath Huang-Rhys parameter (cubic_exponential)"},
    {"--lambda", "/vibrational/lambda", Kind::Number, "reorganisation energy [eV]"},
    {"--omega-c", "/vibrational/omega_c", Kind::Number, "cut-off frequency [eV]"},
    {"--modes", "/vibrational/modes", Kind::Text, "discrete modes as S:omega,S:omega,..."},
    {"--tabulated", "/vibrational/tabulated", Kind::Text, "two-column file omega J_V(omega)"},
    {"--optical", "/optical/family", Kind::Text, "cubic | flat"},
    {"--optical-scale", "/optical/scale", Kind::Number, "J_O prefactor (cubic) or value (flat)"},
    {"--T-V", "/T_V", Kind::Number, "vibrational temperature [K]"},
    {"--T-O", "/T_O", Kind::Number, "optical temperature [K]"},
    {"--delta", "/delta", Kind::Number, "bare splitting [eV]"},
    {"--delta-prime", "/delta_prime", Kind::Number, "polaron splitting [eV]"},
    {"--nstar", "/nstar", Kind::NumberList, "truncation sizes"},
    {"--engine", "/engines", Kind::TextList, "zero_t | infinite_t | oracle | weak | flat"},
    {"--tolerance", "/tolerance", Kind::Number, "amplitude table tolerance"},
    {"--param", "/sweep/parameter", Kind::Text, "swept parameter: S | omega_c | T_V | lambda | T_O | delta_prime"},
    {"--start", "/sweep/start", Kind::Number, "first grid value"},
    {"--stop", "/sweep/stop", Kind::Number, "last grid value"},
    {"--count", "/sweep/count", Kind::Number, "grid size (>= 2)"},
    {"--scale", "/sweep/scale", Kind::Text, "linear | log"},
    {"--rho0", "/dynamics/rho0", Kind::Number, "initial excited population"},
    {"--t-end", "/dynamics/t_end", Kind::Number, "last time [1/eV]"},
    {"--samples", "/dynamics/samples", Kind::Number, "number of time samples"},
    {"--jobs", "/jobs", Kind::Number, "concurrent sweep points"},
};

struct FlagValues {
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<std::string>> lists;
    std::map<const CLI::App*, std::map<std::string, CLI::Option*>> options;
};

void add_flags(CLI::App* sub, FlagValues& values, std::string& config_file, std::string& output_file) {
    sub->add_option("--config", config_file, "JSON configuration file; flags override it");
    sub->add_option("--output", output_file, "write to this file instead of stdout");
    for (const auto& spec : kFlags) {
        CLI::Option* opt;
        if (spec.kind == Kind::NumberList || spec.kind == Kind::TextList)
            opt = sub->add_option(spec.flag, values.lists[spec.pointer], spec.help)->delimiter(',');
        else
            opt = sub->add_option(spec.flag, values.scalars[spec.pointer], spec.help);
        values.options[sub][spec.pointer] = opt;
    }
}

double parse_number(const std::string& text, const std::string& flag) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::logic_error&) {
        config_error("flag " + flag + " expects a number, got '" + text + "'");
    }
}

void overlay_flags(json& config, const FlagValues& values, const CLI::App* sub) {
    for (const auto& spec : kFlags) {
        const auto* opt = values.options.at(sub).at(spec.pointer);
        if (opt->count() == 0) continue;
        const json::json_pointer ptr(spec.pointer);
        switch (spec.kind) {
            case Kind::Number:
                config[ptr] = parse_number(values.scalars.at(spec.pointer), spec.flag);
                break;
            case Kind::Text:
                config[ptr] = values.scalars.at(spec.pointer);
                break;
            case Kind::NumberList: {
                json list = json::array();
                for (const auto& v : values.lists.at(spec.pointer)) list.push_back(parse_number(v, spec.flag));
                config[ptr] = list;
                break;
            }
            case Kind::TextList:
                config[ptr] = values.lists.at(spec.pointer);
                break;
        }
        // A flag for one of a mutually exclusive pair displaces the other.
        const std::string p = spec.pointer;
        if (p == "/delta") config.erase("delta_prime");
        if (p == "/delta_prime") config.erase("delta");
        if (p == "/vibrational/S") config["vibrational"].erase("lambda");
        if (p == "/vibrational/lambda") config["vibrational"].erase("S");
    }
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) config_error("cannot open configuration file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        config_error("configuration file '" + path + "' is not valid JSON: " + e.what());
    }
}

// ---- subcommands --------------------------------------------------------

std::optional<double> relative_error(double value, double reference) {
    if (!(reference != 0.0)) return std::nullopt;
    return std::abs(value - reference) / std::abs(reference);
}

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

int cmd_modes(const Settings& s, bool with_amplitudes, std::ostream& out) {
    const auto sd = make_density(s.vibrational);
    json report = {{"family", sd.name()},
                   {"lambda", reorganisation_energy(sd)},
                   {"A_V", spectral_area(sd)},
                   {"truncations", json::array()}};
    std::vector<Engine> expansions;
    for (auto e : s.engines)
        if (is_truncation(e) && std::find(expansions.begin(), expansions.end(), e) == expansions.end())
            expansions.push_back(e);
    if (expansions.empty()) expansions.push_back(Engine::TruncationZeroT);
    for (auto e : expansions) {
        for (int n : s.nstar) {
            const auto bath = truncate(sd, n,
                                       e == Engine::TruncationZeroT ? Expansion::ZeroTemperature
                                                                    : Expansion::InfiniteTemperature);
            json entry = to_json(bath);
            entry["nstar"] = n;
            entry["expansion"] = expansion_label(e);
            if (with_amplitudes) {
                AmplitudeOptions opts;
                opts.tolerance = s.tolerance;
                json tables = json::array();
                for (const auto& m : bath.modes) {
                    const auto table = amplitude_table(m.huang_rhys, m.frequency, s.vibrational_temperature, opts);
                    json rows = json::array();
                    for (const auto& a : table.entries()) rows.push_back({a.l, a.value});
                    tables.push_back(rows);
                }
                entry["amplitudes"] = tables;
            }
            report["truncations"].push_back(entry);
        }
    }
    out << report.dump(2) << '\n';
    return kOk;
}

json outcome_json(const EngineOutcome& o) {
    json j = {{"engine", engine_name(o.engine)}};
    if (o.nstar) j["nstar"] = o.nstar;
    if (o.result)
        j["result"] = to_json(*o.result);
    else
        j["error"] = o.error;
    return j;
}

int cmd_rates(const Settings& s, std::ostream& out, std::ostream& err) {
    const auto outcomes = evaluate_point(s);
    json report = {{"results", json::array()}};
    bool failed = false;
    for (const auto& o : outcomes) {
        report["results"].push_back(outcome_json(o));
        if (!o.result) {
            failed = true;
            err << "polaron-rates: " << engine_name(o.engine) << ": " << o.error << '\n';
        }
    }
    out << report.dump(2) << '\n';
    return failed ? kNumericalFailure : kOk;
}

int cmd_compare(Settings s, std::ostream& out, std::ostream& err) {
    if (std::find(s.engines.begin(), s.engines.end(), Engine::Oracle) == s.engines.end())
        s.engines.push_back(Engine::Oracle);
    const auto outcomes = evaluate_point(s);
    const auto oracle = std::find_if(outcomes.begin(), outcomes.end(),
                                     [](const EngineOutcome& o) { return o.engine == Engine::Oracle; });
    if (!oracle->result) {
        err << "polaron-rates: oracle: " << oracle->error << '\n';
        return kNumericalFailure;
    }
    json report = {{"oracle", to_json(*oracle->result)}, {"comparisons", json::array()}};
    bool failed = false;
    for (const auto& o : outcomes) {
        if (o.engine == Engine::Oracle) continue;
        json j = outcome_json(o);
        if (o.result) {
            auto up = relative_error(o.result->up.total, oracle->result->up.total);
            auto down = relative_error(o.result->down.total, oracle->result->down.total);
            j["rel_error_up"] = up ? json(*up) : json(nullptr);
            j["rel_error_down"] = down ? json(*down) : json(nullptr);
        } else {
            failed = true;
            err << "polaron-rates: " << engine_name(o.engine) << ": " << o.error << '\n';
        }
        report["comparisons"].push_back(j);
    }
    out << report.dump(2) << '\n';
    return failed ? kNumericalFailure : kOk;
}

const std::vector<std::string> kSweepHeader = {
    "param",          "gamma_up",        "gamma_down",         "gamma_up_emission",     "gamma_up_absorption",
    "gamma_down_emission", "gamma_down_absorption", "Nstar", "mass_deficit", "engine",
    "gamma_up_normalised", "gamma_down_normalised", "rel_error_up", "rel_error_down", "rho_ss", "error"};

int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
    if (s.sweep.parameter.empty()) config_error("sweep needs a parameter (--param or sweep.parameter)");
    const auto grid = sweep_grid(s.sweep);
    std::vector<std::vector<EngineOutcome>> results(grid.size());
    std::vector<std::string> point_errors(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            try {
                Settings point = s;
                apply_parameter(point, s.sweep.parameter, grid[i]);
                results[i] = evaluate_point(point);
            } catch (const std::exception& e) {
                point_errors[i] = e.what();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(s.jobs, static_cast<int>(grid.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    CsvWriter csv(out);
    csv.row(kSweepHeader);
    int failures = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::string param = format_number(grid[i]);
        if (!point_errors[i].empty()) {
            ++failures;
            std::vector<std::string> row(kSweepHeader.size());
            row.front() = param;
            row.back() = point_errors[i];
            csv.row(row);
            continue;
        }
        const EngineOutcome* oracle = nullptr;
        for (const auto& o : results[i])
            if (o.engine == Engine::Oracle && o.result) oracle = &o;
        // Normalisation reference: weak-coupling rates at delta'.
        Settings point = s;
        apply_parameter(point, s.sweep.parameter, grid[i]);
        std::optional<RateResult> reference;
        try {
            const auto sd = make_density(point.vibrational);
            const double dp = point.energy.kind == SystemEnergy::Kind::Bare
                                  ? point.energy.value - reorganisation_energy(sd)
                                  : point.energy.value;
            reference = weak_limit_rates(dp, make_optical_bath(point));
        } catch (const Error&) {
        }
        for (const auto& o : results[i]) {
            std::vector<std::string> row(kSweepHeader.size());
            row[0] = param;
            row[7] = o.nstar ? std::to_string(o.nstar) : "";
            row[9] = engine_name(o.engine);
            if (!o.result) {
                ++failures;
                row[15] = o.error;
                csv.row(row);
                continue;
            }
            const auto& r = *o.result;
            row[1] = format_number(r.up.total);
            row[2] = format_number(r.down.total);
            row[3] = format_number(r.up.emission);
            row[4] = format_number(r.up.absorption);
            row[5] = format_number(r.down.emission);
            row[6] = format_number(r.down.absorption);
            row[8] = format_number(r.mass_deficit);
            if (reference) {
                row[10] = optional_number(reference->up.total > 0.0
                                              ? std::optional<double>(r.up.total / reference->up.total)
                                              : std::nullopt);
                row[11] = optional_number(reference->down.total > 0.0
                                              ? std::optional<double>(r.down.total / reference->down.total)
                                              : std::nullopt);
            }
            if (oracle && o.engine != Engine::Oracle) {
                row[12] = optional_number(relative_error(r.up.total, oracle->result->up.total));
                row[13] = optional_number(relative_error(r.down.total, oracle->result->down.total));
            }
            const double sum = r.up.total + r.down.total;
            if (sum > 0.0) row[14] = format_number(r.up.total / sum);
            csv.row(row);
        }
    }
    if (failures) {
        err << "polaron-rates: " << failures << " sweep entries failed (see the error column)\n";
        return kPartialSweepFailure;
    }
    return kOk;
}

int cmd_dynamics(const Settings& s, std::ostream& out) {
    const auto r = compute_engine(s, s.engines.front(), s.nstar.front(), make_density(s.vibrational),
                                  make_optical_bath(s));
    const double rho_ss = steady_state(r);  // DegenerateRates when both rates vanish
    const double total = r.up.total + r.down.total;
    const double t_end = s.dynamics.end_time.value_or(5.0 / total);
    const int n = std::max(2, s.dynamics.samples);
    std::vector<double> times(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) times[static_cast<std::size_t>(k)] = t_end * k / (n - 1);
    const auto rho = population_dynamics(r, s.dynamics.initial_excited, times);

    CsvWriter csv(out);
    csv.row({"t", "rho_ee", "rho_ss", "inversion"});
    const std::string ss = format_number(rho_ss), inversion = rho_ss > 0.5 ? "true" : "false";
    for (std::size_t k = 0; k < times.size(); ++k) csv.row({format_number(times[k]), format_number(rho[k]), ss, inversion});
    return kOk;
}

}  // namespace

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::TruncationZeroT: return "truncation_zero_t";
        case Engine::TruncationInfiniteT: return "truncation_infinite_t";
        case Engine::Oracle: return "oracle";
        case Engine::Weak: return "weak";
        case Engine::Flat: return "flat";
    }
    return "unknown";
}

Settings parse_settings(const json& config) {
    if (!config.is_object()) config_error("configuration must be a JSON object");
    reject_unknown_keys(config,
                        {"vibrational", "optical", "T_V", "T_O", "delta", "delta_prime", "nstar", "engines",
                         "tolerance", "sweep", "dynamics", "jobs", "description"},
                        "configuration");
    Settings s;
    try {
        if (config.contains("vibrational")) s.vibrational = parse_vibrational(config["vibrational"]);
        if (config.contains("optical")) {
            const auto& o = config["optical"];
            reject_unknown_keys(o, {"family", "scale"}, "optical");
            if (o.contains("family")) s.optical_family = o["family"].get<std::string>();
            if (o.contains("scale")) s.optical_scale = number(o["scale"], "optical.scale");
            if (s.optical_family != "cubic" && s.optical_family != "flat")
                config_error("optical family must be 'cubic' or 'flat'");
        }
        if (config.contains("T_V")) s.vibrational_temperature = number(config["T_V"], "T_V");
        if (config.contains("T_O")) s.optical_temperature = number(config["T_O"], "T_O");
        if (config.contains("delta") && config.contains("delta_prime"))
            config_error("give either delta or delta_prime, not both");
        if (config.contains("delta")) s.energy = SystemEnergy::bare(number(config["delta"], "delta"));
        if (config.contains("delta_prime"))
            s.energy = SystemEnergy::polaron(number(config["delta_prime"], "delta_prime"));
        if (config.contains("nstar")) {
            const auto& n = config["nstar"];
            s.nstar.clear();
            if (n.is_number())
                s.nstar.push_back(static_cast<int>(number(n, "nstar")));
            else
                for (const auto& v : n) s.nstar.push_back(static_cast<int>(number(v, "nstar")));
        }
        if (s.nstar.empty()) config_error("nstar list is empty");
        for (int n : s.nstar)
            if (n < 1 || n > kMaxModes) config_error("N* must lie in 1.." + std::to_string(kMaxModes));
        if (config.contains("engines")) {
            s.engines.clear();
            const auto& e = config["engines"];
            if (e.is_string())
                s.engines.push_back(parse_engine(e.get<std::string>()));
            else
                for (const auto& v : e) s.engines.push_back(parse_engine(v.get<std::string>()));
        }
        if (s.engines.empty()) config_error("engine list is empty");
        if (config.contains("tolerance")) s.tolerance = number(config["tolerance"], "tolerance");
        if (config.contains("sweep")) {
            const auto& w = config["sweep"];
            reject_unknown_keys(w, {"parameter", "start", "stop", "count", "scale"}, "sweep");
            if (w.contains("parameter")) s.sweep.parameter = w["parameter"].get<std::string>();
            if (w.contains("start")) s.sweep.start = number(w["start"], "sweep.start");
            if (w.contains("stop")) s.sweep.stop = number(w["stop"], "sweep.stop");
            if (w.contains("count")) s.sweep.count = static_cast<int>(number(w["count"], "sweep.count"));
            if (w.contains("scale")) {
                const auto scale = w["scale"].get<std::string>();
                if (scale != "linear" && scale != "log") config_error("sweep.scale must be 'linear' or 'log'");
                s.sweep.log_scale = scale == "log";
            }
        }
        if (config.contains("dynamics")) {
            const auto& d = config["dynamics"];
            reject_unknown_keys(d, {"rho0", "t_end", "samples"}, "dynamics");
            if (d.contains("rho0")) s.dynamics.initial_excited = number(d["rho0"], "dynamics.rho0");
            if (d.contains("t_end")) s.dynamics.end_time = number(d["t_end"], "dynamics.t_end");
            if (d.contains("samples")) s.dynamics.samples = static_cast<int>(number(d["samples"], "dynamics.samples"));
        }
        if (config.contains("jobs")) s.jobs = std::max(1, static_cast<int>(number(config["jobs"], "jobs")));
    } catch (const json::exception& e) {
        config_error(std::string("malformed configuration: ") + e.what());
    }
    return s;
}

SpectralDensity make_density(const VibrationalSettings& v) {
    try {
        if (v.family == "cubic_exponential") {
            double S = 0.0;
            if (v.huang_rhys)
                S = *v.huang_rhys;
            else if (v.reorganisation)
                S = *v.reorganisation / (2.0 * v.cutoff);
            else
                config_error("cubic_exponential needs S or lambda");
            return SpectralDensity::cubic_exponential(S, v.cutoff);
        }
        if (v.family == "gaussian" || v.family == "log_normal") {
            if (!v.reorganisation) config_error(v.family + " needs lambda");
            return v.family == "gaussian" ? SpectralDensity::gaussian_ohmic(*v.reorganisation, v.cutoff)
                                          : SpectralDensity::log_normal_ohmic(*v.reorganisation, v.cutoff);
        }
        if (v.family == "discrete") return SpectralDensity::discrete(v.modes);
        if (v.family == "tabulated") return SpectralDensity::tabulated(v.frequency, v.value);
    } catch (const InvalidArgument& e) {
        config_error(e.what());
    }
    config_error("unknown vibrational family '" + v.family + "'");
}

OpticalBath make_optical_bath(const Settings& s) {
    try {
        return s.optical_family == "flat" ? OpticalBath::flat(s.optical_scale, s.optical_temperature)
                                          : OpticalBath::cubic(s.optical_scale, s.optical_temperature);
    } catch (const InvalidArgument& e) {
        config_error(e.what());
    }
}

void apply_parameter(Settings& s, const std::string& name, double value) {
    if (name == "S") {
        if (s.vibrational.family != "cubic_exponential") config_error("parameter S needs the cubic_exponential family");
        s.vibrational.huang_rhys = value;
        s.vibrational.reorganisation.reset();
    } else if (name == "lambda") {
        s.vibrational.reorganisation = value;
        s.vibrational.huang_rhys.reset();
    } else if (name == "omega_c") {
        s.vibrational.cutoff = value;
    } else if (name == "T_V") {
        s.vibrational_temperature = value;
    } else if (name == "T_O") {
        s.optical_temperature = value;
    } else if (name == "delta_prime") {
        s.energy = SystemEnergy::polaron(value);
    } else {
        config_error("unknown sweep parameter '" + name + "' (S, omega_c, T_V, lambda, T_O, delta_prime)");
    }
}

std::vector<double> sweep_grid(const SweepSettings& sweep) {
    if (sweep.count < 2) config_error("sweep grid needs count >= 2");
    if (sweep.log_scale && !(sweep.start > 0.0 && sweep.stop > 0.0))
        config_error("log-scaled sweep needs positive start and stop");
    std::vector<double> grid;
    for (int k = 0; k < sweep.count; ++k) {
        const double f = static_cast<double>(k) / (sweep.count - 1);
        grid.push_back(sweep.log_scale ? std::exp(std::log(sweep.start) + f * (std::log(sweep.stop) - std::log(sweep.start)))
                                       : sweep.start + f * (sweep.stop - sweep.start));
    }
    grid.front() = sweep.start;
    grid.back() = sweep.stop;
    return grid;
}

std::vector<EngineOutcome> evaluate_point(const Settings& s) {
    const auto sd = make_density(s.vibrational);
    const auto ob = make_optical_bath(s);
    std::vector<EngineOutcome> outcomes;
    for (auto engine : s.engines) {
        if (is_truncation(engine))
            for (int n : s.nstar) outcomes.push_back(evaluate_engine(s, engine, n, sd, ob));
        else
            outcomes.push_back(evaluate_engine(s, engine, 0, sd, ob));
    }
    return outcomes;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Polaron-frame optical rates of a two-level emitter", "polaron-rates"};
    app.require_subcommand(1);

    std::string config_file, output_file;
    FlagValues values;
    bool with_amplitudes = false;
    const std::pair<const char*, const char*> commands[] = {
        {"modes", "truncated baths for the requested N*"},
        {"rates", "rates at one parameter point for every engine"},
        {"sweep", "CSV over a parameter grid"},
        {"dynamics", "population trajectory and steady state"},
        {"compare", "truncation engines against the direct-integration oracle"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_flags(sub, values, config_file, output_file);
        if (std::string(name) == "modes") sub->add_flag("--amplitudes", with_amplitudes, "include A_l tables");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream cli_out, cli_err;
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? kOk : kConfigError;
    }

    try {
        const CLI::App* parsed = app.get_subcommands().front();
        json config = load_config(config_file);
        overlay_flags(config, values, parsed);
        const Settings settings = parse_settings(config);

        std::ofstream file;
        if (!output_file.empty()) {
            file.open(output_file);
            if (!file) config_error("cannot write '" + output_file + "'");
        }
        std::ostream& sink = output_file.empty() ? out : file;

        const std::string command = parsed->get_name();
        if (command == "modes") return cmd_modes(settings, with_amplitudes, sink);
        if (command == "rates") return cmd_rates(settings, sink, err);
        if (command == "sweep") return cmd_sweep(settings, sink, err);
        if (command == "dynamics") return cmd_dynamics(settings, sink);
        return cmd_compare(settings, sink, err);
    } catch (const ConfigError& e) {
        err << "polaron-rates: configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidArgument& e) {
        err << "polaron-rates: invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "polaron-rates: numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace polaron::cli
