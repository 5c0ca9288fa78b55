// io.cpp - JSON and CSV renderings

#include "polaron/io.hpp"

#include <cstdio>

namespace polaron {

std::string format_number(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

nlohmann::json to_json(const TruncatedBath& bath) {
    nlohmann::json modes = nlohmann::json::array();
    for (const auto& m : bath.modes) modes.push_back({{"S", m.huang_rhys}, {"omega", m.frequency}});
    return {{"modes", modes}, {"residual", bath.residual}};
}

nlohmann::json to_json(const RateComponents& c) {
    return {{"total", c.total}, {"emission", c.emission}, {"absorption", c.absorption}};
}

nlohmann::json to_json(const RateResult& r) {
    nlohmann::json out = {{"polaron_energy", r.polaron_energy},
                          {"gamma_up", to_json(r.up)},
                          {"gamma_down", to_json(r.down)},
                          {"bath", to_json(r.bath)},
                          {"mass_deficit", r.mass_deficit},
                          {"series_terms", r.series_terms},
                          {"warnings", r.warnings}};
    const double sum = r.up.total + r.down.total;
    out["rho_ss"] = sum > 0.0 ? nlohmann::json(r.up.total / sum) : nlohmann::json(nullptr);
    return out;
}

void write_amplitude_csv(std::ostream& out, const AmplitudeTable& table) {
    CsvWriter csv(out);
    csv.row({"l", "A_l"});
    for (const auto& e : table.entries()) csv.row({std::to_string(e.l), format_number(e.value)});
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            out_ << f;
            continue;
        }
        out_ << '"';
        for (char ch : f) {
            if (ch == '"') out_ << '"';
            out_ << ch;
        }
        out_ << '"';
    }
    out_ << '\n';
}

}  // namespace polaron
