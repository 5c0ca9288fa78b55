// io.hpp - JSON and CSV renderings of library results

#pragma once

#include "json.hpp"
#include <ostream>
#include <string>
#include <vector>

#include "polaron/amplitude.hpp"
#include "polaron/moment_matching.hpp"
#include "polaron/prf.hpp"

namespace polaron {

// Shortest text that round-trips: printf %.17g.
std::string format_number(double value);

nlohmann::json to_json(const TruncatedBath& bath);
nlohmann::json to_json(const RateComponents& c);
nlohmann::json to_json(const RateResult& r);

// "l,A_l" rows with a header.
void write_amplitude_csv(std::ostream& out, const AmplitudeTable& table);

// Minimal CSV writer: fields are quoted only when they need it.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
};

}  // namespace polaron
