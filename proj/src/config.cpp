#include "pmqkd/config.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>

#include "pmqkd/errors.hpp"

namespace pmqkd {

namespace {

std::string trim(const std::string& s) {
    const std::size_t first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return "";
    }
    const std::size_t last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double parsed = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ConfigError("bad numeric value for " + key + ": " + value);
    }
    return parsed;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    RunConfig config;
    std::set<std::string> seen;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_number) +
                              ": expected key = value, got: " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line_number) +
                              ": expected key = value, got: " + line);
        }
        if (!seen.insert(key).second) {
            throw ConfigError("duplicate config key: " + key);
        }

        if (key == "dark_count_rate") {
            config.params.dark_count_rate = parse_number(key, value);
        } else if (key == "misalignment") {
            config.params.misalignment = parse_number(key, value);
        } else if (key == "detector_efficiency") {
            config.params.detector_efficiency = parse_number(key, value);
        } else if (key == "error_correction_inefficiency") {
            config.params.error_correction_inefficiency = parse_number(key, value);
        } else if (key == "attenuation_db_per_km") {
            config.params.attenuation_db_per_km = parse_number(key, value);
        } else if (key == "intensity") {
            config.params.intensity = parse_number(key, value);
        } else if (key == "channel_convention") {
            config.convention = convention_from_token(value);
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    validate(config.params);
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    return parse_config(in);
}

}  // namespace pmqkd
