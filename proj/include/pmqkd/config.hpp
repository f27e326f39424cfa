#pragma once

#include <iosfwd>
#include <string>

#include "pmqkd/channel.hpp"

namespace pmqkd {

struct RunConfig {
    SystemParams params;
    Convention convention = Convention::PaperLiteral;
};

// Key = value format, '#' comments, blank lines allowed. Recognized keys:
// dark_count_rate, misalignment, detector_efficiency,
// error_correction_inefficiency, attenuation_db_per_km, intensity,
// channel_convention. Missing keys keep their defaults; unknown or duplicate
// keys raise ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

}  // namespace pmqkd
