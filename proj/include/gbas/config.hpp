#pragma once

#include <filesystem>
#include <string_view>

#include "gbas/simulator.hpp"

namespace gbas {

/// Reads an airport JSON file. The almanac path is resolved against the config
/// file's directory. Missing optional keys keep the library defaults; every
/// problem surfaces as ConfigError (almanac text problems as ParseError).
AirportConfig load_airport(const std::filesystem::path& path);

/// Same as load_airport but from text; relative almanac paths resolve against `base_dir`.
AirportConfig parse_airport(std::string_view json_text, const std::filesystem::path& base_dir);

}  // namespace gbas
