#pragma once

#include "nfmimo/config.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nfmimo
{
    // Parses a JSON scenario, applies `overrides` ("key=value", value parsed as JSON when possible),
    // fills defaults and validates. Empty text yields the default profile. delta_T and delta_R default
    // to lambda/2 and r_max to D_0 when absent. Unknown keys and invalid values throw config_error.
    scenario_config validate_config(std::string_view json_text, const std::vector<std::string> &overrides = {});
    scenario_config load_config(const std::filesystem::path &path, const std::vector<std::string> &overrides = {});

    // Pretty-printed JSON holding every field of `cfg`.
    std::string config_to_json(const scenario_config &cfg);

    // Shortest round-trip decimal form; infinities print as "inf" / "-inf".
    std::string format_double(double x);

    std::string sha256_hex(std::string_view data);
    std::string sha256_file(const std::filesystem::path &path);
}
