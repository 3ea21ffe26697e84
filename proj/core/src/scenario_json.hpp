#pragma once

#include <string>
#include <vector>

#include "casc/scenario.hpp"
#include "json_fields.hpp"

namespace casc::detail {

/// Reads a scenario object; problems are appended, never thrown. `path` is
/// the dotted prefix used in diagnostics.
Scenario scenario_from_json(const json& node, const std::string& path,
                            std::vector<std::string>& problems);

}  // namespace casc::detail
