#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace ellab::cli {

// Renders log10 d(h, z) against h, one polyline per candidate z, from a
// trajectory report. Raises InputError when the report does not match the
// schema or has no distances. Output depends only on the input.
std::string render_trajectory_svg(const nlohmann::json& report);

}  // namespace ellab::cli
