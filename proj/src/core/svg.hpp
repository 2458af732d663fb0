#pragma once
/* Deterministic SVG views derived from the JSON reports (never parsed
 * back): value-plane picture for flow reports, heat maps for strip
 * reports.  1000x1000 viewBox. */

#include <string>

#include "core/json_io.hpp"

namespace fsforge {

std::string svg_flows(const Json& flows_report);
std::string svg_floer(const Json& floer_report);
/* kind: "flows" | "floer". */
std::string render_svg(const Json& report, const std::string& kind);

}  // namespace fsforge
