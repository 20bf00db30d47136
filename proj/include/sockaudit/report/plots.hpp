#pragma once

#include <span>
#include <string>

#include "sockaudit/report/tables.hpp"

namespace sockaudit::report {

// Static SVG line charts drawn from the same rows the TSV tables are written
// from. y runs over [-1, 1]; a dashed line marks the phase boundary when it
// is positive.
std::string series_svg(std::span<const SeriesRow> rows, const std::string& title,
                       long phase_boundary);

// Promoting, neutral and debunking shares of one scope over [0, 1].
std::string proportions_svg(std::span<const ProportionRow> rows, const std::string& scope,
                            const std::string& title, long phase_boundary);

}  // namespace sockaudit::report
