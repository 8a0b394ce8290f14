#pragma once

#include <string>
#include <vector>

#include "lslab/critical.hpp"

namespace lslab {

// SVG with the boundary curves, one <g class="level"> group of traced
// polylines per threshold, circle markers at critical points (radius grows
// with multiplicity) and a legend. Trace warnings become XML comments.
std::string render_svg(const SolutionField& field, const std::vector<double>& thresholds,
                       const std::vector<CriticalPoint>& points, int refine = 2);

}  // namespace lslab
