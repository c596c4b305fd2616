#pragma once

#include <string>
#include <vector>

#include "cibp/feature_matrix.hpp"
#include "cibp/sim_harness.hpp"

namespace cibp {

/// Line chart of mean feature count against dimension, one polyline per
/// prior, plus a dashed horizontal reference line (the true factor count).
/// Self-contained SVG with no external assets or timestamps.
std::string growth_plot_svg(const std::vector<AggregateRow>& rows, double reference);

/// Black/white cell grid of a binary matrix, row 0 on top.
std::string heatmap_svg(const FeatureMatrix& matrix);

}  // namespace cibp
