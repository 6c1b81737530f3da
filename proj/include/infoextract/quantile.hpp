#pragma once

#include <utility>
#include <vector>

#include "infoextract/table.hpp"

namespace infoextract::normalization {

/// Piecewise-linear empirical CDF over the distinct values of one column.
/// Positions follow the (rank - 0.5)/n rule with average ranks for ties,
/// so forward images lie strictly inside (0,1).
struct QuantileMap {
    std::vector<double> values;     ///< distinct sample values, ascending
    std::vector<double> positions;  ///< average-rank position per value
};

/// Builds the map for one column. Throws InvalidInput on empty or
/// non-finite input.
QuantileMap fit_quantile_map(const std::vector<double>& column);

/// Piecewise-linear forward CDF; inputs outside the sample hull clamp to
/// the hull's image rather than extrapolate.
double forward_quantile(const QuantileMap& map, double x);

/// Piecewise-linear inverse; u must lie in [0,1] (InvalidInput otherwise).
double inverse_quantile(const QuantileMap& map, double u);

/// Replaces each column by its forward-quantile image; maps returned in
/// column order for later inversion.
std::pair<SampleTable, std::vector<QuantileMap>> normalize_table(const SampleTable& table);

}  // namespace infoextract::normalization
