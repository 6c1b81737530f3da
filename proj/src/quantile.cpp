#include "infoextract/quantile.hpp"

#include <algorithm>
#include <cmath>

#include "infoextract/errors.hpp"
#include "infoextract/parallel.hpp"

namespace infoextract::normalization {

QuantileMap fit_quantile_map(const std::vector<double>& column) {
    if (column.empty()) {
        throw InvalidInput("cannot fit a quantile map on an empty column");
    }
    for (double v : column) {
        if (!std::isfinite(v)) {
            throw InvalidInput("quantile map input contains a non-finite value");
        }
    }
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());

    QuantileMap map;
    const double n = static_cast<double>(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) {
            ++j;
        }
        // Average of (rank + 0.5)/n over the tie group [i, j].
        const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j));
        map.values.push_back(sorted[i]);
        map.positions.push_back((mean_rank + 0.5) / n);
        i = j + 1;
    }
    return map;
}

double forward_quantile(const QuantileMap& map, double x) {
    if (map.values.empty()) {
        throw InvalidInput("quantile map is empty");
    }
    if (!std::isfinite(x)) {
        throw InvalidInput("forward_quantile input is not finite");
    }
    if (x <= map.values.front()) {
        return map.positions.front();
    }
    if (x >= map.values.back()) {
        return map.positions.back();
    }
    const auto it = std::upper_bound(map.values.begin(), map.values.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - map.values.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - map.values[lo]) / (map.values[hi] - map.values[lo]);
    return map.positions[lo] + t * (map.positions[hi] - map.positions[lo]);
}

double inverse_quantile(const QuantileMap& map, double u) {
    if (map.values.empty()) {
        throw InvalidInput("quantile map is empty");
    }
    if (!(u >= 0.0 && u <= 1.0)) {
        throw InvalidInput("inverse_quantile requires u in [0,1]");
    }
    if (u <= map.positions.front()) {
        return map.values.front();
    }
    if (u >= map.positions.back()) {
        return map.values.back();
    }
    const auto it = std::upper_bound(map.positions.begin(), map.positions.end(), u);
    const std::size_t hi = static_cast<std::size_t>(it - map.positions.begin());
    const std::size_t lo = hi - 1;
    const double t = (u - map.positions[lo]) / (map.positions[hi] - map.positions[lo]);
    return map.values[lo] + t * (map.values[hi] - map.values[lo]);
}

std::pair<SampleTable, std::vector<QuantileMap>> normalize_table(const SampleTable& table) {
    table.validate();
    if (table.n_rows() == 0) {
        throw InvalidInput("cannot normalize an empty table");
    }
    SampleTable out;
    out.columns = table.columns;
    out.data.resize(table.n_cols());
    std::vector<QuantileMap> maps(table.n_cols());
    parallel_indices(table.n_cols(), [&](std::size_t c) {
        try {
            maps[c] = fit_quantile_map(table.data[c]);
        } catch (const InvalidInput& e) {
            throw InvalidInput("column '" + table.columns[c] + "': " + e.what());
        }
        std::vector<double> col(table.n_rows());
        for (std::size_t r = 0; r < col.size(); ++r) {
            col[r] = forward_quantile(maps[c], table.data[c][r]);
        }
        out.data[c] = std::move(col);
    });
    return {std::move(out), std::move(maps)};
}

}  // namespace infoextract::normalization
