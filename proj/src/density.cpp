#include "infoextract/density.hpp"

#include <algorithm>
#include <cmath>

#include "infoextract/errors.hpp"

namespace infoextract::hcr {

CalibratedDensity1D CalibratedDensity1D::from_raw(std::vector<double> raw, double floor) {
    if (raw.size() < 2) {
        throw InvalidInput("calibrated density needs at least 2 grid points");
    }
    if (!(floor > 0.0)) {
        throw InvalidInput("calibration floor must be positive");
    }
    const std::size_t g = raw.size();
    for (double& v : raw) {
        if (!std::isfinite(v)) {
            throw NumericalFailure("raw density value is not finite");
        }
        v = std::max(v, floor);
    }
    const double h = 1.0 / static_cast<double>(g - 1);
    double z = 0.0;
    for (std::size_t k = 0; k + 1 < g; ++k) {
        z += 0.5 * (raw[k] + raw[k + 1]) * h;
    }
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw NumericalFailure("density normalization constant is not positive");
    }
    CalibratedDensity1D out;
    out.z = z;
    out.floor = floor;
    out.density.resize(g);
    for (std::size_t k = 0; k < g; ++k) {
        out.density[k] = raw[k] / z;
    }
    out.cumulative.resize(g);
    out.cumulative[0] = 0.0;
    for (std::size_t k = 1; k < g; ++k) {
        out.cumulative[k] =
            out.cumulative[k - 1] + 0.5 * (out.density[k - 1] + out.density[k]) * h;
    }
    const double total = out.cumulative[g - 1];
    for (std::size_t k = 1; k < g; ++k) {
        out.cumulative[k] /= total;
    }
    out.cumulative[g - 1] = 1.0;
    return out;
}

double CalibratedDensity1D::cdf(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InvalidInput("cdf argument outside [0,1]");
    }
    const std::size_t g = cumulative.size();
    const double pos = x * static_cast<double>(g - 1);
    std::size_t k = static_cast<std::size_t>(pos);
    if (k >= g - 1) {
        k = g - 2;
    }
    const double t = pos - static_cast<double>(k);
    return cumulative[k] * (1.0 - t) + cumulative[k + 1] * t;
}

double CalibratedDensity1D::quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw InvalidInput("quantile argument outside [0,1]");
    }
    const std::size_t g = cumulative.size();
    // Largest k with cumulative[k] <= u; cumulative is strictly increasing.
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t hi = static_cast<std::size_t>(it - cumulative.begin());
    if (hi == 0) {
        return 0.0;
    }
    if (hi >= g) {
        return 1.0;
    }
    const std::size_t lo = hi - 1;
    const double span = cumulative[hi] - cumulative[lo];
    const double t = span > 0.0 ? (u - cumulative[lo]) / span : 0.0;
    const double h = 1.0 / static_cast<double>(g - 1);
    return (static_cast<double>(lo) + t) * h;
}

}  // namespace infoextract::hcr
