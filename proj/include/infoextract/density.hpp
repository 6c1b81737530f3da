#pragma once

#include <vector>

namespace infoextract::hcr {

inline constexpr double kDefaultFloor = 0.1;
inline constexpr int kDefaultGrid = 1024;
inline constexpr int kDefaultDegree = 4;
inline constexpr double kDefaultRidge = 1e-6;

/// A positive, normalized density on a uniform grid over [0,1] together
/// with its CDF. Built from raw (possibly negative) model values by the
/// max(rho, floor)/Z calibration; the positive floor makes the CDF
/// strictly increasing, hence invertible.
struct CalibratedDensity1D {
    std::vector<double> density;     ///< G values, each >= floor/Z > 0
    std::vector<double> cumulative;  ///< G values, cumulative[0]=0, cumulative[G-1]=1
    double z = 1.0;                  ///< trapezoid normalization constant
    double floor = kDefaultFloor;

    int grid_size() const { return static_cast<int>(density.size()); }

    /// Clips raw values at floor, normalizes by the trapezoid integral,
    /// and accumulates the CDF.
    static CalibratedDensity1D from_raw(std::vector<double> raw, double floor);

    /// CDF value at x in [0,1], linear interpolation on the grid.
    double cdf(double x) const;

    /// Inverse CDF via binary search plus linear interpolation; u in [0,1].
    double quantile(double u) const;
};

}  // namespace infoextract::hcr
