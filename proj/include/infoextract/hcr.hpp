#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infoextract/basis.hpp"
#include "infoextract/density.hpp"
#include "infoextract/table.hpp"

namespace infoextract::hcr {

inline constexpr std::size_t kDefaultTensorCap = 10'000'000;

/// Joint density model rho(x) = sum over multi-indices (i_1..i_d) of
/// coeffs[i] * prod_k f_{i_k}(x_k). Coefficients are stored in
/// lexicographic multi-index order, last axis fastest.
struct JointDensityModel {
    int dims = 0;
    int degree = 0;
    std::vector<double> coeffs;

    std::size_t tensor_size() const { return coeffs.size(); }
};

/// Coefficient estimation as basis-product means over the rows of a
/// [0,1] table; axes follow the table's column order. Chunked compensated
/// summation keeps the result independent of the worker thread count.
JointDensityModel fit_joint(const SampleTable& table, int degree,
                            std::size_t tensor_cap = kDefaultTensorCap);

/// Raw (possibly negative) density at a point in [0,1]^dims.
double eval_raw_density(const JointDensityModel& model, std::span<const double> point);

/// Substitutes conditioning values on every axis except target_axis,
/// evaluates the remaining 1-D raw density on grid_size uniform points,
/// and calibrates it: max(rho, floor), trapezoid normalization, CDF.
CalibratedDensity1D conditional_slice(const JointDensityModel& model, int target_axis,
                                      std::span<const double> given, int grid_size = kDefaultGrid,
                                      double floor = kDefaultFloor);

/// Per-moment linear model a_i(y) from ridge least squares on the feature
/// set {1} united with per-column basis values of the conditioning
/// variables (optionally cross-column pairwise products).
struct MomentRegressionModel {
    int degree = 0;                            ///< predicted moments i = 1..degree
    std::vector<std::string> given;            ///< conditioning column names, in order
    bool pairwise_products = false;
    std::vector<std::string> feature_names;    ///< raw feature list, bias first
    std::vector<std::uint8_t> feature_kept;    ///< per raw feature; zero-variance drops
    std::vector<std::string> dropped;          ///< names of dropped features
    std::vector<std::vector<double>> weights;  ///< degree rows over kept features
    double lambda = kDefaultRidge;

    std::size_t kept_count() const { return weights.empty() ? 0 : weights.front().size(); }
};

/// Trains one ridge regression per predicted moment f_i(x_target). The
/// bias feature is never penalized, so an empty conditioning set
/// reproduces the sample moment means exactly.
MomentRegressionModel fit_moment_regression(const SampleTable& table, const std::string& target,
                                            const std::vector<std::string>& given,
                                            int degree = kDefaultDegree,
                                            double lambda = kDefaultRidge,
                                            bool pairwise_products = false);

/// Predicted moments a_1..a_m for one conditioning row (values ordered as
/// model.given).
std::vector<double> predict_moments(const MomentRegressionModel& model,
                                    std::span<const double> given_row);

/// Density 1 + sum_i f_i(x) a_i(given_row) on the grid, then the same
/// calibration as conditional_slice.
CalibratedDensity1D predict_conditional(const MomentRegressionModel& model,
                                        std::span<const double> given_row,
                                        int grid_size = kDefaultGrid,
                                        double floor = kDefaultFloor);

}  // namespace infoextract::hcr
