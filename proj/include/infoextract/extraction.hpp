#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infoextract/density.hpp"
#include "infoextract/hcr.hpp"
#include "infoextract/table.hpp"

namespace infoextract::extraction {

/// Conditional-model choice for a layer. Auto resolves to joint-slice for
/// up to two conditioning columns and moment-regression beyond that.
enum class ConditionalMethod { kAuto, kJointSlice, kMomentRegression };

/// One fitted transform x -> CDF_{X|Y=y}(x) for a target column given a
/// set of conditioning columns; invertible per row while the conditioning
/// values are available in their fit-time state.
struct ExtractionLayer {
    std::string target;
    std::vector<std::string> given;
    ConditionalMethod method = ConditionalMethod::kAuto;  ///< resolved at fit time
    int degree = hcr::kDefaultDegree;
    int grid_size = hcr::kDefaultGrid;
    double floor = hcr::kDefaultFloor;
    std::optional<hcr::JointDensityModel> joint_model;  ///< target on axis 0
    std::optional<hcr::MomentRegressionModel> moment_model;

    /// Calibrated conditional density for one row's conditioning values.
    hcr::CalibratedDensity1D conditional(std::span<const double> given_row) const;
};

ExtractionLayer fit_extraction(const SampleTable& table, const std::string& target,
                               const std::vector<std::string>& given,
                               ConditionalMethod method = ConditionalMethod::kAuto,
                               int degree = hcr::kDefaultDegree, int grid_size = hcr::kDefaultGrid,
                               double floor = hcr::kDefaultFloor);

/// Replaces the target column by the conditional CDF value of each row;
/// other columns pass through unchanged.
SampleTable apply_extraction(const ExtractionLayer& layer, const SampleTable& table);

/// Recovers the target column via inverse CDF; requires the conditioning
/// columns in the same state they had when the layer was applied.
SampleTable invert_extraction(const ExtractionLayer& layer, const SampleTable& table);

struct IteratedExtraction {
    std::vector<ExtractionLayer> layers;  ///< application order
    SampleTable result;
};

/// Fits and applies k successive extractions of the same target; layer
/// i+1 is trained on the output of layer i.
IteratedExtraction iterate_extraction(const SampleTable& table, const std::string& target,
                                      const std::vector<std::string>& given, int iterations,
                                      ConditionalMethod method = ConditionalMethod::kAuto,
                                      int degree = hcr::kDefaultDegree,
                                      int grid_size = hcr::kDefaultGrid,
                                      double floor = hcr::kDefaultFloor);

}  // namespace infoextract::extraction
