#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "infoextract/decoupling.hpp"
#include "infoextract/extraction.hpp"
#include "infoextract/granger.hpp"
#include "infoextract/hcr.hpp"
#include "infoextract/infoflow.hpp"

namespace infoextract::serialize {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const hcr::JointDensityModel& model);
ordered_json to_json(const hcr::MomentRegressionModel& model);
ordered_json to_json(const extraction::ExtractionLayer& layer);
ordered_json to_json(const decoupling::DependenceReport& report);
ordered_json to_json(const infoflow::MiEstimate& estimate);
ordered_json to_json(const granger::DelayProfile& profile);
ordered_json to_json(const granger::DelayFeatureDecomposition& decomposition);
ordered_json to_json(const granger::PairCausalityReport& pair);
ordered_json to_json(const granger::MultivariateGrangerReport& report);

hcr::JointDensityModel joint_model_from_json(const ordered_json& j);
hcr::MomentRegressionModel moment_model_from_json(const ordered_json& j);
extraction::ExtractionLayer layer_from_json(const ordered_json& j);

/// A replayable stack of layers plus the decoupling bookkeeping needed to
/// refuse inverting experimental (original-conditioning) stacks.
struct LayerStack {
    std::vector<extraction::ExtractionLayer> layers;
    decoupling::ConditioningMode mode = decoupling::ConditioningMode::kCurrent;
    std::vector<std::string> order;  ///< decoupling order, empty for plain stacks
    int sweeps = 0;                  ///< 0 for plain stacks
};

ordered_json to_json(const LayerStack& stack);
LayerStack layer_stack_from_json(const ordered_json& j);

/// File helpers with the same overwrite policy as CSV output.
void write_json_file(const ordered_json& j, const std::string& path,
                     bool allow_overwrite = false);
ordered_json read_json_file(const std::string& path);

}  // namespace infoextract::serialize
