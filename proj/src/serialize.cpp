#include "infoextract/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <string>

#include "infoextract/errors.hpp"

namespace infoextract::serialize {

namespace {

constexpr const char* kStackFormat = "infoextract-layers";
constexpr int kStackVersion = 1;

/// All schema violations surface as FormatError with the JSON context.
template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string(what) + ": " + e.what());
    }
}

std::string method_name(extraction::ConditionalMethod method) {
    switch (method) {
        case extraction::ConditionalMethod::kJointSlice:
            return "joint-slice";
        case extraction::ConditionalMethod::kMomentRegression:
            return "moment-regression";
        case extraction::ConditionalMethod::kAuto:
            return "auto";
    }
    throw InvalidInput("unknown conditional method");
}

extraction::ConditionalMethod method_from_name(const std::string& name) {
    if (name == "joint-slice") {
        return extraction::ConditionalMethod::kJointSlice;
    }
    if (name == "moment-regression") {
        return extraction::ConditionalMethod::kMomentRegression;
    }
    throw FormatError("unknown layer method '" + name + "'");
}

}  // namespace

ordered_json to_json(const hcr::JointDensityModel& model) {
    ordered_json j;
    j["type"] = "joint-density";
    j["dims"] = model.dims;
    j["degree"] = model.degree;
    j["coeffs"] = model.coeffs;
    return j;
}

ordered_json to_json(const hcr::MomentRegressionModel& model) {
    ordered_json j;
    j["type"] = "moment-regression";
    j["degree"] = model.degree;
    j["given"] = model.given;
    j["pairwise_products"] = model.pairwise_products;
    j["lambda"] = model.lambda;
    j["feature_names"] = model.feature_names;
    j["feature_kept"] = model.feature_kept;
    j["dropped"] = model.dropped;
    j["weights"] = model.weights;
    return j;
}

ordered_json to_json(const extraction::ExtractionLayer& layer) {
    ordered_json j;
    j["target"] = layer.target;
    j["given"] = layer.given;
    j["method"] = method_name(layer.method);
    j["degree"] = layer.degree;
    j["grid_size"] = layer.grid_size;
    j["floor"] = layer.floor;
    if (layer.method == extraction::ConditionalMethod::kJointSlice) {
        if (!layer.joint_model) {
            throw InvalidInput("joint-slice layer for '" + layer.target + "' has no model");
        }
        j["model"] = to_json(*layer.joint_model);
    } else {
        if (!layer.moment_model) {
            throw InvalidInput("moment-regression layer for '" + layer.target + "' has no model");
        }
        j["model"] = to_json(*layer.moment_model);
    }
    return j;
}

ordered_json to_json(const decoupling::DependenceReport& report) {
    ordered_json j;
    j["columns"] = report.columns;
    j["spearman_abs"] = report.spearman_abs;
    j["mi"] = report.mi;
    j["max_spearman_abs"] = report.max_spearman_abs();
    j["max_mi"] = report.max_mi();
    return j;
}

ordered_json to_json(const infoflow::MiEstimate& estimate) {
    ordered_json j;
    j["value"] = estimate.value;
    j["method"] = estimate.method;
    j["parameter"] = estimate.parameter;
    j["n"] = estimate.n;
    if (estimate.quadratic) {
        j["quadratic"] = *estimate.quadratic;
    }
    if (estimate.raw) {
        j["raw"] = *estimate.raw;
    }
    return j;
}

ordered_json to_json(const granger::DelayProfile& profile) {
    ordered_json j;
    j["delays"] = profile.delays;
    j["correlation"] = profile.correlation;
    j["mi"] = profile.mi;
    j["argmax_delay"] = profile.argmax_delay;
    return j;
}

ordered_json to_json(const granger::DelayFeatureDecomposition& decomposition) {
    ordered_json j;
    j["rank"] = decomposition.rank;
    j["directions"] = decomposition.directions;
    j["scores"] = decomposition.scores;
    j["eigenvalues"] = decomposition.eigenvalues;
    j["variance_fraction"] = decomposition.variance_fraction;
    return j;
}

ordered_json to_json(const granger::PairCausalityReport& pair) {
    ordered_json j;
    j["source"] = pair.source;
    j["target"] = pair.target;
    j["peak_abs_correlation"] = pair.peak_abs_correlation;
    j["peak_delay"] = pair.peak_delay;
    j["profile"] = to_json(pair.profile);
    j["pca"] = to_json(pair.decomposition);
    return j;
}

ordered_json to_json(const granger::MultivariateGrangerReport& report) {
    ordered_json j;
    j["decoupled"] = report.decoupled;
    j["columns"] = report.panel.columns;
    ordered_json pairs = ordered_json::array();
    for (const auto& pair : report.pairs) {
        pairs.push_back(to_json(pair));
    }
    j["pairs"] = std::move(pairs);
    return j;
}

hcr::JointDensityModel joint_model_from_json(const ordered_json& j) {
    return guarded("joint-density model", [&] {
        hcr::JointDensityModel model;
        model.dims = j.at("dims").get<int>();
        model.degree = j.at("degree").get<int>();
        model.coeffs = j.at("coeffs").get<std::vector<double>>();
        if (model.dims < 1 || model.degree < 0) {
            throw FormatError("joint-density model has invalid dims/degree");
        }
        std::size_t expect = 1;
        for (int k = 0; k < model.dims; ++k) {
            expect *= static_cast<std::size_t>(model.degree) + 1;
        }
        if (model.coeffs.size() != expect) {
            throw FormatError("joint-density model lists " + std::to_string(model.coeffs.size()) +
                              " coefficients, expected " + std::to_string(expect));
        }
        return model;
    });
}

hcr::MomentRegressionModel moment_model_from_json(const ordered_json& j) {
    return guarded("moment-regression model", [&] {
        hcr::MomentRegressionModel model;
        model.degree = j.at("degree").get<int>();
        model.given = j.at("given").get<std::vector<std::string>>();
        model.pairwise_products = j.at("pairwise_products").get<bool>();
        model.lambda = j.at("lambda").get<double>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.feature_kept = j.at("feature_kept").get<std::vector<std::uint8_t>>();
        model.dropped = j.at("dropped").get<std::vector<std::string>>();
        model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        if (model.degree < 1 ||
            model.weights.size() != static_cast<std::size_t>(model.degree) ||
            model.feature_kept.size() != model.feature_names.size()) {
            throw FormatError("moment-regression model has inconsistent shapes");
        }
        std::size_t kept = 0;
        for (auto flag : model.feature_kept) {
            kept += flag ? 1 : 0;
        }
        for (const auto& row : model.weights) {
            if (row.size() != kept) {
                throw FormatError("moment-regression weight rows do not match kept features");
            }
        }
        return model;
    });
}

extraction::ExtractionLayer layer_from_json(const ordered_json& j) {
    return guarded("extraction layer", [&] {
        extraction::ExtractionLayer layer;
        layer.target = j.at("target").get<std::string>();
        layer.given = j.at("given").get<std::vector<std::string>>();
        layer.method = method_from_name(j.at("method").get<std::string>());
        layer.degree = j.at("degree").get<int>();
        layer.grid_size = j.at("grid_size").get<int>();
        layer.floor = j.at("floor").get<double>();
        const auto& model = j.at("model");
        const std::string type = model.at("type").get<std::string>();
        if (layer.method == extraction::ConditionalMethod::kJointSlice) {
            if (type != "joint-density") {
                throw FormatError("joint-slice layer carries a '" + type + "' model");
            }
            layer.joint_model = joint_model_from_json(model);
            if (layer.joint_model->dims != static_cast<int>(layer.given.size()) + 1) {
                throw FormatError("layer model dims do not match its given set");
            }
        } else {
            if (type != "moment-regression") {
                throw FormatError("moment-regression layer carries a '" + type + "' model");
            }
            layer.moment_model = moment_model_from_json(model);
            if (layer.moment_model->given != layer.given) {
                throw FormatError("layer model conditioning does not match its given set");
            }
        }
        return layer;
    });
}

ordered_json to_json(const LayerStack& stack) {
    ordered_json j;
    j["format"] = kStackFormat;
    j["version"] = kStackVersion;
    j["conditioning"] =
        stack.mode == decoupling::ConditioningMode::kOriginal ? "original" : "current";
    if (!stack.order.empty()) {
        j["order"] = stack.order;
    }
    if (stack.sweeps > 0) {
        j["sweeps"] = stack.sweeps;
    }
    ordered_json layers = ordered_json::array();
    for (const auto& layer : stack.layers) {
        layers.push_back(to_json(layer));
    }
    j["layers"] = std::move(layers);
    return j;
}

LayerStack layer_stack_from_json(const ordered_json& j) {
    return guarded("layer stack", [&] {
        if (!j.contains("format") || j.at("format").get<std::string>() != kStackFormat) {
            throw FormatError("not an " + std::string(kStackFormat) + " document");
        }
        if (j.at("version").get<int>() != kStackVersion) {
            throw FormatError("unsupported layer-stack version");
        }
        LayerStack stack;
        const std::string mode = j.value("conditioning", "current");
        if (mode == "original") {
            stack.mode = decoupling::ConditioningMode::kOriginal;
        } else if (mode == "current") {
            stack.mode = decoupling::ConditioningMode::kCurrent;
        } else {
            throw FormatError("unknown conditioning mode '" + mode + "'");
        }
        if (j.contains("order")) {
            stack.order = j.at("order").get<std::vector<std::string>>();
        }
        stack.sweeps = j.value("sweeps", 0);
        for (const auto& layer : j.at("layers")) {
            stack.layers.push_back(layer_from_json(layer));
        }
        return stack;
    });
}

void write_json_file(const ordered_json& j, const std::string& path, bool allow_overwrite) {
    if (!allow_overwrite && std::filesystem::exists(path)) {
        throw RefusedOverwrite("'" + path + "' already exists; pass --force to overwrite");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidInput("cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
    out.flush();
    if (!out) {
        throw InvalidInput("failed while writing '" + path + "'");
    }
}

ordered_json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "' for reading");
    }
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace infoextract::serialize
