#include "infoextract/extraction.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "infoextract/errors.hpp"
#include "infoextract/parallel.hpp"

namespace infoextract::extraction {

namespace {

ConditionalMethod resolve_method(ConditionalMethod method, std::size_t given_count) {
    if (method != ConditionalMethod::kAuto) {
        return method;
    }
    return given_count > 2 ? ConditionalMethod::kMomentRegression
                           : ConditionalMethod::kJointSlice;
}

/// Rewrites the layer's target column through fn(density, value), with the
/// conditioning values read per row from the table's given columns.
SampleTable transform_rows(const ExtractionLayer& layer, const SampleTable& table, bool forward) {
    table.validate_unit_range();
    const std::size_t target_idx = table.column_index(layer.target);
    std::vector<std::size_t> given_idx;
    given_idx.reserve(layer.given.size());
    for (const auto& name : layer.given) {
        given_idx.push_back(table.column_index(name));
    }
    SampleTable out = table;
    const std::size_t n = table.n_rows();
    auto& target_col = out.data[target_idx];
    parallel_chunks(n, 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<double> given_row(given_idx.size());
        for (std::size_t r = begin; r < end; ++r) {
            for (std::size_t c = 0; c < given_idx.size(); ++c) {
                given_row[c] = table.data[given_idx[c]][r];
            }
            const hcr::CalibratedDensity1D density = layer.conditional(given_row);
            target_col[r] = forward ? density.cdf(table.data[target_idx][r])
                                    : density.quantile(table.data[target_idx][r]);
        }
    });
    return out;
}

}  // namespace

hcr::CalibratedDensity1D ExtractionLayer::conditional(std::span<const double> given_row) const {
    if (method == ConditionalMethod::kJointSlice) {
        if (!joint_model) {
            throw InvalidInput("layer for '" + target + "' is missing its joint model");
        }
        return hcr::conditional_slice(*joint_model, 0, given_row, grid_size, floor);
    }
    if (!moment_model) {
        throw InvalidInput("layer for '" + target + "' is missing its regression model");
    }
    return hcr::predict_conditional(*moment_model, given_row, grid_size, floor);
}

ExtractionLayer fit_extraction(const SampleTable& table, const std::string& target,
                               const std::vector<std::string>& given, ConditionalMethod method,
                               int degree, int grid_size, double floor) {
    table.validate_unit_range();
    const std::size_t target_idx = table.column_index(target);
    for (std::size_t i = 0; i < given.size(); ++i) {
        const std::size_t c = table.column_index(given[i]);
        if (c == target_idx) {
            throw InvalidInput("target column '" + target + "' also appears in the given set");
        }
        for (std::size_t j = i + 1; j < given.size(); ++j) {
            if (given[i] == given[j]) {
                throw InvalidInput("conditioning column '" + given[i] + "' listed twice");
            }
        }
    }

    ExtractionLayer layer;
    layer.target = target;
    layer.given = given;
    layer.method = resolve_method(method, given.size());
    layer.degree = degree;
    layer.grid_size = grid_size;
    layer.floor = floor;
    if (layer.method == ConditionalMethod::kJointSlice) {
        SampleTable sub;
        sub.columns.push_back(target);
        sub.data.push_back(table.data[target_idx]);
        for (const auto& name : given) {
            sub.columns.push_back(name);
            sub.data.push_back(table.column(name));
        }
        layer.joint_model = hcr::fit_joint(sub, degree);
    } else {
        layer.moment_model = hcr::fit_moment_regression(table, target, given, degree);
    }
    return layer;
}

SampleTable apply_extraction(const ExtractionLayer& layer, const SampleTable& table) {
    return transform_rows(layer, table, true);
}

SampleTable invert_extraction(const ExtractionLayer& layer, const SampleTable& table) {
    return transform_rows(layer, table, false);
}

IteratedExtraction iterate_extraction(const SampleTable& table, const std::string& target,
                                      const std::vector<std::string>& given, int iterations,
                                      ConditionalMethod method, int degree, int grid_size,
                                      double floor) {
    if (iterations < 1) {
        throw InvalidInput("iterations must be at least 1, got " + std::to_string(iterations));
    }
    IteratedExtraction out;
    out.result = table;
    for (int k = 0; k < iterations; ++k) {
        try {
            ExtractionLayer layer =
                fit_extraction(out.result, target, given, method, degree, grid_size, floor);
            out.result = apply_extraction(layer, out.result);
            out.layers.push_back(std::move(layer));
        } catch (const InvalidInput& e) {
            throw InvalidInput("iteration " + std::to_string(k + 1) + ": " + e.what());
        } catch (const NumericalFailure& e) {
            throw NumericalFailure("iteration " + std::to_string(k + 1) + ": " + e.what());
        } catch (const CapacityExceeded& e) {
            throw CapacityExceeded("iteration " + std::to_string(k + 1) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace infoextract::extraction
