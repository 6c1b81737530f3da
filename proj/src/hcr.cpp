#include "infoextract/hcr.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "infoextract/errors.hpp"
#include "infoextract/parallel.hpp"

namespace infoextract::hcr {

namespace {

constexpr std::size_t kFitChunkRows = 8192;
constexpr std::size_t kPartialBudget = 1u << 26;  ///< max total partial-tensor entries
constexpr double kVarianceEps = 1e-12;

/// Accumulates the basis-product tensor for rows [begin, end) of the
/// per-axis basis value matrices (bv[axis] has stride degree+1 per row).
void accumulate_rows(const std::vector<std::vector<double>>& bv, int dims, int degree,
                     std::size_t begin, std::size_t end, std::vector<double>& acc) {
    const int order = degree + 1;
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<double> prefix(static_cast<std::size_t>(dims) + 1, 1.0);
    for (std::size_t r = begin; r < end; ++r) {
        std::fill(idx.begin(), idx.end(), 0);
        prefix[0] = 1.0;
        for (int k = 0; k < dims; ++k) {
            prefix[k + 1] = prefix[k] * bv[static_cast<std::size_t>(k)][r * order];
        }
        std::size_t cell = 0;
        while (true) {
            acc[cell] += prefix[static_cast<std::size_t>(dims)];
            ++cell;
            int k = dims - 1;
            while (k >= 0 && idx[static_cast<std::size_t>(k)] == degree) {
                idx[static_cast<std::size_t>(k)] = 0;
                --k;
            }
            if (k < 0) {
                break;
            }
            ++idx[static_cast<std::size_t>(k)];
            for (int j = k; j < dims; ++j) {
                prefix[j + 1] = prefix[j] * bv[static_cast<std::size_t>(j)]
                                              [r * order + static_cast<std::size_t>(
                                                               idx[static_cast<std::size_t>(j)])];
            }
        }
    }
}

/// Raw regression feature values for one conditioning row. Order: bias,
/// then f_1..f_m per column, then pairwise cross-column products.
void raw_features(std::span<const double> row, int degree, bool pairwise,
                  std::vector<double>& scratch, std::vector<double>& out) {
    const std::size_t cols = row.size();
    const std::size_t order = static_cast<std::size_t>(degree) + 1;
    HcrBasis basis(degree);
    scratch.resize(cols * order);
    for (std::size_t c = 0; c < cols; ++c) {
        basis.eval_all(row[c], std::span<double>(scratch.data() + c * order, order));
    }
    out.clear();
    out.push_back(1.0);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t j = 1; j <= static_cast<std::size_t>(degree); ++j) {
            out.push_back(scratch[c * order + j]);
        }
    }
    if (pairwise) {
        for (std::size_t c1 = 0; c1 < cols; ++c1) {
            for (std::size_t c2 = c1 + 1; c2 < cols; ++c2) {
                for (std::size_t j = 1; j <= static_cast<std::size_t>(degree); ++j) {
                    for (std::size_t k = 1; k <= static_cast<std::size_t>(degree); ++k) {
                        out.push_back(scratch[c1 * order + j] * scratch[c2 * order + k]);
                    }
                }
            }
        }
    }
}

std::vector<std::string> feature_name_list(const std::vector<std::string>& given, int degree,
                                           bool pairwise) {
    std::vector<std::string> names;
    names.push_back("1");
    for (const auto& c : given) {
        for (int j = 1; j <= degree; ++j) {
            names.push_back("f" + std::to_string(j) + "(" + c + ")");
        }
    }
    if (pairwise) {
        for (std::size_t c1 = 0; c1 < given.size(); ++c1) {
            for (std::size_t c2 = c1 + 1; c2 < given.size(); ++c2) {
                for (int j = 1; j <= degree; ++j) {
                    for (int k = 1; k <= degree; ++k) {
                        names.push_back("f" + std::to_string(j) + "(" + given[c1] + ")*f" +
                                        std::to_string(k) + "(" + given[c2] + ")");
                    }
                }
            }
        }
    }
    return names;
}

CalibratedDensity1D calibrate_series(const std::vector<double>& coeffs1d, int grid_size,
                                     double floor) {
    if (grid_size < 64) {
        throw InvalidInput("grid_size must be at least 64, got " + std::to_string(grid_size));
    }
    const int degree = static_cast<int>(coeffs1d.size()) - 1;
    HcrBasis basis(degree);
    std::vector<double> values(static_cast<std::size_t>(degree) + 1);
    std::vector<double> raw(static_cast<std::size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g) {
        const double x = static_cast<double>(g) / (grid_size - 1);
        basis.eval_all(x, values);
        double rho = 0.0;
        for (std::size_t i = 0; i < coeffs1d.size(); ++i) {
            rho += coeffs1d[i] * values[i];
        }
        raw[static_cast<std::size_t>(g)] = rho;
    }
    return CalibratedDensity1D::from_raw(std::move(raw), floor);
}

}  // namespace

JointDensityModel fit_joint(const SampleTable& table, int degree, std::size_t tensor_cap) {
    table.validate_unit_range();
    const std::size_t n = table.n_rows();
    const int dims = static_cast<int>(table.n_cols());
    if (n == 0) {
        throw InvalidInput("fit_joint requires at least one row");
    }
    if (degree < 0) {
        throw InvalidInput("degree must be non-negative, got " + std::to_string(degree));
    }
    const std::size_t order = static_cast<std::size_t>(degree) + 1;
    std::size_t tensor = 1;
    for (int k = 0; k < dims; ++k) {
        if (tensor > tensor_cap / order) {
            throw CapacityExceeded("coefficient tensor (" + std::to_string(degree + 1) + "^" +
                                   std::to_string(dims) + " entries) exceeds the cap of " +
                                   std::to_string(tensor_cap));
        }
        tensor *= order;
    }

    // Per-axis basis values, one contiguous block of (degree+1) per row.
    std::vector<std::vector<double>> bv(static_cast<std::size_t>(dims));
    parallel_indices(static_cast<std::size_t>(dims), [&](std::size_t c) {
        HcrBasis basis(degree);
        auto& block = bv[c];
        block.resize(n * order);
        for (std::size_t r = 0; r < n; ++r) {
            basis.eval_all(table.data[c][r], std::span<double>(block.data() + r * order, order));
        }
    });

    // Fixed chunk grid, independent of thread count; widen chunks when the
    // tensor is large so the partial buffers stay within a memory budget.
    std::size_t chunk = kFitChunkRows;
    while (chunk < n && (n + chunk - 1) / chunk > std::max<std::size_t>(1, kPartialBudget / tensor)) {
        chunk *= 2;
    }
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<std::vector<double>> partials(n_chunks);
    parallel_chunks(n, chunk, [&](std::size_t chunk_idx, std::size_t begin, std::size_t end) {
        partials[chunk_idx].assign(tensor, 0.0);
        accumulate_rows(bv, dims, degree, begin, end, partials[chunk_idx]);
    });

    // Neumaier-compensated reduction in fixed chunk order.
    JointDensityModel model;
    model.dims = dims;
    model.degree = degree;
    model.coeffs.assign(tensor, 0.0);
    std::vector<double> comp(tensor, 0.0);
    for (std::size_t p = 0; p < n_chunks; ++p) {
        for (std::size_t cell = 0; cell < tensor; ++cell) {
            const double sum = model.coeffs[cell];
            const double v = partials[p][cell];
            const double t = sum + v;
            comp[cell] += (std::abs(sum) >= std::abs(v)) ? (sum - t) + v : (v - t) + sum;
            model.coeffs[cell] = t;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t cell = 0; cell < tensor; ++cell) {
        model.coeffs[cell] = (model.coeffs[cell] + comp[cell]) * inv_n;
    }
    model.coeffs[0] = 1.0;  // f_0 === 1 makes the all-zero mean exact
    return model;
}

double eval_raw_density(const JointDensityModel& model, std::span<const double> point) {
    if (static_cast<int>(point.size()) != model.dims) {
        throw InvalidInput("point has " + std::to_string(point.size()) + " coordinates, model has " +
                           std::to_string(model.dims) + " axes");
    }
    const std::size_t order = static_cast<std::size_t>(model.degree) + 1;
    HcrBasis basis(model.degree);
    std::vector<double> bv(point.size() * order);
    for (std::size_t c = 0; c < point.size(); ++c) {
        if (point[c] < 0.0 || point[c] > 1.0) {
            throw InvalidInput("point coordinate " + std::to_string(point[c]) + " outside [0,1]");
        }
        basis.eval_all(point[c], std::span<double>(bv.data() + c * order, order));
    }
    const int dims = model.dims;
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    std::vector<double> prefix(static_cast<std::size_t>(dims) + 1, 1.0);
    for (int k = 0; k < dims; ++k) {
        prefix[k + 1] = prefix[k] * bv[static_cast<std::size_t>(k) * order];
    }
    double total = 0.0;
    std::size_t cell = 0;
    while (true) {
        total += model.coeffs[cell] * prefix[static_cast<std::size_t>(dims)];
        ++cell;
        int k = dims - 1;
        while (k >= 0 && idx[static_cast<std::size_t>(k)] == model.degree) {
            idx[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) {
            break;
        }
        ++idx[static_cast<std::size_t>(k)];
        for (int j = k; j < dims; ++j) {
            prefix[j + 1] =
                prefix[j] *
                bv[static_cast<std::size_t>(j) * order + static_cast<std::size_t>(
                                                             idx[static_cast<std::size_t>(j)])];
        }
    }
    return total;
}

CalibratedDensity1D conditional_slice(const JointDensityModel& model, int target_axis,
                                      std::span<const double> given, int grid_size, double floor) {
    if (target_axis < 0 || target_axis >= model.dims) {
        throw InvalidInput("target_axis " + std::to_string(target_axis) + " outside model with " +
                           std::to_string(model.dims) + " axes");
    }
    if (static_cast<int>(given.size()) != model.dims - 1) {
        throw InvalidInput("expected " + std::to_string(model.dims - 1) +
                           " conditioning values, got " + std::to_string(given.size()));
    }
    const std::size_t order = static_cast<std::size_t>(model.degree) + 1;
    HcrBasis basis(model.degree);

    // Basis values per axis: conditioning axes at their given value, the
    // target axis contributing a selector handled via the collapse below.
    std::vector<std::vector<double>> bv(static_cast<std::size_t>(model.dims));
    std::size_t g = 0;
    for (int k = 0; k < model.dims; ++k) {
        bv[static_cast<std::size_t>(k)].resize(order);
        if (k == static_cast<int>(target_axis)) {
            continue;
        }
        const double y = given[g++];
        if (y < 0.0 || y > 1.0) {
            throw InvalidInput("conditioning value " + std::to_string(y) + " outside [0,1]");
        }
        basis.eval_all(y, bv[static_cast<std::size_t>(k)]);
    }

    // Collapse the tensor against the conditioning basis values, leaving
    // 1-D coefficients over the target axis.
    std::vector<double> coeffs1d(order, 0.0);
    std::vector<int> idx(static_cast<std::size_t>(model.dims), 0);
    const std::size_t tensor = model.tensor_size();
    for (std::size_t cell = 0; cell < tensor; ++cell) {
        double w = 1.0;
        for (int k = 0; k < model.dims; ++k) {
            if (k != static_cast<int>(target_axis)) {
                w *= bv[static_cast<std::size_t>(k)][static_cast<std::size_t>(
                    idx[static_cast<std::size_t>(k)])];
            }
        }
        coeffs1d[static_cast<std::size_t>(idx[static_cast<std::size_t>(target_axis)])] +=
            model.coeffs[cell] * w;
        int k = model.dims - 1;
        while (k >= 0 && idx[static_cast<std::size_t>(k)] == model.degree) {
            idx[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k >= 0) {
            ++idx[static_cast<std::size_t>(k)];
        }
    }
    return calibrate_series(coeffs1d, grid_size, floor);
}

MomentRegressionModel fit_moment_regression(const SampleTable& table, const std::string& target,
                                            const std::vector<std::string>& given, int degree,
                                            double lambda, bool pairwise_products) {
    table.validate_unit_range();
    if (degree < 1) {
        throw InvalidInput("degree must be at least 1, got " + std::to_string(degree));
    }
    if (lambda < 0.0) {
        throw InvalidInput("ridge lambda must be non-negative");
    }
    const std::size_t target_idx = table.column_index(target);
    std::vector<std::size_t> given_idx;
    given_idx.reserve(given.size());
    for (const auto& name : given) {
        const std::size_t c = table.column_index(name);
        if (c == target_idx) {
            throw InvalidInput("target column '" + target + "' also appears in the given set");
        }
        given_idx.push_back(c);
    }

    MomentRegressionModel model;
    model.degree = degree;
    model.given = given;
    model.pairwise_products = pairwise_products;
    model.lambda = lambda;
    model.feature_names = feature_name_list(given, degree, pairwise_products);
    const std::size_t n_features = model.feature_names.size();
    const std::size_t n = table.n_rows();
    if (n <= n_features) {
        throw InvalidInput("need more than " + std::to_string(n_features) + " rows to fit " +
                           std::to_string(n_features) + " features, got " + std::to_string(n));
    }

    Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_features));
    {
        std::vector<double> scratch;
        std::vector<double> feats;
        std::vector<double> row(given.size());
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < given_idx.size(); ++c) {
                row[c] = table.data[given_idx[c]][r];
            }
            raw_features(row, degree, pairwise_products, scratch, feats);
            for (std::size_t f = 0; f < n_features; ++f) {
                raw(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = feats[f];
            }
        }
    }

    // Zero-variance features cannot inform the fit and break the normal
    // equations; drop them (the bias stays).
    model.feature_kept.assign(n_features, 1);
    for (std::size_t f = 1; f < n_features; ++f) {
        const auto col = raw.col(static_cast<Eigen::Index>(f));
        const double mean = col.mean();
        const double var = (col.array() - mean).square().mean();
        if (var <= kVarianceEps) {
            model.feature_kept[f] = 0;
            model.dropped.push_back(model.feature_names[f]);
        }
    }
    std::vector<std::size_t> kept;
    for (std::size_t f = 0; f < n_features; ++f) {
        if (model.feature_kept[f]) {
            kept.push_back(f);
        }
    }
    const std::size_t n_kept = kept.size();

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_kept));
    for (std::size_t f = 0; f < n_kept; ++f) {
        x.col(static_cast<Eigen::Index>(f)) = raw.col(static_cast<Eigen::Index>(kept[f]));
    }
    Eigen::MatrixXd targets(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(degree));
    {
        HcrBasis basis(degree);
        std::vector<double> values(static_cast<std::size_t>(degree) + 1);
        for (std::size_t r = 0; r < n; ++r) {
            basis.eval_all(table.data[target_idx][r], values);
            for (int i = 1; i <= degree; ++i) {
                targets(static_cast<Eigen::Index>(r), i - 1) =
                    values[static_cast<std::size_t>(i)];
            }
        }
    }

    Eigen::MatrixXd normal = x.transpose() * x;
    for (std::size_t f = 1; f < n_kept; ++f) {  // the bias is not penalized
        normal(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(f)) +=
            static_cast<double>(n) * lambda;
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(normal);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("moment regression normal equations could not be factorized");
    }
    Eigen::MatrixXd w = solver.solve(x.transpose() * targets);
    if (!w.allFinite()) {
        throw NumericalFailure("moment regression produced non-finite weights");
    }

    model.weights.assign(static_cast<std::size_t>(degree), std::vector<double>(n_kept));
    for (int i = 0; i < degree; ++i) {
        for (std::size_t f = 0; f < n_kept; ++f) {
            model.weights[static_cast<std::size_t>(i)][f] =
                w(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i));
        }
    }
    return model;
}

std::vector<double> predict_moments(const MomentRegressionModel& model,
                                    std::span<const double> given_row) {
    if (given_row.size() != model.given.size()) {
        throw InvalidInput("expected " + std::to_string(model.given.size()) +
                           " conditioning values, got " + std::to_string(given_row.size()));
    }
    for (double v : given_row) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidInput("conditioning value " + std::to_string(v) + " outside [0,1]");
        }
    }
    std::vector<double> scratch;
    std::vector<double> feats;
    raw_features(given_row, model.degree, model.pairwise_products, scratch, feats);
    if (feats.size() != model.feature_kept.size()) {
        throw InvalidInput("feature count mismatch against the fitted model");
    }
    std::vector<double> moments(static_cast<std::size_t>(model.degree), 0.0);
    for (std::size_t i = 0; i < moments.size(); ++i) {
        const auto& w = model.weights[i];
        double acc = 0.0;
        std::size_t k = 0;
        for (std::size_t f = 0; f < feats.size(); ++f) {
            if (model.feature_kept[f]) {
                acc += w[k++] * feats[f];
            }
        }
        moments[i] = acc;
    }
    return moments;
}

CalibratedDensity1D predict_conditional(const MomentRegressionModel& model,
                                        std::span<const double> given_row, int grid_size,
                                        double floor) {
    const std::vector<double> moments = predict_moments(model, given_row);
    std::vector<double> coeffs1d(static_cast<std::size_t>(model.degree) + 1, 0.0);
    coeffs1d[0] = 1.0;
    for (int i = 1; i <= model.degree; ++i) {
        coeffs1d[static_cast<std::size_t>(i)] = moments[static_cast<std::size_t>(i - 1)];
    }
    return calibrate_series(coeffs1d, grid_size, floor);
}

}  // namespace infoextract::hcr
