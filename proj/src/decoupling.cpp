#include "infoextract/decoupling.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "infoextract/errors.hpp"
#include "infoextract/infoflow.hpp"

namespace infoextract::decoupling {

namespace {

std::vector<std::string> resolve_order(const SampleTable& table,
                                       const std::vector<std::string>& order) {
    if (order.empty()) {
        return table.columns;
    }
    if (order.size() != table.n_cols()) {
        throw InvalidInput("order lists " + std::to_string(order.size()) + " columns, table has " +
                           std::to_string(table.n_cols()));
    }
    for (const auto& name : order) {
        table.column_index(name);
        if (std::count(order.begin(), order.end(), name) != 1) {
            throw InvalidInput("order lists column '" + name + "' more than once");
        }
    }
    return order;
}

std::vector<std::string> others(const SampleTable& table, const std::string& target) {
    std::vector<std::string> given;
    for (const auto& name : table.columns) {
        if (name != target) {
            given.push_back(name);
        }
    }
    return given;
}

}  // namespace

double DependenceReport::max_spearman_abs() const {
    double best = 0.0;
    for (const auto& row : spearman_abs) {
        for (double v : row) {
            best = std::max(best, v);
        }
    }
    return best;
}

double DependenceReport::max_mi() const {
    double best = 0.0;
    for (const auto& row : mi) {
        for (double v : row) {
            best = std::max(best, v);
        }
    }
    return best;
}

DecoupledDataset decouple(const SampleTable& table, const std::vector<std::string>& order,
                          extraction::ConditionalMethod method, int degree, int sweeps,
                          ConditioningMode mode, int grid_size, double floor) {
    table.validate_unit_range();
    if (table.n_cols() < 2) {
        throw InvalidInput("decoupling needs at least 2 columns, got " +
                           std::to_string(table.n_cols()));
    }
    if (sweeps < 1) {
        throw InvalidInput("sweeps must be at least 1, got " + std::to_string(sweeps));
    }

    DecoupledDataset out;
    out.order_used = resolve_order(table, order);
    out.sweeps = sweeps;
    out.mode = mode;
    out.result = table;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (const auto& target : out.order_used) {
            try {
                SampleTable fit_view = out.result;
                if (mode == ConditioningMode::kOriginal) {
                    // Experimental: conditioning columns stay in their
                    // untouched input state for both fit and application.
                    for (std::size_t c = 0; c < table.n_cols(); ++c) {
                        if (table.columns[c] != target) {
                            fit_view.data[c] = table.data[c];
                        }
                    }
                }
                extraction::ExtractionLayer layer = extraction::fit_extraction(
                    fit_view, target, others(table, target), method, degree, grid_size, floor);
                const SampleTable applied = extraction::apply_extraction(layer, fit_view);
                out.result.column(target) = applied.column(target);
                out.layers.push_back(std::move(layer));
            } catch (const InvalidInput& e) {
                throw InvalidInput("sweep " + std::to_string(sweep + 1) + ", column '" + target +
                                   "': " + e.what());
            } catch (const NumericalFailure& e) {
                throw NumericalFailure("sweep " + std::to_string(sweep + 1) + ", column '" +
                                       target + "': " + e.what());
            } catch (const CapacityExceeded& e) {
                throw CapacityExceeded("sweep " + std::to_string(sweep + 1) + ", column '" +
                                       target + "': " + e.what());
            }
        }
        out.sweep_history.push_back(dependence_report(out.result));
    }
    return out;
}

SampleTable reconstruct(const DecoupledDataset& decoupled) {
    if (decoupled.mode == ConditioningMode::kOriginal) {
        throw Unsupported(
            "stacks built with original-state conditioning are not invertible: inversion needs "
            "conditioning columns in their fit-time state, which reconstruction cannot restore");
    }
    SampleTable current = decoupled.result;
    for (auto it = decoupled.layers.rbegin(); it != decoupled.layers.rend(); ++it) {
        current = extraction::invert_extraction(*it, current);
    }
    return current;
}

SampleTable symmetric_extract(const SampleTable& table, extraction::ConditionalMethod method,
                              int degree, int grid_size, double floor) {
    table.validate_unit_range();
    if (table.n_cols() < 2) {
        throw InvalidInput("symmetric extraction needs at least 2 columns, got " +
                           std::to_string(table.n_cols()));
    }
    SampleTable out = table;
    for (const auto& target : table.columns) {
        const extraction::ExtractionLayer layer = extraction::fit_extraction(
            table, target, others(table, target), method, degree, grid_size, floor);
        const SampleTable applied = extraction::apply_extraction(layer, table);
        out.column(target) = applied.column(target);
    }
    return out;
}

DependenceReport dependence_report(const SampleTable& table, int bins) {
    table.validate_unit_range();
    if (table.n_cols() < 2) {
        throw InvalidInput("dependence report needs at least 2 columns, got " +
                           std::to_string(table.n_cols()));
    }
    if (bins < 4) {
        throw InvalidInput("bins must be at least 4, got " + std::to_string(bins));
    }
    const std::size_t d = table.n_cols();
    DependenceReport report;
    report.columns = table.columns;
    report.spearman_abs.assign(d, std::vector<double>(d, 0.0));
    report.mi.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double s = std::abs(infoflow::spearman(table.data[i], table.data[j]));
            const double m = infoflow::mutual_information_binned(table.data[i], table.data[j],
                                                                 bins)
                                 .value;
            report.spearman_abs[i][j] = report.spearman_abs[j][i] = s;
            report.mi[i][j] = report.mi[j][i] = m;
        }
    }
    return report;
}

}  // namespace infoextract::decoupling
