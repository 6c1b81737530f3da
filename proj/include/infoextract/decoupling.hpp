#pragma once

#include <string>
#include <vector>

#include "infoextract/extraction.hpp"
#include "infoextract/table.hpp"

namespace infoextract::decoupling {

inline constexpr int kDefaultSweeps = 2;

/// Which state of the other columns a sweep conditions on. kCurrent uses
/// the partially transformed table (the default); kOriginal conditions
/// every fit on the untouched input and is experimental: the resulting
/// stack cannot be unwound by reconstruct.
enum class ConditioningMode { kCurrent, kOriginal };

/// Pairwise dependence snapshot: |Spearman| and binned MI (nats) over all
/// column pairs; symmetric matrices with zero diagonal.
struct DependenceReport {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> spearman_abs;
    std::vector<std::vector<double>> mi;

    double max_spearman_abs() const;
    double max_mi() const;
};

/// Result of chained extractions over all columns: the decoupled table,
/// the replayable layer stack, and one dependence snapshot per sweep.
struct DecoupledDataset {
    std::vector<extraction::ExtractionLayer> layers;  ///< application order
    SampleTable result;
    std::vector<std::string> order_used;
    int sweeps = 0;
    ConditioningMode mode = ConditioningMode::kCurrent;
    std::vector<DependenceReport> sweep_history;
};

/// For each sweep, extracts each column in order conditioned on all other
/// columns. Empty order means the table's column order.
DecoupledDataset decouple(const SampleTable& table, const std::vector<std::string>& order = {},
                          extraction::ConditionalMethod method =
                              extraction::ConditionalMethod::kAuto,
                          int degree = hcr::kDefaultDegree, int sweeps = kDefaultSweeps,
                          ConditioningMode mode = ConditioningMode::kCurrent,
                          int grid_size = hcr::kDefaultGrid, double floor = hcr::kDefaultFloor);

/// Unwinds the layer stack in reverse, recovering the normalized input
/// within the accumulated grid bound. Unsupported for kOriginal stacks.
SampleTable reconstruct(const DecoupledDataset& decoupled);

/// Single-pass symmetrized variant: every column extracted against all
/// original others, models fitted on the untouched table. Order-invariant
/// and not invertible.
SampleTable symmetric_extract(const SampleTable& table,
                              extraction::ConditionalMethod method =
                                  extraction::ConditionalMethod::kAuto,
                              int degree = hcr::kDefaultDegree, int grid_size = hcr::kDefaultGrid,
                              double floor = hcr::kDefaultFloor);

/// Pairwise |Spearman| and binned-MI matrices for a normalized table.
DependenceReport dependence_report(const SampleTable& table, int bins = 16);

}  // namespace infoextract::decoupling
