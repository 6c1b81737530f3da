#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace infoextract {

/// Column-major numeric table with named columns.
struct SampleTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;

    std::size_t n_cols() const { return columns.size(); }
    std::size_t n_rows() const { return data.empty() ? 0 : data.front().size(); }

    /// Index of a named column; throws InvalidInput if absent.
    std::size_t column_index(const std::string& name) const;

    const std::vector<double>& column(const std::string& name) const;
    std::vector<double>& column(const std::string& name);

    /// Checks structural consistency: names match data, equal column
    /// lengths, all values finite. Throws InvalidInput on violation.
    void validate() const;

    /// Additionally requires every value to lie in [0,1].
    void validate_unit_range() const;
};

}  // namespace infoextract
