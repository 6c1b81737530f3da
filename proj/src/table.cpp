#include "infoextract/table.hpp"

#include <cmath>

#include "infoextract/errors.hpp"

namespace infoextract {

std::size_t SampleTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw InvalidInput("unknown column '" + name + "'");
}

const std::vector<double>& SampleTable::column(const std::string& name) const {
    return data[column_index(name)];
}

std::vector<double>& SampleTable::column(const std::string& name) {
    return data[column_index(name)];
}

void SampleTable::validate() const {
    if (columns.size() != data.size()) {
        throw InvalidInput("table has " + std::to_string(columns.size()) + " column names but " +
                           std::to_string(data.size()) + " data columns");
    }
    if (columns.empty()) {
        throw InvalidInput("table has no columns");
    }
    const std::size_t rows = data.front().size();
    for (std::size_t c = 0; c < data.size(); ++c) {
        if (columns[c].empty()) {
            throw InvalidInput("column " + std::to_string(c) + " has an empty name");
        }
        if (data[c].size() != rows) {
            throw InvalidInput("column '" + columns[c] + "' has " + std::to_string(data[c].size()) +
                               " rows, expected " + std::to_string(rows));
        }
        for (std::size_t r = 0; r < data[c].size(); ++r) {
            if (!std::isfinite(data[c][r])) {
                throw InvalidInput("column '" + columns[c] + "' row " + std::to_string(r) +
                                   " is not finite");
            }
        }
    }
}

void SampleTable::validate_unit_range() const {
    validate();
    for (std::size_t c = 0; c < data.size(); ++c) {
        for (double v : data[c]) {
            if (v < 0.0 || v > 1.0) {
                throw InvalidInput("column '" + columns[c] + "' has value " + std::to_string(v) +
                                   " outside [0,1]; normalize the table first");
            }
        }
    }
}

}  // namespace infoextract
