#include "infoextract/datasets.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "infoextract/errors.hpp"
#include "infoextract/quantile.hpp"
#include "infoextract/rng.hpp"

namespace infoextract::datasets {

namespace {

std::vector<std::string> column_names(int dims) {
    if (dims == 2) {
        return {"x", "y"};
    }
    if (dims == 3) {
        return {"x", "y", "z"};
    }
    std::vector<std::string> names;
    for (int c = 1; c <= dims; ++c) {
        names.push_back("x" + std::to_string(c));
    }
    return names;
}

std::vector<double> draw_normals(SplitMix64& rng, std::size_t count) {
    std::vector<double> out(count);
    for (double& v : out) {
        v = rng.next_normal();
    }
    return out;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw InvalidInput(message);
    }
}

SampleTable generate_raw(const GeneratorSpec& spec) {
    require(spec.n >= 1, "parameter n must be at least 1");
    SplitMix64 rng(spec.seed);
    SampleTable table;
    switch (spec.kind) {
        case GeneratorKind::kGaussianCopula: {
            require(spec.dims >= 2, "parameter dims must be at least 2 for gaussian-copula");
            require(std::abs(spec.rho) < 1.0, "parameter rho must satisfy |rho| < 1");
            table.columns = column_names(spec.dims);
            if (spec.dims == 2) {
                const std::vector<double> z1 = draw_normals(rng, spec.n);
                const std::vector<double> z2 = draw_normals(rng, spec.n);
                std::vector<double> y(spec.n);
                const double s = std::sqrt(1.0 - spec.rho * spec.rho);
                for (std::size_t r = 0; r < spec.n; ++r) {
                    y[r] = spec.rho * z1[r] + s * z2[r];
                }
                table.data = {z1, std::move(y)};
            } else {
                // Equicorrelated factor construction; needs rho >= 0.
                require(spec.rho >= 0.0,
                        "parameter rho must be non-negative for dims > 2 (factor construction)");
                const std::vector<double> factor = draw_normals(rng, spec.n);
                const double a = std::sqrt(spec.rho);
                const double b = std::sqrt(1.0 - spec.rho);
                for (int c = 0; c < spec.dims; ++c) {
                    std::vector<double> col = draw_normals(rng, spec.n);
                    for (std::size_t r = 0; r < spec.n; ++r) {
                        col[r] = a * factor[r] + b * col[r];
                    }
                    table.data.push_back(std::move(col));
                }
            }
            break;
        }
        case GeneratorKind::kMarkovChain: {
            require(spec.noise >= 0.0, "parameter noise must be non-negative");
            const std::vector<double> x = draw_normals(rng, spec.n);
            const std::vector<double> e1 = draw_normals(rng, spec.n);
            const std::vector<double> e2 = draw_normals(rng, spec.n);
            std::vector<double> z(spec.n);
            std::vector<double> y(spec.n);
            for (std::size_t r = 0; r < spec.n; ++r) {
                z[r] = spec.alpha * x[r] + spec.noise * e1[r];
                y[r] = spec.beta * z[r] + spec.noise * e2[r];
            }
            table.columns = column_names(3);
            table.data = {x, std::move(y), std::move(z)};
            break;
        }
        case GeneratorKind::kLaggedPair: {
            require(spec.delay >= 0, "parameter delay must be non-negative");
            require(std::abs(spec.coupling) <= 1.0, "parameter coupling must satisfy |c| <= 1");
            const std::size_t d = static_cast<std::size_t>(spec.delay);
            const std::vector<double> ypre = draw_normals(rng, spec.n + d);
            const std::vector<double> eps = draw_normals(rng, spec.n);
            const double s = std::sqrt(1.0 - spec.coupling * spec.coupling);
            std::vector<double> x(spec.n);
            std::vector<double> y(spec.n);
            for (std::size_t t = 0; t < spec.n; ++t) {
                x[t] = spec.coupling * ypre[t] + s * eps[t];
                y[t] = ypre[t + d];
            }
            table.columns = column_names(2);
            table.data = {std::move(x), std::move(y)};
            break;
        }
        case GeneratorKind::kLaggedChain: {
            require(spec.d1 >= 0, "parameter d1 must be non-negative");
            require(spec.d2 >= 0, "parameter d2 must be non-negative");
            require(std::abs(spec.c1) <= 1.0, "parameter c1 must satisfy |c| <= 1");
            require(std::abs(spec.c2) <= 1.0, "parameter c2 must satisfy |c| <= 1");
            const std::size_t d1 = static_cast<std::size_t>(spec.d1);
            const std::size_t d2 = static_cast<std::size_t>(spec.d2);
            const std::vector<double> xpre = draw_normals(rng, spec.n + d1);
            const std::vector<double> ny = draw_normals(rng, spec.n);
            const double s1 = std::sqrt(1.0 - spec.c1 * spec.c1);
            std::vector<double> y(spec.n);
            for (std::size_t t = 0; t < spec.n; ++t) {
                y[t] = spec.c1 * xpre[t] + s1 * ny[t];
            }
            const std::vector<double> pad = draw_normals(rng, d2);
            const std::vector<double> nz = draw_normals(rng, spec.n);
            const double s2 = std::sqrt(1.0 - spec.c2 * spec.c2);
            std::vector<double> z(spec.n);
            for (std::size_t t = 0; t < spec.n; ++t) {
                const double lagged = t < d2 ? pad[t] : y[t - d2];
                z[t] = spec.c2 * lagged + s2 * nz[t];
            }
            std::vector<double> x(xpre.begin() + static_cast<std::ptrdiff_t>(d1), xpre.end());
            table.columns = column_names(3);
            table.data = {std::move(x), std::move(y), std::move(z)};
            break;
        }
        case GeneratorKind::kIndependent: {
            require(spec.dims >= 1, "parameter dims must be at least 1");
            table.columns = column_names(spec.dims);
            for (int c = 0; c < spec.dims; ++c) {
                table.data.push_back(draw_normals(rng, spec.n));
            }
            break;
        }
    }
    return table;
}

}  // namespace

GeneratorKind parse_generator_kind(const std::string& name) {
    if (name == "gaussian-copula") {
        return GeneratorKind::kGaussianCopula;
    }
    if (name == "markov-chain") {
        return GeneratorKind::kMarkovChain;
    }
    if (name == "lagged-pair") {
        return GeneratorKind::kLaggedPair;
    }
    if (name == "lagged-chain") {
        return GeneratorKind::kLaggedChain;
    }
    if (name == "independent") {
        return GeneratorKind::kIndependent;
    }
    throw InvalidInput("unknown generator kind '" + name +
                       "' (expected gaussian-copula, markov-chain, lagged-pair, lagged-chain, or "
                       "independent)");
}

std::string generator_kind_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::kGaussianCopula:
            return "gaussian-copula";
        case GeneratorKind::kMarkovChain:
            return "markov-chain";
        case GeneratorKind::kLaggedPair:
            return "lagged-pair";
        case GeneratorKind::kLaggedChain:
            return "lagged-chain";
        case GeneratorKind::kIndependent:
            return "independent";
    }
    throw InvalidInput("unknown generator kind");
}

SampleTable generate(const GeneratorSpec& spec) {
    SampleTable table = generate_raw(spec);
    if (spec.normalized) {
        table = normalization::normalize_table(table).first;
    }
    return table;
}

SampleTable load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    if (text.rfind("\xEF\xBB\xBF", 0) == 0) {
        text.erase(0, 3);
    }

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
        if (end == text.size()) {
            break;
        }
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    if (lines.empty()) {
        throw InvalidInput("'" + path + "' is empty; expected a header row");
    }

    const auto split = [&](const std::string& line) {
        std::vector<std::string> cells;
        std::size_t from = 0;
        while (true) {
            const std::size_t at = line.find(options.delimiter, from);
            if (at == std::string::npos) {
                cells.push_back(line.substr(from));
                break;
            }
            cells.push_back(line.substr(from, at - from));
            from = at + 1;
        }
        return cells;
    };
    const auto trim = [](const std::string& s) {
        std::size_t b = 0;
        std::size_t e = s.size();
        while (b < e && (s[b] == ' ' || s[b] == '\t')) {
            ++b;
        }
        while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) {
            --e;
        }
        return s.substr(b, e - b);
    };

    SampleTable table;
    for (const auto& cell : split(lines.front())) {
        table.columns.push_back(trim(cell));
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        for (std::size_t j = i + 1; j < table.columns.size(); ++j) {
            if (table.columns[i] == table.columns[j]) {
                throw InvalidInput("duplicate column name '" + table.columns[i] + "' in '" + path +
                                   "'");
            }
        }
    }
    table.data.assign(table.n_cols(), {});

    std::vector<std::size_t> missing_rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::vector<std::string> cells = split(lines[li]);
        if (cells.size() != table.n_cols()) {
            throw FormatError("'" + path + "' line " + std::to_string(li + 1) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(table.n_cols()));
        }
        bool missing = false;
        for (const auto& cell : cells) {
            if (trim(cell).empty()) {
                missing = true;
                break;
            }
        }
        if (missing) {
            missing_rows.push_back(li + 1);
            continue;
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = trim(cells[c]);
            double value = 0.0;
            const auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw ParseError("'" + path + "' line " + std::to_string(li + 1) + " column " +
                                     std::to_string(c + 1) + ": cannot parse '" + cell +
                                     "' as a real number",
                                 li + 1, c + 1);
            }
            if (!std::isfinite(value)) {
                throw ParseError("'" + path + "' line " + std::to_string(li + 1) + " column " +
                                     std::to_string(c + 1) + ": value '" + cell +
                                     "' is not finite",
                                 li + 1, c + 1);
            }
            table.data[c].push_back(value);
        }
    }
    if (!missing_rows.empty() && !options.drop_missing) {
        std::string rows;
        for (std::size_t i = 0; i < missing_rows.size() && i < 8; ++i) {
            rows += (i ? ", " : "") + std::to_string(missing_rows[i]);
        }
        if (missing_rows.size() > 8) {
            rows += ", ...";
        }
        throw InvalidInput("'" + path + "' has rows with missing cells (lines " + rows +
                           "); pass --drop-missing to skip them");
    }
    if (table.n_rows() == 0) {
        throw InvalidInput("'" + path + "' has a header but no data rows");
    }
    table.validate();
    return table;
}

void write_csv(const SampleTable& table, const std::string& path, bool allow_overwrite) {
    table.validate();
    for (const auto& name : table.columns) {
        if (name.find_first_of(",\"\r\n") != std::string::npos) {
            throw InvalidInput("column name '" + name + "' contains CSV metacharacters");
        }
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        for (std::size_t j = i + 1; j < table.columns.size(); ++j) {
            if (table.columns[i] == table.columns[j]) {
                throw InvalidInput("duplicate column name '" + table.columns[i] + "'");
            }
        }
    }
    if (!allow_overwrite && std::filesystem::exists(path)) {
        throw RefusedOverwrite("'" + path + "' already exists; pass --force to overwrite");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidInput("cannot open '" + path + "' for writing");
    }
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
        out << (c ? "," : "") << table.columns[c];
    }
    out << '\n';
    char cell[64];
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (std::size_t c = 0; c < table.n_cols(); ++c) {
            std::snprintf(cell, sizeof(cell), "%.17g", table.data[c][r]);
            out << (c ? "," : "") << cell;
        }
        out << '\n';
    }
    out.flush();
    if (!out) {
        throw InvalidInput("failed while writing '" + path + "'");
    }
}

}  // namespace infoextract::datasets
