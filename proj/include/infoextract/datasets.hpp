#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "infoextract/table.hpp"

namespace infoextract::datasets {

enum class GeneratorKind {
    kGaussianCopula,
    kMarkovChain,
    kLaggedPair,
    kLaggedChain,
    kIndependent,
};

GeneratorKind parse_generator_kind(const std::string& name);
std::string generator_kind_name(GeneratorKind kind);

/// Synthetic-dataset description; identical spec + seed gives a
/// bit-identical table. Generators emit raw (unnormalized) columns unless
/// normalized is set.
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::kGaussianCopula;
    std::uint64_t seed = 1;
    std::size_t n = 10000;  ///< rows, or time steps for the lagged kinds

    int dims = 2;      ///< gaussian-copula, independent
    double rho = 0.5;  ///< copula pairwise latent correlation

    double alpha = 1.0;   ///< markov-chain: z = alpha x + noise
    double beta = 1.0;    ///< markov-chain: y = beta z + noise
    double noise = 0.75;  ///< markov-chain noise scale

    int delay = 3;          ///< lagged-pair: x_t = coupling y_{t-delay} + noise
    double coupling = 0.8;  ///< lagged-pair coupling

    int d1 = 3;       ///< lagged-chain: y lags x by d1
    int d2 = 0;       ///< lagged-chain: z lags y by d2 (0 = contemporaneous)
    double c1 = 0.8;  ///< lagged-chain x -> y coupling
    double c2 = 0.6;  ///< lagged-chain y -> z coupling

    bool normalized = false;
};

SampleTable generate(const GeneratorSpec& spec);

struct CsvOptions {
    char delimiter = ',';
    bool drop_missing = false;  ///< drop rows with empty cells instead of rejecting
};

/// Reads a header-first CSV into a validated table. Unparseable or
/// non-finite cells raise ParseError with their 1-based line and column;
/// rows with the wrong cell count raise FormatError.
SampleTable load_csv(const std::string& path, const CsvOptions& options = {});

/// Writes header plus rows with 17-significant-digit values, so a
/// load_csv of the output reproduces the table exactly.
void write_csv(const SampleTable& table, const std::string& path, bool allow_overwrite = false);

}  // namespace infoextract::datasets
