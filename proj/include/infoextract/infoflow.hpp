#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoextract/extraction.hpp"
#include "infoextract/table.hpp"

namespace infoextract::infoflow {

inline constexpr int kDefaultBins = 16;
inline constexpr int kDefaultReferenceBins = 8;

/// One mutual-information estimate in nats, clamped at 0 from below.
struct MiEstimate {
    double value = 0.0;
    std::string method;  ///< "binned" | "hcr-plugin" | "direct" | "conditional-reference"
    int parameter = 0;   ///< bins or degree
    std::size_t n = 0;
    std::optional<double> quadratic;  ///< hcr companion value 1/2 sum a_jk^2
    std::optional<double> raw;        ///< unconditioned I(X;Y) companion
};

/// Plug-in estimate from a bins x bins histogram with Miller-Madow bias
/// correction, natural log.
MiEstimate mutual_information_binned(std::span<const double> u, std::span<const double> v,
                                     int bins = kDefaultBins);

/// Bivariate polynomial-density estimate: quadratic approximation
/// 1/2 sum_{j,k>=1} a_jk^2 plus a calibrated 64x64 grid plug-in, which is
/// the primary value.
MiEstimate mutual_information_hcr(std::span<const double> u, std::span<const double> v,
                                  int degree = hcr::kDefaultDegree);

/// Direct mutual information: extracts x and y each conditioned on z only,
/// then reports the binned MI of the two extracted columns; .raw carries
/// the unconditioned binned I(x;y) for contrast.
MiEstimate direct_mutual_information(const SampleTable& table, const std::string& x,
                                     const std::string& y, const std::vector<std::string>& z,
                                     extraction::ConditionalMethod method =
                                         extraction::ConditionalMethod::kAuto,
                                     int degree = hcr::kDefaultDegree, int bins = kDefaultBins);

/// Reference conditional MI as the difference I(X;Y,Z) - I(X;Z) over
/// composite-class histograms; supports at most two conditioning columns.
MiEstimate conditional_mi_reference(const SampleTable& table, const std::string& x,
                                    const std::string& y, const std::vector<std::string>& z,
                                    int bins = kDefaultReferenceBins);

/// Pearson correlation; 0 when either column is constant.
double pearson(std::span<const double> u, std::span<const double> v);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> u, std::span<const double> v);

}  // namespace infoextract::infoflow
