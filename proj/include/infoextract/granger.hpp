#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoextract/decoupling.hpp"
#include "infoextract/hcr.hpp"
#include "infoextract/table.hpp"

namespace infoextract::granger {

inline constexpr int kDefaultLagOrder = 2;
inline constexpr int kDefaultMaxDelay = 16;
inline constexpr std::size_t kMinDelayOverlap = 100;

/// How the past is removed from a series: distribution mode keeps the
/// conditional CDF value of each step (the probabilistic residue);
/// linear mode keeps the classical OLS residual, quantile-normalized.
enum class ResidueMode { kDistribution, kLinear };

/// Residues R_t in [0,1] for t = p..T-1 of one series.
struct ResidueSeries {
    std::vector<double> values;
    int lag_order = 0;
    std::string source;
    ResidueMode mode = ResidueMode::kDistribution;
    std::optional<hcr::MomentRegressionModel> lag_model;  ///< distribution mode
    std::vector<double> linear_weights;                   ///< linear mode: bias then lag 1..p
};

ResidueSeries fit_residues(std::span<const double> x, int lag_order,
                           int degree = hcr::kDefaultDegree,
                           ResidueMode mode = ResidueMode::kDistribution,
                           const std::string& source = "x");

/// Dependence of residues on a candidate driver at each delay.
struct DelayProfile {
    std::vector<int> delays;  ///< 0..D
    std::vector<double> correlation;
    std::vector<double> mi;  ///< nats, binned
    int argmax_delay = 0;    ///< smallest delay maximizing |correlation|
};

/// Pearson correlation and binned MI of (R_t, y_{t-dt}) for dt = 0..max_delay.
/// y must cover the residues' full original time axis (length T).
DelayProfile delay_profile(const ResidueSeries& residues, std::span<const double> y,
                           int max_delay);

/// Bivariate coefficient matrices a_jk(dt) of the pairs (R_t, y_{t-dt});
/// residue on the j axis, driver on the k axis.
struct DelayCoefficientField {
    int degree = 0;
    std::vector<int> delays;
    std::vector<std::vector<double>> coeffs;  ///< per delay, (m+1)^2 lexicographic

    double a(std::size_t delay_index, int j, int k) const {
        return coeffs[delay_index][static_cast<std::size_t>(j) *
                                       (static_cast<std::size_t>(degree) + 1) +
                                   static_cast<std::size_t>(k)];
    }
};

DelayCoefficientField delay_coefficients(const ResidueSeries& residues, std::span<const double> y,
                                         int max_delay, int degree = hcr::kDefaultDegree);

/// Principal directions of the (j,k >= 1) coefficient block across delays.
struct DelayFeatureDecomposition {
    int rank = 0;
    std::vector<std::vector<double>> directions;  ///< rank x m^2, orthonormal
    std::vector<std::vector<double>> scores;      ///< rank x #delays
    std::vector<double> eigenvalues;              ///< all m^2, descending
    double variance_fraction = 1.0;               ///< top-rank share; 1 for a zero field
};

/// Uncentered PCA over the per-delay coefficient vectors. Exactly one of
/// rank (> 0) or variance_target (in (0,1]) selects the kept rank; with
/// neither, the full rank min(#delays, m^2) is kept.
DelayFeatureDecomposition pca_reduce(const DelayCoefficientField& field, int rank = 0,
                                     double variance_target = 0.0);

struct SpectrumPoint {
    double frequency = 0.0;  ///< cycles per time step
    double magnitude = 0.0;
};

/// DFT magnitudes of the mean-removed correlation-vs-delay sequence.
std::vector<SpectrumPoint> delay_spectrum(const DelayProfile& profile);

/// One ordered source -> target analysis.
struct PairCausalityReport {
    std::string source;
    std::string target;
    DelayProfile profile;
    DelayCoefficientField field;
    DelayFeatureDecomposition decomposition;
    double peak_abs_correlation = 0.0;
    int peak_delay = 0;
};

struct MultivariateGrangerReport {
    bool decoupled = false;
    SampleTable panel;  ///< the analyzed panel (decoupled when flagged)
    std::vector<PairCausalityReport> pairs;  ///< ranked by peak |correlation|
};

/// Residues, delay profiles, coefficient fields, and PCA for every ordered
/// series pair; optionally decouples the panel contemporaneously first
/// (time steps treated as rows).
MultivariateGrangerReport multivariate_granger(const SampleTable& panel, int lag_order,
                                               int max_delay, int degree = hcr::kDefaultDegree,
                                               bool decouple_first = true,
                                               ResidueMode mode = ResidueMode::kDistribution,
                                               int sweeps = decoupling::kDefaultSweeps,
                                               const std::vector<std::string>& order = {},
                                               int pca_rank = 3);

}  // namespace infoextract::granger
