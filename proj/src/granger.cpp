#include "infoextract/granger.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fftw3.h>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "infoextract/errors.hpp"
#include "infoextract/infoflow.hpp"
#include "infoextract/parallel.hpp"
#include "infoextract/quantile.hpp"

namespace infoextract::granger {

namespace {

void check_series(std::span<const double> x, const char* name) {
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidInput(std::string(name) + " series has value outside [0,1]; " +
                               "normalize it first");
        }
    }
}

std::string lag_name(const std::string& source, int j) {
    return source + "[t-" + std::to_string(j) + "]";
}

/// Aligned views (R_t, y_{t-dt}) for t = max(p, dt)..T-1.
struct AlignedViews {
    std::span<const double> r;
    std::span<const double> y;
};

AlignedViews align(const ResidueSeries& residues, std::span<const double> y, int dt) {
    const int p = residues.lag_order;
    const std::size_t t_total = residues.values.size() + static_cast<std::size_t>(p);
    const std::size_t lo = static_cast<std::size_t>(std::max(p, dt));
    const std::size_t count = t_total - lo;
    return AlignedViews{
        std::span<const double>(residues.values.data() + (lo - static_cast<std::size_t>(p)),
                                count),
        std::span<const double>(y.data() + (lo - static_cast<std::size_t>(dt)), count)};
}

void check_delay_inputs(const ResidueSeries& residues, std::span<const double> y, int max_delay) {
    if (residues.values.empty()) {
        throw InvalidInput("residue series is empty");
    }
    if (max_delay < 0) {
        throw InvalidInput("max_delay must be non-negative, got " + std::to_string(max_delay));
    }
    const std::size_t t_total = residues.values.size() + static_cast<std::size_t>(residues.lag_order);
    if (y.size() != t_total) {
        throw InvalidInput("driver series has " + std::to_string(y.size()) +
                           " steps, residues were fitted on " + std::to_string(t_total));
    }
    const std::size_t worst = static_cast<std::size_t>(std::max(residues.lag_order, max_delay));
    if (t_total < worst + kMinDelayOverlap) {
        throw InvalidInput("series too short: delay " + std::to_string(max_delay) + " leaves " +
                           std::to_string(t_total > worst ? t_total - worst : 0) +
                           " overlapping samples, need at least " +
                           std::to_string(kMinDelayOverlap));
    }
    check_series(y, "driver");
}

std::mutex g_fftw_mutex;

}  // namespace

ResidueSeries fit_residues(std::span<const double> x, int lag_order, int degree, ResidueMode mode,
                           const std::string& source) {
    if (lag_order < 1) {
        throw InvalidInput("lag order must be at least 1, got " + std::to_string(lag_order));
    }
    check_series(x, "input");
    const std::size_t p = static_cast<std::size_t>(lag_order);
    const std::size_t features = mode == ResidueMode::kDistribution
                                     ? 1 + p * static_cast<std::size_t>(degree)
                                     : p + 1;
    if (x.size() <= p + features) {
        throw InvalidInput("series of length " + std::to_string(x.size()) +
                           " is too short for lag order " + std::to_string(lag_order) + " (need > " +
                           std::to_string(p + features) + " steps)");
    }
    const std::size_t n = x.size() - p;

    ResidueSeries out;
    out.lag_order = lag_order;
    out.source = source;
    out.mode = mode;
    out.values.resize(n);

    if (mode == ResidueMode::kDistribution) {
        SampleTable lags;
        lags.columns.push_back(source);
        lags.data.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(p), x.end());
        std::vector<std::string> given;
        for (std::size_t j = 1; j <= p; ++j) {
            given.push_back(lag_name(source, static_cast<int>(j)));
            lags.columns.push_back(given.back());
            lags.data.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(p - j),
                                   x.end() - static_cast<std::ptrdiff_t>(j));
        }
        out.lag_model = hcr::fit_moment_regression(lags, source, given, degree);
        parallel_chunks(n, 1024, [&](std::size_t, std::size_t begin, std::size_t end) {
            std::vector<double> given_row(p);
            for (std::size_t r = begin; r < end; ++r) {
                for (std::size_t j = 1; j <= p; ++j) {
                    given_row[j - 1] = x[r + p - j];
                }
                out.values[r] = hcr::predict_conditional(*out.lag_model, given_row)
                                    .cdf(x[r + p]);
            }
        });
    } else {
        Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
        Eigen::VectorXd target(static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) {
            design(static_cast<Eigen::Index>(r), 0) = 1.0;
            for (std::size_t j = 1; j <= p; ++j) {
                design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = x[r + p - j];
            }
            target(static_cast<Eigen::Index>(r)) = x[r + p];
        }
        const Eigen::VectorXd w = design.colPivHouseholderQr().solve(target);
        if (!w.allFinite()) {
            throw NumericalFailure("linear residue fit produced non-finite coefficients");
        }
        out.linear_weights.assign(w.data(), w.data() + w.size());
        std::vector<double> residual(n);
        for (std::size_t r = 0; r < n; ++r) {
            residual[r] = target(static_cast<Eigen::Index>(r)) -
                          design.row(static_cast<Eigen::Index>(r)).dot(w);
        }
        const normalization::QuantileMap map = normalization::fit_quantile_map(residual);
        for (std::size_t r = 0; r < n; ++r) {
            out.values[r] = normalization::forward_quantile(map, residual[r]);
        }
    }
    return out;
}

DelayProfile delay_profile(const ResidueSeries& residues, std::span<const double> y,
                           int max_delay) {
    check_delay_inputs(residues, y, max_delay);
    DelayProfile profile;
    profile.delays.resize(static_cast<std::size_t>(max_delay) + 1);
    profile.correlation.resize(profile.delays.size());
    profile.mi.resize(profile.delays.size());
    for (int dt = 0; dt <= max_delay; ++dt) {
        profile.delays[static_cast<std::size_t>(dt)] = dt;
    }
    parallel_indices(profile.delays.size(), [&](std::size_t i) {
        const AlignedViews views = align(residues, y, profile.delays[i]);
        profile.correlation[i] = infoflow::pearson(views.r, views.y);
        profile.mi[i] = infoflow::mutual_information_binned(views.r, views.y).value;
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < profile.correlation.size(); ++i) {
        if (std::abs(profile.correlation[i]) > std::abs(profile.correlation[best])) {
            best = i;
        }
    }
    profile.argmax_delay = profile.delays[best];
    return profile;
}

DelayCoefficientField delay_coefficients(const ResidueSeries& residues, std::span<const double> y,
                                         int max_delay, int degree) {
    check_delay_inputs(residues, y, max_delay);
    if (degree < 1) {
        throw InvalidInput("degree must be at least 1, got " + std::to_string(degree));
    }
    DelayCoefficientField field;
    field.degree = degree;
    field.delays.resize(static_cast<std::size_t>(max_delay) + 1);
    field.coeffs.resize(field.delays.size());
    for (int dt = 0; dt <= max_delay; ++dt) {
        field.delays[static_cast<std::size_t>(dt)] = dt;
    }
    parallel_indices(field.delays.size(), [&](std::size_t i) {
        const AlignedViews views = align(residues, y, field.delays[i]);
        SampleTable pair;
        pair.columns = {"r", "y"};
        pair.data = {{views.r.begin(), views.r.end()}, {views.y.begin(), views.y.end()}};
        field.coeffs[i] = hcr::fit_joint(pair, degree).coeffs;
    });
    return field;
}

DelayFeatureDecomposition pca_reduce(const DelayCoefficientField& field, int rank,
                                     double variance_target) {
    const std::size_t n_delays = field.delays.size();
    if (n_delays < 2) {
        throw InvalidInput("PCA needs at least 2 delays, got " + std::to_string(n_delays));
    }
    if (rank > 0 && variance_target > 0.0) {
        throw InvalidInput("specify either rank or variance_target, not both");
    }
    if (variance_target < 0.0 || variance_target > 1.0) {
        throw InvalidInput("variance_target must lie in (0,1]");
    }
    const std::size_t m = static_cast<std::size_t>(field.degree);
    const std::size_t dim = m * m;
    const std::size_t max_rank = std::min(n_delays, dim);
    if (rank < 0 || static_cast<std::size_t>(rank) > max_rank) {
        throw InvalidInput("rank " + std::to_string(rank) + " exceeds min(#delays, m^2) = " +
                           std::to_string(max_rank));
    }

    // Flatten the (j,k >= 1) blocks and average their outer products.
    Eigen::MatrixXd blocks(static_cast<Eigen::Index>(n_delays), static_cast<Eigen::Index>(dim));
    const std::size_t order = m + 1;
    for (std::size_t d = 0; d < n_delays; ++d) {
        for (std::size_t j = 1; j <= m; ++j) {
            for (std::size_t k = 1; k <= m; ++k) {
                blocks(static_cast<Eigen::Index>(d),
                       static_cast<Eigen::Index>((j - 1) * m + (k - 1))) =
                    field.coeffs[d][j * order + k];
            }
        }
    }
    const Eigen::MatrixXd second_moment =
        blocks.transpose() * blocks / static_cast<double>(n_delays);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(second_moment);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("eigendecomposition of the delay coefficient field failed");
    }

    DelayFeatureDecomposition out;
    out.eigenvalues.resize(dim);
    double total = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double ev = std::max(0.0, solver.eigenvalues()(static_cast<Eigen::Index>(dim - 1 - i)));
        out.eigenvalues[i] = ev;
        total += ev;
    }

    std::size_t keep;
    if (rank > 0) {
        keep = static_cast<std::size_t>(rank);
    } else if (variance_target > 0.0) {
        keep = 1;
        double acc = out.eigenvalues[0];
        while (keep < max_rank && total > 0.0 && acc < variance_target * total) {
            acc += out.eigenvalues[keep];
            ++keep;
        }
    } else {
        keep = max_rank;
    }
    out.rank = static_cast<int>(keep);

    double kept_mass = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(dim - 1 - i));
        Eigen::Index peak = 0;
        v.cwiseAbs().maxCoeff(&peak);
        if (v(peak) < 0.0) {
            v = -v;
        }
        out.directions.emplace_back(v.data(), v.data() + v.size());
        const Eigen::VectorXd score = blocks * v;
        out.scores.emplace_back(score.data(), score.data() + score.size());
        kept_mass += out.eigenvalues[i];
    }
    out.variance_fraction = total > 0.0 ? kept_mass / total : 1.0;
    return out;
}

std::vector<SpectrumPoint> delay_spectrum(const DelayProfile& profile) {
    const std::size_t n = profile.correlation.size();
    if (n < 4) {
        throw InvalidInput("spectrum needs at least 4 delays, got " + std::to_string(n));
    }
    double mean = 0.0;
    for (double c : profile.correlation) {
        mean += c;
    }
    mean /= static_cast<double>(n);

    std::vector<SpectrumPoint> spectrum(n / 2 + 1);
    {
        // The FFTW planner is not thread-safe; the transforms here are tiny.
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        double* in = fftw_alloc_real(n);
        fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
        fftw_plan plan =
            fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
        for (std::size_t i = 0; i < n; ++i) {
            in[i] = profile.correlation[i] - mean;
        }
        fftw_execute(plan);
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
            spectrum[k].frequency = static_cast<double>(k) / static_cast<double>(n);
            spectrum[k].magnitude = std::hypot(out[k][0], out[k][1]);
        }
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    return spectrum;
}

MultivariateGrangerReport multivariate_granger(const SampleTable& panel, int lag_order,
                                               int max_delay, int degree, bool decouple_first,
                                               ResidueMode mode, int sweeps,
                                               const std::vector<std::string>& order,
                                               int pca_rank) {
    panel.validate_unit_range();
    if (panel.n_cols() < 2) {
        throw InvalidInput("multivariate analysis needs at least 2 series, got " +
                           std::to_string(panel.n_cols()));
    }

    MultivariateGrangerReport report;
    report.decoupled = decouple_first;
    report.panel = decouple_first
                       ? decoupling::decouple(panel, order, extraction::ConditionalMethod::kAuto,
                                              degree, sweeps)
                             .result
                       : panel;

    const std::size_t d = report.panel.n_cols();
    std::vector<ResidueSeries> residues(d);
    parallel_indices(d, [&](std::size_t c) {
        residues[c] = fit_residues(report.panel.data[c], lag_order, degree, mode,
                                   report.panel.columns[c]);
    });

    std::vector<std::pair<std::size_t, std::size_t>> ordered;
    for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t t = 0; t < d; ++t) {
            if (s != t) {
                ordered.emplace_back(s, t);
            }
        }
    }
    report.pairs.resize(ordered.size());
    parallel_indices(ordered.size(), [&](std::size_t i) {
        const auto [s, t] = ordered[i];
        PairCausalityReport& pair = report.pairs[i];
        pair.source = report.panel.columns[s];
        pair.target = report.panel.columns[t];
        try {
            pair.profile = delay_profile(residues[t], report.panel.data[s], max_delay);
            pair.field = delay_coefficients(residues[t], report.panel.data[s], max_delay, degree);
            const int max_rank = static_cast<int>(
                std::min(pair.field.delays.size(),
                         static_cast<std::size_t>(degree) * static_cast<std::size_t>(degree)));
            pair.decomposition = pca_reduce(pair.field, std::min(pca_rank, max_rank));
            const std::size_t best = static_cast<std::size_t>(pair.profile.argmax_delay);
            pair.peak_delay = pair.profile.argmax_delay;
            pair.peak_abs_correlation = std::abs(pair.profile.correlation[best]);
        } catch (const InvalidInput& e) {
            throw InvalidInput("pair " + pair.source + " -> " + pair.target + ": " + e.what());
        } catch (const NumericalFailure& e) {
            throw NumericalFailure("pair " + pair.source + " -> " + pair.target + ": " + e.what());
        }
    });
    std::stable_sort(report.pairs.begin(), report.pairs.end(),
                     [](const PairCausalityReport& a, const PairCausalityReport& b) {
                         if (a.peak_abs_correlation != b.peak_abs_correlation) {
                             return a.peak_abs_correlation > b.peak_abs_correlation;
                         }
                         return std::tie(a.source, a.target) < std::tie(b.source, b.target);
                     });
    return report;
}

}  // namespace infoextract::granger
