#include "infoextract/infoflow.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "infoextract/basis.hpp"
#include "infoextract/errors.hpp"
#include "infoextract/hcr.hpp"
#include "infoextract/quantile.hpp"

namespace infoextract::infoflow {

namespace {

constexpr int kPluginGrid = 64;

void check_unit_column(std::span<const double> u, const char* name) {
    if (u.empty()) {
        throw InvalidInput(std::string(name) + " column is empty");
    }
    for (double x : u) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw InvalidInput(std::string(name) + " column has value outside [0,1]; " +
                               "normalize the table first");
        }
    }
}

int bin_of(double u, int bins) {
    const int b = static_cast<int>(u * bins);
    return std::min(bins - 1, b);
}

/// Histogram MI of u against composite class labels, Miller-Madow
/// corrected: I_hat + (K_u - 1 + K_label - 1 - (K_joint - 1)) / 2n.
double binned_mi_labels(std::span<const double> u, const std::vector<std::size_t>& labels,
                        std::size_t n_labels, int bins) {
    const std::size_t n = u.size();
    std::vector<std::size_t> joint(static_cast<std::size_t>(bins) * n_labels, 0);
    std::vector<std::size_t> cu(static_cast<std::size_t>(bins), 0);
    std::vector<std::size_t> cl(n_labels, 0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t bu = static_cast<std::size_t>(bin_of(u[r], bins));
        joint[bu * n_labels + labels[r]] += 1;
        cu[bu] += 1;
        cl[labels[r]] += 1;
    }
    const double dn = static_cast<double>(n);
    double value = 0.0;
    std::size_t k_joint = 0;
    for (std::size_t bu = 0; bu < static_cast<std::size_t>(bins); ++bu) {
        for (std::size_t bl = 0; bl < n_labels; ++bl) {
            const std::size_t c = joint[bu * n_labels + bl];
            if (c == 0) {
                continue;
            }
            ++k_joint;
            const double p = static_cast<double>(c) / dn;
            value += p * std::log(static_cast<double>(c) * dn /
                                  (static_cast<double>(cu[bu]) * static_cast<double>(cl[bl])));
        }
    }
    const auto occupied = [](const std::vector<std::size_t>& counts) {
        std::size_t k = 0;
        for (std::size_t c : counts) {
            k += c > 0 ? 1 : 0;
        }
        return k;
    };
    const double k_u = static_cast<double>(occupied(cu));
    const double k_l = static_cast<double>(occupied(cl));
    value += ((k_u - 1.0) + (k_l - 1.0) - (static_cast<double>(k_joint) - 1.0)) / (2.0 * dn);
    return std::max(0.0, value);
}

std::vector<std::size_t> composite_labels(const std::vector<std::span<const double>>& cols,
                                          int bins) {
    const std::size_t n = cols.front().size();
    std::vector<std::size_t> labels(n, 0);
    for (const auto& col : cols) {
        for (std::size_t r = 0; r < n; ++r) {
            labels[r] = labels[r] * static_cast<std::size_t>(bins) +
                        static_cast<std::size_t>(bin_of(col[r], bins));
        }
    }
    return labels;
}

}  // namespace

MiEstimate mutual_information_binned(std::span<const double> u, std::span<const double> v,
                                     int bins) {
    if (u.size() != v.size()) {
        throw InvalidInput("column lengths differ: " + std::to_string(u.size()) + " vs " +
                           std::to_string(v.size()));
    }
    if (bins < 2) {
        throw InvalidInput("bins must be at least 2, got " + std::to_string(bins));
    }
    check_unit_column(u, "first");
    check_unit_column(v, "second");
    std::vector<std::span<const double>> vcol{v};
    MiEstimate est;
    est.value = binned_mi_labels(u, composite_labels(vcol, bins),
                                 static_cast<std::size_t>(bins), bins);
    est.method = "binned";
    est.parameter = bins;
    est.n = u.size();
    return est;
}

MiEstimate mutual_information_hcr(std::span<const double> u, std::span<const double> v,
                                  int degree) {
    if (u.size() != v.size()) {
        throw InvalidInput("column lengths differ: " + std::to_string(u.size()) + " vs " +
                           std::to_string(v.size()));
    }
    SampleTable pair;
    pair.columns = {"u", "v"};
    pair.data = {{u.begin(), u.end()}, {v.begin(), v.end()}};
    const hcr::JointDensityModel model = hcr::fit_joint(pair, degree);

    const std::size_t order = static_cast<std::size_t>(degree) + 1;
    double quadratic = 0.0;
    for (std::size_t j = 1; j < order; ++j) {
        for (std::size_t k = 1; k < order; ++k) {
            const double a = model.coeffs[j * order + k];
            quadratic += 0.5 * a * a;
        }
    }

    // Calibrated plug-in on a midpoint grid: clip, renormalize to grid
    // mean 1, take marginals as row/column means.
    hcr::HcrBasis basis(degree);
    std::vector<double> bx(static_cast<std::size_t>(kPluginGrid) * order);
    for (int g = 0; g < kPluginGrid; ++g) {
        const double x = (g + 0.5) / kPluginGrid;
        basis.eval_all(x, std::span<double>(bx.data() + static_cast<std::size_t>(g) * order, order));
    }
    std::vector<double> rho(static_cast<std::size_t>(kPluginGrid) * kPluginGrid);
    double mean = 0.0;
    for (int gx = 0; gx < kPluginGrid; ++gx) {
        for (int gy = 0; gy < kPluginGrid; ++gy) {
            double s = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                for (std::size_t k = 0; k < order; ++k) {
                    s += model.coeffs[j * order + k] *
                         bx[static_cast<std::size_t>(gx) * order + j] *
                         bx[static_cast<std::size_t>(gy) * order + k];
                }
            }
            s = std::max(s, hcr::kDefaultFloor);
            rho[static_cast<std::size_t>(gx) * kPluginGrid + gy] = s;
            mean += s;
        }
    }
    mean /= static_cast<double>(kPluginGrid) * kPluginGrid;
    for (double& r : rho) {
        r /= mean;
    }
    std::vector<double> px(kPluginGrid, 0.0);
    std::vector<double> py(kPluginGrid, 0.0);
    for (int gx = 0; gx < kPluginGrid; ++gx) {
        for (int gy = 0; gy < kPluginGrid; ++gy) {
            const double r = rho[static_cast<std::size_t>(gx) * kPluginGrid + gy];
            px[static_cast<std::size_t>(gx)] += r;
            py[static_cast<std::size_t>(gy)] += r;
        }
    }
    for (int g = 0; g < kPluginGrid; ++g) {
        px[static_cast<std::size_t>(g)] /= kPluginGrid;
        py[static_cast<std::size_t>(g)] /= kPluginGrid;
    }
    double plugin = 0.0;
    for (int gx = 0; gx < kPluginGrid; ++gx) {
        for (int gy = 0; gy < kPluginGrid; ++gy) {
            const double r = rho[static_cast<std::size_t>(gx) * kPluginGrid + gy];
            plugin += r * std::log(r / (px[static_cast<std::size_t>(gx)] *
                                        py[static_cast<std::size_t>(gy)]));
        }
    }
    plugin /= static_cast<double>(kPluginGrid) * kPluginGrid;

    MiEstimate est;
    est.value = std::max(0.0, plugin);
    est.method = "hcr-plugin";
    est.parameter = degree;
    est.n = u.size();
    est.quadratic = quadratic;
    return est;
}

MiEstimate direct_mutual_information(const SampleTable& table, const std::string& x,
                                     const std::string& y, const std::vector<std::string>& z,
                                     extraction::ConditionalMethod method, int degree, int bins) {
    for (const auto& name : z) {
        if (name == x || name == y) {
            throw InvalidInput("conditioning column '" + name + "' overlaps the tested pair");
        }
    }
    const extraction::ExtractionLayer lx = extraction::fit_extraction(table, x, z, method, degree);
    const extraction::ExtractionLayer ly = extraction::fit_extraction(table, y, z, method, degree);
    const SampleTable tx = extraction::apply_extraction(lx, table);
    const SampleTable ty = extraction::apply_extraction(ly, table);

    MiEstimate est = mutual_information_binned(tx.column(x), ty.column(y), bins);
    est.method = "direct";
    est.raw = mutual_information_binned(table.column(x), table.column(y), bins).value;
    return est;
}

MiEstimate conditional_mi_reference(const SampleTable& table, const std::string& x,
                                    const std::string& y, const std::vector<std::string>& z,
                                    int bins) {
    if (z.size() > 2) {
        throw Unsupported("conditional reference supports at most 2 conditioning columns, got " +
                          std::to_string(z.size()) +
                          "; use direct_mutual_information for larger sets");
    }
    for (const auto& name : z) {
        if (name == x || name == y) {
            throw InvalidInput("conditioning column '" + name + "' overlaps the tested pair");
        }
    }
    table.validate_unit_range();
    if (bins < 2) {
        throw InvalidInput("bins must be at least 2, got " + std::to_string(bins));
    }
    const auto& xc = table.column(x);
    const auto& yc = table.column(y);

    std::vector<std::span<const double>> yz;
    yz.emplace_back(yc);
    std::vector<std::span<const double>> zonly;
    for (const auto& name : z) {
        const auto& col = table.column(name);
        yz.emplace_back(col);
        zonly.emplace_back(col);
    }
    const std::size_t classes_yz = static_cast<std::size_t>(
        std::pow(static_cast<double>(bins), static_cast<double>(yz.size())));
    const double i_xyz = binned_mi_labels(xc, composite_labels(yz, bins), classes_yz, bins);
    double i_xz = 0.0;
    if (!zonly.empty()) {
        const std::size_t classes_z = static_cast<std::size_t>(
            std::pow(static_cast<double>(bins), static_cast<double>(zonly.size())));
        i_xz = binned_mi_labels(xc, composite_labels(zonly, bins), classes_z, bins);
    }

    MiEstimate est;
    est.value = std::max(0.0, i_xyz - i_xz);
    est.method = "conditional-reference";
    est.parameter = bins;
    est.n = xc.size();
    return est;
}

double pearson(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw InvalidInput("column lengths differ: " + std::to_string(u.size()) + " vs " +
                           std::to_string(v.size()));
    }
    if (u.empty()) {
        throw InvalidInput("correlation of empty columns");
    }
    const std::size_t n = u.size();
    double mu = 0.0;
    double mv = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        mu += u[r];
        mv += v[r];
    }
    mu /= static_cast<double>(n);
    mv /= static_cast<double>(n);
    double suv = 0.0;
    double suu = 0.0;
    double svv = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double du = u[r] - mu;
        const double dv = v[r] - mv;
        suv += du * dv;
        suu += du * du;
        svv += dv * dv;
    }
    if (suu <= 0.0 || svv <= 0.0) {
        return 0.0;
    }
    return suv / std::sqrt(suu * svv);
}

double spearman(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw InvalidInput("column lengths differ: " + std::to_string(u.size()) + " vs " +
                           std::to_string(v.size()));
    }
    const std::vector<double> uv(u.begin(), u.end());
    const std::vector<double> vv(v.begin(), v.end());
    const normalization::QuantileMap mu = normalization::fit_quantile_map(uv);
    const normalization::QuantileMap mv = normalization::fit_quantile_map(vv);
    std::vector<double> ru(u.size());
    std::vector<double> rv(v.size());
    for (std::size_t r = 0; r < u.size(); ++r) {
        ru[r] = normalization::forward_quantile(mu, u[r]);
        rv[r] = normalization::forward_quantile(mv, v[r]);
    }
    return pearson(ru, rv);
}

}  // namespace infoextract::infoflow
