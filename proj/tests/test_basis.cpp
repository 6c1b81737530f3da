#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "infoextract/basis.hpp"
#include "infoextract/errors.hpp"

using infoextract::InvalidInput;
using infoextract::hcr::HcrBasis;

namespace {

// 64-point Gauss-Legendre nodes/weights on [-1,1], mapped to [0,1] below.
// Computed by Newton iteration on the Legendre recurrence.
void gauss_legendre64(std::vector<double>& nodes, std::vector<double>& weights) {
    const int n = 64;
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

}  // namespace

TEST_CASE("closed forms of the first three polynomials") {
    HcrBasis basis(2);
    for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        CHECK(basis.eval(0, x) == doctest::Approx(1.0));
        CHECK(basis.eval(1, x) == doctest::Approx(std::sqrt(3.0) * (2.0 * x - 1.0)));
        CHECK(basis.eval(2, x) ==
              doctest::Approx(std::sqrt(5.0) * (6.0 * x * x - 6.0 * x + 1.0)));
    }
}

TEST_CASE("gram matrix up to degree 8 is the identity") {
    const int m = 8;
    HcrBasis basis(m);
    std::vector<double> nodes, weights;
    gauss_legendre64(nodes, weights);
    std::vector<double> vals(m + 1);
    std::vector<std::vector<double>> gram(m + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const double x = 0.5 * (nodes[q] + 1.0);
        const double w = 0.5 * weights[q];
        basis.eval_all(x, vals);
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) gram[i][j] += w * vals[i] * vals[j];
    }
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= m; ++j) {
            CHECK(std::abs(gram[i][j] - (i == j ? 1.0 : 0.0)) <= 1e-9);
        }
    }
}

TEST_CASE("eval_all matches eval") {
    HcrBasis basis(6);
    std::vector<double> vals(7);
    for (double x : {0.05, 0.33, 0.77}) {
        basis.eval_all(x, vals);
        for (int i = 0; i <= 6; ++i) CHECK(vals[i] == basis.eval(i, x));
    }
}

TEST_CASE("degree bounds are enforced") {
    CHECK_THROWS_AS(HcrBasis(-1), InvalidInput);
    HcrBasis basis(3);
    CHECK_THROWS_AS(basis.eval(4, 0.5), InvalidInput);
    CHECK_THROWS_AS(basis.eval(-1, 0.5), InvalidInput);
}
