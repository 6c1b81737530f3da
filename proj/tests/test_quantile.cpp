#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "infoextract/errors.hpp"
#include "infoextract/quantile.hpp"
#include "infoextract/rng.hpp"
#include "test_support.hpp"

using namespace infoextract;
using normalization::fit_quantile_map;
using normalization::forward_quantile;
using normalization::inverse_quantile;
using normalization::normalize_table;

TEST_CASE("rank rule (rank - 0.5)/n") {
    auto map = fit_quantile_map({3.0, 1.0, 2.0});
    CHECK(forward_quantile(map, 3.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(forward_quantile(map, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(forward_quantile(map, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("single sample maps to the midpoint") {
    auto map = fit_quantile_map({5.0});
    CHECK(forward_quantile(map, 5.0) == doctest::Approx(0.5));
}

TEST_CASE("linear interpolation between rank points") {
    auto map = fit_quantile_map({1.0, 2.0, 3.0});
    CHECK(forward_quantile(map, 2.0) == doctest::Approx(0.5));
    CHECK(forward_quantile(map, 1.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(inverse_quantile(map, 0.5) == doctest::Approx(2.0));
    CHECK(inverse_quantile(map, 1.0 / 6.0) == doctest::Approx(1.0));
}

TEST_CASE("out-of-hull inputs clamp") {
    auto map = fit_quantile_map({1.0, 2.0, 3.0});
    CHECK(forward_quantile(map, -100.0) == doctest::Approx(1.0 / 6.0));
    CHECK(forward_quantile(map, 100.0) == doctest::Approx(5.0 / 6.0));
    CHECK(inverse_quantile(map, 0.0) == doctest::Approx(1.0));
    CHECK(inverse_quantile(map, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("ties share the average rank and a single representative") {
    auto map = fit_quantile_map({2.0, 2.0, 2.0, 5.0});
    CHECK(forward_quantile(map, 2.0) == doctest::Approx((1.5) / 4.0).epsilon(1e-12));
    CHECK(inverse_quantile(map, forward_quantile(map, 2.0)) == doctest::Approx(2.0));
}

TEST_CASE("permutation invariance") {
    std::vector<double> a{0.3, -1.2, 4.5, 0.3, 2.2, -7.0};
    std::vector<double> b = a;
    std::reverse(b.begin(), b.end());
    auto ma = fit_quantile_map(a);
    auto mb = fit_quantile_map(b);
    for (double x : {-8.0, -1.2, 0.0, 0.3, 1.0, 4.5, 9.0}) {
        CHECK(forward_quantile(ma, x) == forward_quantile(mb, x));
    }
}

TEST_CASE("monotonicity and range on random pairs") {
    datasets::SplitMix64 rng(99);
    std::vector<double> col;
    for (int i = 0; i < 200; ++i) col.push_back(rng.next_normal());
    auto map = fit_quantile_map(col);
    for (int i = 0; i < 500; ++i) {
        double x1 = rng.next_normal() * 2.0;
        double x2 = rng.next_normal() * 2.0;
        if (x1 > x2) std::swap(x1, x2);
        const double u1 = forward_quantile(map, x1);
        const double u2 = forward_quantile(map, x2);
        CHECK(u1 <= u2);
        CHECK(u1 >= 0.0);
        CHECK(u2 <= 1.0);
    }
}

TEST_CASE("roundtrip identity on the sample hull") {
    datasets::SplitMix64 rng(7);
    std::vector<double> col;
    for (int i = 0; i < 300; ++i) col.push_back(rng.next_normal());
    auto map = fit_quantile_map(col);
    for (double x : col) {
        CHECK(std::abs(inverse_quantile(map, forward_quantile(map, x)) - x) <= 1e-12);
    }
}

TEST_CASE("forward image of uniform data is close to identity") {
    datasets::SplitMix64 rng(1);
    std::vector<double> col;
    for (int i = 0; i < 10000; ++i) col.push_back(rng.next_unit());
    auto map = fit_quantile_map(col);
    double acc = 0.0;
    for (double x : col) acc += std::abs(forward_quantile(map, x) - x);
    CHECK(acc / 10000.0 <= 0.02);
}

TEST_CASE("normal median maps near one half") {
    datasets::SplitMix64 rng(2);
    std::vector<double> col;
    for (int i = 0; i < 10000; ++i) col.push_back(rng.next_normal());
    auto map = fit_quantile_map(col);
    CHECK(std::abs(forward_quantile(map, 0.0) - 0.5) <= 0.02);
}

TEST_CASE("normalized gaussian columns pass KS uniformity") {
    auto table = testsupport::copula_table(10000, 0.6, 3);
    for (const auto& col : table.data) {
        CHECK(testsupport::ks_uniform(col) <= 0.02);
    }
}

TEST_CASE("constant column normalizes to one tie group at 0.5") {
    SampleTable t;
    t.columns = {"c"};
    t.data = {{7.0, 7.0, 7.0}};
    auto [normalized, maps] = normalize_table(t);
    for (double v : normalized.data[0]) CHECK(v == doctest::Approx(0.5));
    CHECK(maps.size() == 1);
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(fit_quantile_map({}), InvalidInput);
    CHECK_THROWS_AS(fit_quantile_map({1.0, std::numeric_limits<double>::quiet_NaN()}),
                    InvalidInput);
    auto map = fit_quantile_map({1.0, 2.0});
    CHECK_THROWS_AS(forward_quantile(map, std::numeric_limits<double>::infinity()),
                    InvalidInput);
    CHECK_THROWS_AS(inverse_quantile(map, -0.1), InvalidInput);
    CHECK_THROWS_AS(inverse_quantile(map, 1.1), InvalidInput);
    CHECK_THROWS_AS(normalize_table(SampleTable{}), InvalidInput);
}
