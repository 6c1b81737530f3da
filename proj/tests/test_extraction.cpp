#include <doctest.h>

#include <cmath>
#include <vector>

#include "infoextract/errors.hpp"
#include "infoextract/extraction.hpp"
#include "infoextract/infoflow.hpp"
#include "infoextract/rng.hpp"
#include "test_support.hpp"

using namespace infoextract;
using extraction::ConditionalMethod;
using extraction::fit_extraction;

TEST_CASE("extraction decorrelates a copula pair") {
    SampleTable t = testsupport::copula_table(10000, 0.7, 1);
    auto layer = fit_extraction(t, "x", {"y"});
    SampleTable out = extraction::apply_extraction(layer, t);
    const auto& xbar = out.column("x");
    const auto& y = out.column("y");
    CHECK(std::abs(infoflow::spearman(xbar, y)) <= 0.05);
    CHECK(testsupport::ks_uniform(xbar) <= 0.03);
    // The conditioning column passes through untouched.
    CHECK(y == t.column("y"));
}

TEST_CASE("extraction roundtrip is exact within the grid bound") {
    SampleTable t = testsupport::copula_table(1000, 0.6, 2);
    for (auto method : {ConditionalMethod::kJointSlice, ConditionalMethod::kMomentRegression}) {
        auto layer = fit_extraction(t, "x", {"y"}, method);
        SampleTable out = extraction::apply_extraction(layer, t);
        SampleTable back = extraction::invert_extraction(layer, out);
        const auto& x0 = t.column("x");
        const auto& x1 = back.column("x");
        double worst = 0.0;
        for (std::size_t i = 0; i < x0.size(); ++i)
            worst = std::max(worst, std::abs(x0[i] - x1[i]));
        CHECK(worst <= 2.0 / 1024.0);
    }
}

TEST_CASE("auto method prefers the joint slice for small conditioning sets") {
    SampleTable t = testsupport::copula_table(2000, 0.5, 3);
    auto layer = fit_extraction(t, "x", {"y"});
    CHECK(layer.joint_model.has_value());
    CHECK(!layer.moment_model.has_value());
}

TEST_CASE("auto method switches to moment regression beyond two conditioners") {
    datasets::GeneratorSpec spec;
    spec.kind = datasets::GeneratorKind::kGaussianCopula;
    spec.n = 3000;
    spec.dims = 4;
    spec.rho = 0.4;
    spec.seed = 4;
    spec.normalized = true;
    SampleTable t = datasets::generate(spec);
    auto layer = fit_extraction(t, "x1", {"x2", "x3", "x4"});
    CHECK(layer.moment_model.has_value());
    CHECK(!layer.joint_model.has_value());
}

TEST_CASE("iterated extraction does not regress") {
    SampleTable t = testsupport::copula_table(10000, 0.7, 1);
    auto one = extraction::iterate_extraction(t, "x", {"y"}, 1);
    auto two = extraction::iterate_extraction(t, "x", {"y"}, 2);
    const double mi1 =
        infoflow::mutual_information_binned(one.result.column("x"), one.result.column("y"))
            .value;
    const double mi2 =
        infoflow::mutual_information_binned(two.result.column("x"), two.result.column("y"))
            .value;
    CHECK(mi2 <= mi1 + 0.01);
    CHECK(two.layers.size() == 2);
}

TEST_CASE("iterated extraction inverts layer by layer") {
    SampleTable t = testsupport::copula_table(800, 0.5, 6);
    auto run = extraction::iterate_extraction(t, "x", {"y"}, 3);
    SampleTable back = run.result;
    for (auto it = run.layers.rbegin(); it != run.layers.rend(); ++it) {
        back = extraction::invert_extraction(*it, back);
    }
    const auto& x0 = t.column("x");
    const auto& x1 = back.column("x");
    double worst = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i)
        worst = std::max(worst, std::abs(x0[i] - x1[i]));
    CHECK(worst <= 3.0 * 2.0 / 1024.0);
}

TEST_CASE("extraction argument validation") {
    SampleTable t = testsupport::copula_table(100, 0.5, 7);
    CHECK_THROWS_AS(fit_extraction(t, "x", {"x"}), InvalidInput);
    CHECK_THROWS_AS(fit_extraction(t, "x", {"y", "y"}), InvalidInput);
    CHECK_THROWS_AS(fit_extraction(t, "nope", {"y"}), InvalidInput);
    CHECK_THROWS_AS(extraction::iterate_extraction(t, "x", {"y"}, 0), InvalidInput);
    t.data[0][0] = 2.0;
    CHECK_THROWS_AS(fit_extraction(t, "x", {"y"}), InvalidInput);
}

TEST_CASE("iteration errors carry the iteration index") {
    SampleTable t = testsupport::copula_table(3, 0.5, 8);  // too few rows for the regression
    try {
        extraction::iterate_extraction(t, "x", {"y"}, 2, ConditionalMethod::kMomentRegression);
        FAIL("expected InvalidInput");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("iteration 1") != std::string::npos);
    }
}
