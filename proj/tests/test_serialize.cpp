#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "infoextract/decoupling.hpp"
#include "infoextract/errors.hpp"
#include "infoextract/extraction.hpp"
#include "infoextract/serialize.hpp"
#include "test_support.hpp"

using namespace infoextract;
using serialize::ordered_json;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("infoextract_ser_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("extraction layer roundtrips through JSON bit-exactly") {
    SampleTable t = testsupport::copula_table(1500, 0.6, 1);
    for (auto method : {extraction::ConditionalMethod::kJointSlice,
                        extraction::ConditionalMethod::kMomentRegression}) {
        auto layer = extraction::fit_extraction(t, "x", {"y"}, method);
        ordered_json j = serialize::to_json(layer);
        auto restored = serialize::layer_from_json(j);
        SampleTable a = extraction::apply_extraction(layer, t);
        SampleTable b = extraction::apply_extraction(restored, t);
        CHECK(a.data == b.data);  // bitwise identical transforms
    }
}

TEST_CASE("layer stacks reconstruct through a file") {
    TempDir dir;
    SampleTable t = testsupport::copula_table(1200, 0.5, 2);
    auto d = decoupling::decouple(t);
    serialize::LayerStack stack;
    stack.layers = d.layers;
    stack.mode = d.mode;
    stack.order = d.order_used;
    stack.sweeps = d.sweeps;
    const std::string path = dir.file("stack.json");
    serialize::write_json_file(serialize::to_json(stack), path);
    serialize::LayerStack loaded = serialize::layer_stack_from_json(serialize::read_json_file(path));
    CHECK(loaded.layers.size() == stack.layers.size());
    CHECK(loaded.order == stack.order);
    CHECK(loaded.sweeps == stack.sweeps);
    decoupling::DecoupledDataset rebuilt;
    rebuilt.layers = loaded.layers;
    rebuilt.result = d.result;
    rebuilt.mode = loaded.mode;
    SampleTable back_a = decoupling::reconstruct(d);
    SampleTable back_b = decoupling::reconstruct(rebuilt);
    CHECK(back_a.data == back_b.data);
}

TEST_CASE("stack format header is validated") {
    ordered_json j;
    j["format"] = "something-else";
    j["version"] = 1;
    j["layers"] = ordered_json::array();
    CHECK_THROWS_AS(serialize::layer_stack_from_json(j), FormatError);
    j["format"] = "infoextract-layers";
    j["version"] = 99;
    CHECK_THROWS_AS(serialize::layer_stack_from_json(j), FormatError);
}

TEST_CASE("malformed layer JSON raises FormatError") {
    ordered_json j;
    j["target"] = "x";  // missing everything else
    CHECK_THROWS_AS(serialize::layer_from_json(j), FormatError);
}

TEST_CASE("json file IO policies") {
    TempDir dir;
    const std::string path = dir.file("out.json");
    ordered_json j;
    j["k"] = 1;
    serialize::write_json_file(j, path);
    CHECK_THROWS_AS(serialize::write_json_file(j, path), RefusedOverwrite);
    serialize::write_json_file(j, path, true);
    const std::string bad = dir.file("bad.json");
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(serialize::read_json_file(bad), FormatError);
    CHECK_THROWS_AS(serialize::read_json_file(dir.file("absent.json")), InvalidInput);
}

TEST_CASE("mi estimates and reports serialize with stable keys") {
    SampleTable t = testsupport::copula_table(2000, 0.5, 3);
    auto rep = decoupling::dependence_report(t);
    ordered_json j = serialize::to_json(rep);
    CHECK(j.contains("columns"));
    CHECK(j.contains("spearman_abs"));
    CHECK(j.contains("mi"));
    CHECK(j.contains("max_mi"));
    infoflow::MiEstimate est = infoflow::mutual_information_binned(t.data[0], t.data[1]);
    ordered_json k = serialize::to_json(est);
    CHECK(k["method"] == "binned");
    CHECK(k["n"] == 2000);
}
