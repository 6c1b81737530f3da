#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "test_support.hpp"

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("infoextract_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

int run(const std::string& args, const std::string& stderr_to = "/dev/null") {
    const std::string cmd =
        testsupport::cli_binary() + " " + args + " >/dev/null 2>" + stderr_to;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("cli pipeline: synth, extract, reconstruct, exit codes") {
    REQUIRE(!testsupport::cli_binary().empty());
    TempDir dir;
    const std::string data = dir.file("d.csv");
    CHECK(run("synth --kind gaussian-copula --rho 0.7 --n 1500 --seed 1 -o " + data) == 0);
    CHECK(std::filesystem::exists(data));
    CHECK(std::filesystem::exists(data + ".run.json"));
    // Overwrite refusal maps to exit 1; --force clears it.
    CHECK(run("synth --kind gaussian-copula --n 100 --seed 1 -o " + data) == 1);
    CHECK(run("--force synth --kind gaussian-copula --rho 0.7 --n 1500 --seed 1 -o " + data) ==
          0);
    const std::string xbar = dir.file("xbar.csv");
    const std::string layers = dir.file("layers.json");
    CHECK(run("extract -i " + data + " --target x --given y -o " + xbar + " --layers " +
              layers) == 0);
    const std::string back = dir.file("back.csv");
    CHECK(run("reconstruct -i " + xbar + " --layers " + layers + " -o " + back) == 0);
    CHECK(std::filesystem::exists(back));
}

TEST_CASE("cli error reporting") {
    REQUIRE(!testsupport::cli_binary().empty());
    TempDir dir;
    // Unknown flags are usage errors.
    CHECK(run("granger --bogus") == 1);
    CHECK(run("definitely-not-a-subcommand") == 1);
    // Missing input file, JSON error envelope on stderr.
    const std::string errfile = dir.file("err.txt");
    CHECK(run("--json-errors normalize -i " + dir.file("absent.csv") + " -o " +
                  dir.file("o.csv"),
              errfile) == 1);
    const std::string err = slurp(errfile);
    CHECK(err.find("\"error\"") != std::string::npos);
    CHECK(err.find("InvalidInput") != std::string::npos);
    // Parse errors carry line and column.
    const std::string bad = dir.file("bad.csv");
    std::ofstream(bad) << "a,b\n1,x\n";
    CHECK(run("--json-errors normalize -i " + bad + " -o " + dir.file("o2.csv"), errfile) ==
          1);
    const std::string perr = slurp(errfile);
    CHECK(perr.find("ParseError") != std::string::npos);
    CHECK(perr.find("\"line\":2") != std::string::npos);
    CHECK(perr.find("\"column\":2") != std::string::npos);
}

TEST_CASE("cli mi and dmi emit unit-labeled JSON") {
    REQUIRE(!testsupport::cli_binary().empty());
    TempDir dir;
    const std::string data = dir.file("chain.csv");
    CHECK(run("synth --kind markov-chain --n 2000 --seed 3 -o " + data) == 0);
    const std::string mi_out = dir.file("mi.json");
    CHECK(run("mi -i " + data + " --x x --y y -o " + mi_out) == 0);
    const std::string mi_body = slurp(mi_out);
    CHECK(mi_body.find("\"units\": \"bits\"") != std::string::npos);
    const std::string dmi_out = dir.file("dmi.json");
    CHECK(run("dmi -i " + data + " --x x --y y --z z -o " + dmi_out) == 0);
    const std::string dmi_body = slurp(dmi_out);
    CHECK(dmi_body.find("\"I\"") != std::string::npos);
    CHECK(dmi_body.find("\"I_d\"") != std::string::npos);
}

TEST_CASE("cli rejects conflicting half-specified pairs") {
    REQUIRE(!testsupport::cli_binary().empty());
    TempDir dir;
    const std::string data = dir.file("d.csv");
    CHECK(run("synth --kind gaussian-copula --n 300 --seed 2 -o " + data) == 0);
    CHECK(run("dmi -i " + data + " --x x") == 1);
    CHECK(run("granger -i " + data + " --target x") == 1);
}
