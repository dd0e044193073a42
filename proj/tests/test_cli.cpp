#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "framelab/config.hpp"
#include "framelab/errors.hpp"
#include "framelab/runner.hpp"

using namespace framelab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("framelab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the CLI with the given arguments and returns its exit status.
int cli(const std::string& args) {
    const char* exe = std::getenv("FRAMELAB_CLI");
    REQUIRE(exe != nullptr);
    const std::string cmd = std::string(exe) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

std::string error_of(const json& j) {
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("minimal config gets the defaults") {
    const Config c = parse_config(json{{"mode", "certify"}});
    CHECK(c.mode == Mode::Certify);
    CHECK(c.weights.gamma == 0.5);
    CHECK(c.weights.mu == -0.25);
    CHECK(c.q0 == -2.0);
    CHECK(c.seed == 1);
}

TEST_CASE("constraint violations name the invariant") {
    CHECK(error_of({{"mode", "certify"}, {"weights", {{"gamma", -1}}}}) == "ConstraintError: gamma must be > 0");
    CHECK(error_of({{"mode", "certify"}, {"weights", {{"mu", 0.1}}}}) == "ConstraintError: mu must be < 0");
    CHECK(error_of({{"mode", "evolve"}, {"background", {{"family", "static-bump"}, {"epsilon", 0.4}}}}) ==
          "ConstraintError: epsilon must be <= 0.3");
    CHECK(error_of({{"mode", "evolve"}, {"times", {{"cfl", 0.6}}}}) == "ConstraintError: cfl must be <= 0.5");
    CHECK(error_of({{"mode", "estimate"}, {"multiIndices", {"S"}}}) ==
          "ConstraintError: estimate runs support the empty multi-index only");
    CHECK(error_of({{"mode", "commutator"}, {"frames", {"Lbar"}}}) == "ConstraintError: frame Lbar needs frameSet 'full'");
    CHECK(error_of({{"mode", "commutator"}, {"frames", {"Lbar"}}, {"frameSet", "full"}}).empty());
}

TEST_CASE("schema errors carry the field path") {
    CHECK(error_of({{"mode", "certify"}, {"grid", {{"Nx", 3}}}}) == "SchemaError: grid.Nx: unknown field");
    CHECK(error_of({{"mode", "certify"}, {"grid", {{"N", "a"}}}}) == "SchemaError: grid.N: expected an integer");
    CHECK(error_of({{"mode", "nope"}}) == "SchemaError: mode: unknown mode 'nope'");
    CHECK(error_of(json::object()) == "SchemaError: mode: required field missing");
    CHECK(error_of({{"mode", "evolve"}, {"source", {{{"term", "bogus"}}}}}).rfind("SchemaError: source[0].term", 0) == 0);
    CHECK(error_of({{"mode", "evolve"}, {"data", {{"centre", {1, 2}}}}}) == "SchemaError: data.centre: expected 3 numbers");
}

TEST_CASE("refinement ladder") {
    CHECK(refine_ladder(32, 3) == std::vector<int>{32, 48, 64});
    CHECK(refine_ladder(7, 2) == std::vector<int>{8, 10});
}

TEST_CASE("config errors exit with 2") {
    const fs::path d = scratch("errors");
    CHECK(cli("certify --config " + write_config(d, {{"weights", {{"gamma", -1}}}}).string()) == 2);
    std::ofstream(d / "broken.json") << "{ not json";
    CHECK(cli("evolve --config " + (d / "broken.json").string()) == 2);
    CHECK(cli("evolve --config " + (d / "missing.json").string()) == 2);
    CHECK(cli("launch") == 2);
}

TEST_CASE("zero data evolve writes zero energy series and is deterministic") {
    const fs::path d = scratch("evolve");
    const json cfg = {{"grid", {{"N", 16}, {"X", 2.0}}}, {"times", {{"t2", 0.2}}}, {"data", {{"kind", "zero"}}},
                      {"frames", {"L", "e1"}}};
    const fs::path c = write_config(d, cfg);
    REQUIRE(cli("evolve --config " + c.string() + " --out " + (d / "a").string()) == 0);
    REQUIRE(cli("evolve --config " + c.string() + " --out " + (d / "b").string()) == 0);
    std::ifstream csv(d / "a" / "energy.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,term,anchor,value");
    int rows = 0;
    while (std::getline(csv, line)) {
        CHECK(line.substr(line.rfind(',') + 1) == "0");
        ++rows;
    }
    CHECK(rows > 2);
    for (const char* f : {"energy.csv", "run.jsonl", "evolve.json"}) CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    CHECK(json::parse(slurp(d / "a" / "evolve.json")).at("seed") == 1);
}

TEST_CASE("conserve reports a refinement order") {
    const fs::path d = scratch("conserve");
    const json cfg = {{"grid", {{"N", 16}, {"X", 4.0}}}, {"times", {{"t2", 0.3}}}};
    REQUIRE(cli("conserve --refine 2 --config " + write_config(d, cfg).string() + " --out " + d.string()) == 0);
    const json j = json::parse(slurp(d / "conserve.json"));
    CHECK(j.at("resolutions") == json{16, 24});
    CHECK(j.at("residualOrder").size() == 1);
    CHECK(slurp(d / "budget.csv").find("Budget-line: flux through the cone") != std::string::npos);
}

TEST_CASE("estimate and commutator reports carry term anchors") {
    const fs::path d = scratch("reports");
    const json est = {{"grid", {{"N", 16}}}, {"times", {{"t2", 0.2}}}};
    REQUIRE(cli("estimate --config " + write_config(d, est).string() + " --out " + (d / "e").string()) == 0);
    const json je = json::parse(slurp(d / "e" / "estimate.json"));
    const json& rhs = je.at("runs")[0].at("monitors")[0].at("report").at("rhs");
    CHECK(rhs.size() == 6);
    for (const auto& t : rhs) CHECK(t.at("anchor").get<std::string>().rfind("Thm-line: ", 0) == 0);

    const json com = {{"multiIndices", {"S", "Z01"}}, {"frames", {"L"}}, {"sampling", {{"n", 3}}}};
    REQUIRE(cli("commutator --seed 7 --config " + write_config(d, com).string() + " --out " + (d / "c").string()) == 0);
    const json jc = json::parse(slurp(d / "c" / "commutator.json"));
    CHECK(jc.at("seed") == 7);
    CHECK(jc.at("entries").size() == 4);  // two indices, two conventions
    for (const auto& e : jc.at("entries")) {
        CHECK(e.at("report").at("identityResidual").get<double>() <= 1e-10);
        CHECK(e.at("measuredConstants")[0].at("constant").get<double>() > 0.0);
    }
}

TEST_CASE("runtime failures exit with 4 and leave a record") {
    const fs::path d = scratch("runtime");
    const json cfg = {{"grid", {{"N", 16}}}, {"times", {{"t2", 0.1}}}, {"region", {{"q0", 50.0}}}};
    CHECK(cli("conserve --config " + write_config(d, cfg).string() + " --out " + d.string()) == 4);
    const json rec = json::parse(slurp(d / "failure.json"));
    CHECK(rec.at("exitCode") == 4);
    CHECK(rec.at("message").get<std::string>().find("EmptyRegion") != std::string::npos);
}

TEST_CASE("certify passes on a clean build") {
    const fs::path d = scratch("certify");
    REQUIRE(cli("certify --out " + d.string()) == 0);
    const json j = json::parse(slurp(d / "certify.json"));
    CHECK(j.at("pass") == true);
    for (const auto& c : j.at("checks")) CHECK(c.at("residual").get<double>() <= c.at("tolerance").get<double>());
}
