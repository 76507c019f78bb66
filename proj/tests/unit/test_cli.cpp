#include "cli.hpp"

#include <catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = dcm::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("dcm_test_cli_" + name);
}

}  // namespace

TEST_CASE("dist") {
    Result r = call({"dist", "--model", "unsuccessful-search", "--n", "4", "--format", "json"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["atoms"].size() == 3);
    CHECK(j["atoms"][0][2].get<double>() == Catch::Approx(1.0 / 3.0));
    CHECK(j["atoms"][1][2].get<double>() == 0.5);
    CHECK(j["atoms"][2][2].get<double>() == Catch::Approx(1.0 / 6.0));

    Result e = call({"dist", "--model", "unsuccessful_search", "--n", "4", "--mode", "exact", "--format", "csv"});
    REQUIRE(e.code == 0);
    CHECK(e.out == "value,prob\n1,1/3\n2,1/2\n3,1/6\n");
}

TEST_CASE("verify on a nondegenerate model") {
    Result r = call({"verify", "--model", "quickselect"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["beta_gate"] == "not applicable");
    CHECK(j["degenerate"] == false);
}

TEST_CASE("verify on a degenerate model") {
    Result r = call({"verify", "--model", "unsuccessful-search", "--ns", "8:64", "--lemma-n-max", "100"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["beta"] == 1.5);
    CHECK(j["rows"].size() == 4);
    CHECK(j.contains("lemma32"));
    CHECK(j.contains("transfer"));
}

TEST_CASE("rate") {
    Result r = call({"rate", "--model", "unsuccessful-search", "--metric", "zeta3", "--ns", "64:8192"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["series"].size() == 8);
    double e = j["fit"]["exponent"];
    CHECK(e >= 0.3);
    CHECK(e <= 0.7);
}

TEST_CASE("exit codes") {
    CHECK(call({"dist", "--model", "mergesort", "--n", "4"}).code == 2);
    CHECK(call({"dist", "--model", "quickselect"}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"zeta3", "--model", "broadcast-b-time", "--ns", "16"}).code == 2);
    Result cap = call({"dist", "--model", "quickselect", "--n", "100000"});
    CHECK(cap.code == 3);
    CHECK_FALSE(cap.err.empty());

    auto path = scratch("loop.json");
    std::ofstream(path) << R"({"name":"loop","K":1,"n0":2,"base":[0,0],"rows":[[2,2,1,1.0]]})";
    CHECK(call({"dist", "--spec-file", path.string(), "--n", "2"}).code == 4);
    std::filesystem::remove(path);
}

TEST_CASE("help lists the schemas") {
    Result r = call({"--help"});
    CHECK(r.code == 0);
    for (const char* s : {"Output schemas", "dist", "simulate", "verify", "fixed-point", "Exit codes"}) {
        CHECK(r.out.find(s) != std::string::npos);
    }
}

TEST_CASE("simulation is reproducible") {
    std::vector<std::string> args{"simulate", "--model", "node-depth", "--n", "50", "--runs", "2000", "--seed", "7"};
    Result a = call(args);
    Result b = call(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    args.back() = "8";
    CHECK(call(args).out != a.out);

    std::vector<std::string> fp{"fixed-point", "--population", "2000", "--iterations", "10", "--seed", "3"};
    CHECK(call(fp).out == call(fp).out);
}

TEST_CASE("output file") {
    auto path = scratch("out.json");
    Result r = call({"moments", "--model", "node-depth", "--ns", "4,8", "--output", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    json j = json::parse(in);
    CHECK(j["rows"].size() == 2);
    std::filesystem::remove(path);
}

TEST_CASE("spec file") {
    json spec{{"name", "toy"}, {"K", 1}, {"n0", 2}, {"base", {0, 0}}, {"rows", json::array()}};
    for (int n = 2; n <= 40; ++n) {
        for (int i = 1; i < n; ++i) spec["rows"].push_back({n, i, 1, "1/" + std::to_string(n - 1)});
    }
    auto path = scratch("toy.json");
    std::ofstream(path) << spec.dump();
    Result custom = call({"dist", "--spec-file", path.string(), "--n", "30"});
    Result builtin = call({"dist", "--model", "unsuccessful-search", "--n", "30"});
    REQUIRE(custom.code == 0);
    CHECK(custom.out == builtin.out);
    CHECK(call({"dist", "--spec-file", path.string(), "--n", "41"}).code == 3);

    Result z = call({"zeta3", "--spec-file", path.string(), "--ns", "8:32"});
    CHECK(z.code == 0);
    std::filesystem::remove(path);
}

TEST_CASE("catalog") {
    Result r = call({"catalog", "list"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.size() == 6);
    Result csv = call({"catalog", "--format", "csv"});
    CHECK(csv.out.rfind("name,K,", 0) == 0);
}
