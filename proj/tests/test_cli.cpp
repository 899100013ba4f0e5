#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

std::string cli_path() {
    const char* env = std::getenv("ERGO_CLI");
    return env ? env : "./build/tools/ergo";
}

int run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("build emits the documented generators and verify accepts them") {
    REQUIRE(run("horseshoe build --cylinder 0101 --out /tmp/ergo_cli_b.json") == 0);
    const auto j = nlohmann::json::parse(slurp("/tmp/ergo_cli_b.json"));
    CHECK(j["generators"][0] == "01011110");
    CHECK(j["generators"][1] == "01011111");
    CHECK(j["tau"] == 8);
    CHECK(run("horseshoe verify /tmp/ergo_cli_b.json") == 0);
}

TEST_CASE("tampered certificates exit with code 2") {
    REQUIRE(run("horseshoe disjointify --g0 00 --g1 01 --out /tmp/ergo_cli_c.json") ==
            0);
    CHECK(run("horseshoe verify /tmp/ergo_cli_c.json") == 0);
    auto j = nlohmann::json::parse(slurp("/tmp/ergo_cli_c.json"));
    std::string g = j["generators"][0];
    g[g.size() - 1] = g.back() == '0' ? '1' : '0';
    j["generators"][0] = g;
    spit("/tmp/ergo_cli_tampered.json", j.dump());
    CHECK(run("horseshoe verify /tmp/ergo_cli_tampered.json") == 2);
}

TEST_CASE("toral analyze reports entropy and the horseshoe-free flag") {
    spit("/tmp/ergo_cli_aa.json",
         R"({"d":4,"rows":[[0,1,0,0],[0,0,1,0],[0,0,0,1],[-1,3,-3,3]]})");
    REQUIRE(run("toral analyze --matrix /tmp/ergo_cli_aa.json --out "
                "/tmp/ergo_cli_aa_out.json") == 0);
    const auto j = nlohmann::json::parse(slurp("/tmp/ergo_cli_aa_out.json"));
    CHECK(std::abs(j["entropy"].get<double>() - 0.7671972182513194) < 1e-9);
    CHECK(j["classification"]["class"] == "partially_hyperbolic");
    CHECK(j["classification"]["horseshoe_free"] == true);
}

TEST_CASE("malformed configs exit with code 1") {
    spit("/tmp/ergo_cli_bad.json", "{\"d\": 2, \"rows\": [[1,0]]}");
    CHECK(run("toral analyze --matrix /tmp/ergo_cli_bad.json") == 1);
    spit("/tmp/ergo_cli_bad2.json", "not json");
    CHECK(run("toral analyze --matrix /tmp/ergo_cli_bad2.json") == 1);
    CHECK(run("weights gen --spec /tmp/ergo_cli_missing.json --n 10") == 1);
}

TEST_CASE("depth exhaustion exits with code 3") {
    // s = 1 displaces the doubling horseshoe only after the first prime
    // pass; with max-depth 0 the very first witness search gives up.
    CHECK(run("horseshoe disjointify --g0 00 --g1 01 --max-depth 0") == 3);
}

TEST_CASE("identical invocations produce identical bytes") {
    const std::string cfg =
        R"({"matrix":{"d":1,"rows":[[4]]},"q":1,"K":8,"N":8,"r":0.5,)"
        R"("samples":2000,"weight":{"kind":"constant","re":1.0,"im":0.0}})";
    spit("/tmp/ergo_cli_rv.json", cfg);
    REQUIRE(run("toral riesz-verify --config /tmp/ergo_cli_rv.json --seed 5 "
                "--out /tmp/ergo_cli_rv1.json") == 0);
    REQUIRE(run("toral riesz-verify --config /tmp/ergo_cli_rv.json --seed 5 "
                "--out /tmp/ergo_cli_rv2.json") == 0);
    CHECK(slurp("/tmp/ergo_cli_rv1.json") == slurp("/tmp/ergo_cli_rv2.json"));
    // Manifests pin the output hash.
    const auto m = nlohmann::json::parse(slurp("/tmp/ergo_cli_rv1.json.manifest.json"));
    CHECK(m["seed"] == 5);
    CHECK(m["outputs"].size() == 1);
}

TEST_CASE("rotation control passes on the golden example") {
    CHECK(run("control rotation --alpha 0.6180339887498949 "
              "--beta 0.3333333333333333 --n-max 100000") == 0);
}

TEST_CASE("average pair reports the identity and exits cleanly") {
    spit("/tmp/ergo_cli_mo.json", R"({"kind":"moebius"})");
    CHECK(run("average pair --spec /tmp/ergo_cli_mo.json --n 10000") == 0);
}

TEST_CASE("average lift runs end to end from a stored certificate") {
    REQUIRE(run("horseshoe disjointify --g0 00 --g1 01 --out /tmp/ergo_cli_K.json") ==
            0);
    spit("/tmp/ergo_cli_bern.json", R"({"kind":"bernoulli_pm1","seed":3})");
    CHECK(run("average lift --cert /tmp/ergo_cli_K.json --spec "
              "/tmp/ergo_cli_bern.json --n 2000 --out /tmp/ergo_cli_lift.json") ==
          0);
    const auto j = nlohmann::json::parse(slurp("/tmp/ergo_cli_lift.json"));
    CHECK(j["tau"] == 8);
    CHECK(j["identity_deviation"].get<double>() <=
          j["bound_2tau_over_N"].get<double>());
}

TEST_SUITE_END();
