#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hessquot/scenario.hpp"

using namespace hq;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
    const fs::path p = fs::temp_directory_path() / "hessquot-cli-tests";
    fs::create_directories(p);
    return p;
}

fs::path write_config(const std::string& name, const json& cfg) {
    const fs::path p = work_dir() / name;
    std::ofstream os(p);
    os << cfg.dump(2) << '\n';
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json base_config() {
    return json{
        {"schema", 1},
        {"id", "cli-test"},
        {"seed", 5},
        {"params", {{"n", 3}, {"k", 2}, {"l", 0}, {"m", 3}}},
        {"alpha", 0.5},
        {"b", 1.0},
        {"checks", json::array({"thresholds", "radial"})},
    };
}

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(CLI_BIN) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("exit codes: I/O, config, check failure, numeric") {
    const fs::path out = work_dir() / "codes";

    // missing config file -> 4
    CHECK(run_scenario((work_dir() / "no_such.json").string()) == kExitIo);

    // malformed JSON -> 2
    {
        const fs::path p = work_dir() / "broken.json";
        std::ofstream(p) << "{ not json";
        CHECK(run_scenario(p.string()) == kExitConfig);
    }

    // wrong schema -> 2
    {
        json cfg = base_config();
        cfg["schema"] = 2;
        CHECK(run_scenario(write_config("schema.json", cfg).string()) ==
              kExitConfig);
    }

    // unknown check name -> 2
    {
        json cfg = base_config();
        cfg["checks"] = json::array({"no_such_check"});
        cfg["output_dir"] = (out / "unknown").string();
        CHECK(run_scenario(write_config("unknown.json", cfg).string()) ==
              kExitConfig);
    }

    // broken envelope hypothesis (beta <= 2) -> 2
    {
        json cfg = base_config();
        cfg["params"] = {{"n", 3}, {"k", 2}, {"l", 1}, {"m", 3}};
        cfg["envelope"] = {{"C1", 0.1}, {"beta", 2.0}, {"theta0", 1.0}};
        cfg["checks"] = json::array({"profiles"});
        cfg["output_dir"] = (out / "beta").string();
        CHECK(run_scenario(write_config("beta.json", cfg).string()) ==
              kExitConfig);
    }

    // honest check failure under a crushing tolerance scale -> 1
    {
        json cfg = base_config();
        cfg["tol_scale"] = 1e-12;
        cfg["checks"] = json::array({"radial"});
        cfg["output_dir"] = (out / "fail").string();
        CHECK(run_scenario(write_config("fail.json", cfg).string()) ==
              kExitCheckFail);
    }

    // alpha outside the m-convex range: cone violation -> 3
    {
        json cfg = base_config();
        cfg["params"] = {{"n", 3}, {"k", 2}, {"l", 0}, {"m", 3}};
        cfg["alpha"] = 5.0;  // alpha2 = 2 for these orders
        cfg["checks"] = json::array({"radial"});
        cfg["output_dir"] = (out / "cone").string();
        CHECK(run_scenario(write_config("cone.json", cfg).string()) ==
              kExitNumeric);
    }
}

TEST_CASE("report.json is deterministic for a fixed seed") {
    json cfg = base_config();
    const fs::path o1 = work_dir() / "det1", o2 = work_dir() / "det2";
    const fs::path p = write_config("det.json", cfg);
    REQUIRE(run_scenario(p.string(), -1, o1.string()) == kExitPass);
    REQUIRE(run_scenario(p.string(), -1, o2.string()) == kExitPass);
    const std::string r1 = slurp(o1 / "report.json");
    const std::string r2 = slurp(o2 / "report.json");
    CHECK(!r1.empty());
    CHECK(r1 == r2);  // byte-identical; wall times live in timing.json
    CHECK(fs::exists(o1 / "timing.json"));
}

TEST_CASE("overrides replace config values only when supplied") {
    json cfg = base_config();
    const fs::path o = work_dir() / "ovr";
    const fs::path p = write_config("ovr.json", cfg);
    REQUIRE(run_scenario(p.string(), 123, o.string(), 2.0) == kExitPass);
    const json rep = json::parse(slurp(o / "report.json"));
    CHECK(rep.at("seed").get<std::uint64_t>() == 123);
    CHECK(rep.at("tol_scale").get<double>() == 2.0);
    CHECK(rep.at("pass").get<bool>());
    // without overrides the config values win
    const fs::path o2 = work_dir() / "ovr2";
    REQUIRE(run_scenario(p.string(), -1, o2.string()) == kExitPass);
    const json rep2 = json::parse(slurp(o2 / "report.json"));
    CHECK(rep2.at("seed").get<std::uint64_t>() == 5);
    CHECK(rep2.at("tol_scale").get<double>() == 1.0);
}

TEST_CASE("radial CSV has the stable header and full grid") {
    json cfg = base_config();
    const fs::path o = work_dir() / "csv";
    const fs::path p = write_config("csv.json", cfg);
    REQUIRE(run_scenario(p.string(), -1, o.string()) == kExitPass);
    std::ifstream is(o / "radial.csv");
    REQUIRE(is.good());
    std::string header;
    std::getline(is, header);
    CHECK(header == "r,u,du,U,residual");
    int rows = 0;
    for (std::string line; std::getline(is, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 2000);
}

TEST_CASE("bundled scenarios all pass") {
    const fs::path dir(SCENARIO_DIR);
    REQUIRE(fs::exists(dir));
    int found = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        ++found;
        const fs::path o =
            work_dir() / "bundled" / entry.path().stem().string();
        INFO("scenario: ", entry.path().string());
        CHECK(run_scenario(entry.path().string(), -1, o.string()) ==
              kExitPass);
        CHECK(fs::exists(o / "report.json"));
    }
    CHECK(found >= 4);
}

TEST_CASE("CLI binary honors the same exit-code contract") {
    CHECK(run_cli("run " + (work_dir() / "no_such.json").string()) ==
          kExitIo);
    CHECK(run_cli("thresholds --n 3 --k 2 --l 0 --m 3") == kExitPass);
    // n = 2 thresholds are out of hypothesis -> config error
    CHECK(run_cli("thresholds --n 2 --k 2 --l 0 --m 2") == kExitConfig);
    const fs::path o = work_dir() / "cli-run";
    const fs::path p = write_config("cli.json", base_config());
    CHECK(run_cli("run " + p.string() + " --out " + o.string()) == kExitPass);
    CHECK(fs::exists(o / "report.json"));
}
