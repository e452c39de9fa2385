#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcg/capacity.hpp"
#include "mcg/cli.hpp"
#include "mcg/dp_engine.hpp"
#include "mcg/model.hpp"

using namespace mcg;

namespace {

struct RunResult {
    int code = 0;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string data_path(const std::string& name) {
    return std::string(MCG_TEST_DATA_DIR) + "/" + name;
}

} // namespace

TEST_CASE("cli: single wbar value equals the library call") {
    const RunResult r = run({"wbar", "--k", "5", "--tbud", "200", "--rate", "alpha:a=1",
                             "--params", "gamma=0.5"});
    REQUIRE(r.code == 0);
    const double got = std::stod(r.out);
    GameParams p;
    p.gamma = 0.5;
    CHECK(got == doctest::Approx(wbar(5, 200, p, LearningRate::direct_alpha(1.0)))
                     .epsilon(1e-15));
}

TEST_CASE("cli: wbar curve CSV has the stable header") {
    const RunResult r = run({"wbar", "--k-max", "4", "--tbud", "50", "--rate",
                             "alpha:a=1", "--params", "gamma=0.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("k,wbar\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
}

TEST_CASE("cli: json format wraps the same values") {
    const RunResult csv = run({"wbar", "--k", "3", "--tbud", "64", "--rate", "alpha:a=1",
                               "--params", "gamma=0.5"});
    const RunResult js = run({"wbar", "--k", "3", "--tbud", "64", "--rate", "alpha:a=1",
                              "--params", "gamma=0.5", "--format", "json"});
    REQUIRE(csv.code == 0);
    REQUIRE(js.code == 0);
    const nlohmann::json parsed = nlohmann::json::parse(js.out);
    CHECK(parsed.at("wbar").get<double>() == std::stod(csv.out));
}

TEST_CASE("cli: byte-identical output across runs") {
    const std::vector<std::string> cmd = {"simulate", "chain",  "--k",    "2",
                                          "--tbud",   "6",      "--rate", "rational:scale=5",
                                          "--params", "p=0.4,h=0.1,gamma=0.3",
                                          "--trials", "2000",   "--seed", "9"};
    const RunResult a = run(cmd);
    const RunResult b = run(cmd);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("rng,xoshiro256++/splitmix64") != std::string::npos);
}

TEST_CASE("cli: exit codes distinguish usage and regime errors") {
    CHECK(run({"wbar"}).code == 2);                        // missing required
    CHECK(run({"frobnicate"}).code == 2);                  // unknown command
    CHECK(run({"kc", "--tbud", "100", "--rate", "bogus:x=1"}).code == 2);
    // analytic bound outside its regime: c > k(1-gamma)/gamma
    const RunResult r = run({"bound", "analytic", "--k", "2", "--tbud", "100", "--d",
                             "1", "--rate", "powerlaw:d=1,a=2,offset=2", "--params",
                             "p=0.2,gamma=0.5"});
    CHECK(r.code == 3);
    CHECK(r.err.find("regime-not-covered") != std::string::npos);
    // capacity region outside its regime
    CHECK(run({"capacity", "region", "--d", "0.9", "--params", "p=0.9,gamma=0.1"}).code ==
          3);
}

TEST_CASE("cli: kcurve emits t, k_frac, diff rows") {
    const RunResult r = run({"kcurve", "--t", "4..6", "--target", "0.01", "--rate",
                             "rational:scale=50", "--params", "p=0.3,gamma=0.4"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,k_frac,diff\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
    // linear extension appends one row at the requested t
    const RunResult ext = run({"kcurve", "--t", "4..6", "--target", "0.01", "--rate",
                               "rational:scale=50", "--params", "p=0.3,gamma=0.4",
                               "--extrapolate-to", "9"});
    REQUIRE(ext.code == 0);
    CHECK(std::count(ext.out.begin(), ext.out.end(), '\n') == 5);
    CHECK(ext.out.find("\n9,") != std::string::npos);
}

TEST_CASE("cli: capacity region round trips through s and k") {
    const std::string region_file = data_path("region.json");
    const RunResult reg = run({"capacity", "region", "--d", "0.25", "--params",
                               "p=0.5,gamma=0.5", "--out", region_file});
    REQUIRE(reg.code == 0);
    std::ifstream in(region_file);
    REQUIRE(in.good());

    const RunResult s = run({"capacity", "s", "--region", region_file, "--k", "20",
                             "--t", "10"});
    REQUIRE(s.code == 0);
    CHECK(s.out.rfind("s,unbounded\n", 0) == 0);

    const RunResult k = run({"capacity", "k", "--region", region_file, "--s", "3",
                             "--t", "10"});
    REQUIRE(k.code == 0);
    const double kv = std::stod(k.out);
    const CapacityRegion r2 = region_powerlaw(0.5, 0.5, 0.25);
    CHECK(kv == doctest::Approx(k_of(r2, 3.0, 10.0)).epsilon(1e-12));

    const RunResult comp = run({"capacity", "compose", "--region", region_file,
                                "--copies", "4", "--s", "3", "--t", "10"});
    REQUIRE(comp.code == 0);
    // second CSV line is "k_total,prob_bound,games"
    const auto line_start = comp.out.find('\n') + 1;
    const auto first_comma = comp.out.find(',', line_start);
    const auto second_comma = comp.out.find(',', first_comma + 1);
    const double prob = std::stod(
        comp.out.substr(first_comma + 1, second_comma - first_comma - 1));
    CHECK(prob == doctest::Approx(0.1192617416381836).epsilon(1e-14));
}

TEST_CASE("cli: delayed regions dispatch on s through capacity k") {
    const std::string path = data_path("delayed_region.json");
    const RunResult reg = run({"capacity", "region", "--d", "0.25", "--lstar", "3",
                               "--params", "p=0.5,gamma=0.5", "--out", path});
    REQUIRE(reg.code == 0);
    const RunResult k = run({"capacity", "k", "--region", path, "--s", "2", "--t", "8"});
    REQUIRE(k.code == 0);
    GameParams p;
    p.p = 0.5;
    p.gamma = 0.5;
    const DelayedRegion d = region_delayed(region_powerlaw(0.5, 0.5, 0.25), 3, p);
    CHECK(std::stod(k.out) == doctest::Approx(k_of(d, 2.0, 8.0)).epsilon(1e-12));
}

TEST_CASE("cli: convert maps real time to move budgets") {
    const RunResult r = run({"capacity", "convert", "--t-seconds", "3600", "--k", "10",
                             "--delta-seconds", "1", "--cost-per-move", "0.05"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("36000") != std::string::npos);
    CHECK(r.out.find("1800") != std::string::npos);
}

TEST_CASE("cli: sweep emits the long-format gamma,a,k,wbar table") {
    const RunResult r = run({"sweep", "--gammas", "0.3,0.5", "--exponents",
                             "0.8..1.0:0.2", "--k-max", "3", "--tbud", "100"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("gamma,a,k,wbar\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 2 * 2 * 3);
    // spot value equals a direct evaluation
    GameParams p;
    p.gamma = 0.3;
    const double w1 = wbar(1, 100, p, LearningRate::direct_alpha(0.8));
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(line.rfind("0.3,0.8,1,", 0) == 0);
    CHECK(std::stod(line.substr(line.rfind(',') + 1)) == doctest::Approx(w1));
}

TEST_CASE("cli: config file supplies defaults without overriding flags") {
    const std::string cfg_path = data_path("config.json");
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"rate": "alpha:a=1", "params": "gamma=0.5", "tbud": 100})";
    }
    const RunResult from_cfg = run({"wbar", "--k", "2", "--config", cfg_path});
    REQUIRE(from_cfg.code == 0);
    GameParams p;
    p.gamma = 0.5;
    CHECK(std::stod(from_cfg.out) ==
          doctest::Approx(wbar(2, 100, p, LearningRate::direct_alpha(1.0))));
    // explicit flag wins over the config value
    const RunResult override_tbud =
        run({"wbar", "--k", "2", "--tbud", "50", "--config", cfg_path});
    REQUIRE(override_tbud.code == 0);
    CHECK(std::stod(override_tbud.out) ==
          doctest::Approx(wbar(2, 50, p, LearningRate::direct_alpha(1.0))));
}

TEST_CASE("cli: per-trial dump has the documented columns") {
    const std::string dump_path = data_path("trials.csv");
    const RunResult r = run({"simulate", "chain", "--k", "2", "--tbud", "6", "--rate",
                             "rational:scale=5", "--params", "p=0.4,h=0.1,gamma=0.3",
                             "--trials", "10", "--seed", "1", "--dump", dump_path});
    REQUIRE(r.code == 0);
    std::ifstream dump(dump_path);
    std::string header;
    std::getline(dump, header);
    CHECK(header == "trial,winner,steps,final_i,final_l");
    int rows = 0;
    std::string line;
    while (std::getline(dump, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);
}

TEST_CASE("cli: oracle check passes") {
    const RunResult r = run({"oracle", "check", "--seed", "0"});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("cli: epidemic curve emits hour,infected") {
    const RunResult r = run({"epidemic", "--n", "1000", "--k-vuln", "100",
                             "--scan-rate", "50", "--i0", "1", "--hours", "2",
                             "--step-hours", "0.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("hour,infected\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 6);
}
