#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "muprobe/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "muprobe");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = muprobe::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("muprobe_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
    const fs::path p = dir / name;
    std::ofstream(p) << j.dump();
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

const fs::path kConfigs = MUPROBE_CONFIG_DIR;

}  // namespace

TEST_CASE("estimate: 0.5 q^-1 reports 0.5") {
    const fs::path out = scratch("estimate") / "out";
    const Outcome r = invoke({"estimate", "--config", (kConfigs / "estimate_delay.json").string(), "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("mu = 0.5") != std::string::npos);
    const json s = read_json(out / "summary.json");
    CHECK(s.at("mu").get<double>() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(s.at("converged").get<bool>());
    CHECK(s.at("peak_bin").get<int>() == 0);
    for (const char* key : {"peak_omega", "iterations", "restarts", "experiments"}) CHECK(s.contains(key));
    CHECK(slurp(out / "bins.csv").rfind("bin_index,omega,mu_tilde,mu_bar,converged\n", 0) == 0);
    const json m = read_json(out / "manifest.json");
    std::vector<std::string> files;
    for (const json& a : m.at("artifacts")) files.push_back(a.at("file").get<std::string>());
    CHECK(files == std::vector<std::string>{"bins.csv", "summary.json"});
    CHECK(m.at("config").at("seed").get<int>() == 1);
}

TEST_CASE("estimate: mismatched structure fails without output") {
    const fs::path dir = scratch("mismatch");
    json j = read_json(kConfigs / "estimate_delay.json");
    j["structure"] = {{"r", {0, 0}}, {"m", {1, 2}}};
    const Outcome r = invoke({"estimate", "--config", write_config(dir, "c.json", j).string(), "--out",
                              (dir / "out").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("must sum to the plant's channel count") != std::string::npos);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("estimate: --max-iter 1 reports an unconverged estimate") {
    const fs::path out = scratch("maxiter") / "out";
    const Outcome r = invoke({"estimate", "--config", (kConfigs / "estimate_random3.json").string(), "--max-iter", "1",
                              "--out", out.string(), "--quiet"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK_FALSE(read_json(out / "summary.json").at("converged").get<bool>());
}

TEST_CASE("estimate: flags outside the schema are rejected") {
    const fs::path dir = scratch("reps");
    const Outcome r = invoke({"estimate", "--config", (kConfigs / "estimate_delay.json").string(), "--reps", "3",
                              "--out", (dir / "out").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown key 'repetitions'") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("oracle: static matrices") {
    const fs::path dir = scratch("oracle");
    const json full = {{"matrix", {{2, 0}, {0, 1}}}, {"structure", {{"r", {0, 0}}, {"m", {1, 2}}}}};
    Outcome r = invoke({"oracle", "--config", write_config(dir, "a.json", full).string(), "--out",
                        (dir / "a").string()});
    CHECK(r.code == 0);
    json o = read_json(dir / "a" / "oracle.json");
    CHECK(o.at("lower").get<double>() == doctest::Approx(2.0));
    CHECK(o.at("upper").get<double>() == doctest::Approx(2.0));

    const json nil = {{"matrix", {{0, 1}, {0, 0}}}, {"structure", {{"r", {1, 2}}, {"m", {0, 0}}}}};
    r = invoke({"oracle", "--config", write_config(dir, "b.json", nil).string(), "--out", (dir / "b").string()});
    CHECK(r.code == 0);
    o = read_json(dir / "b" / "oracle.json");
    CHECK(o.at("lower").get<double>() == 0.0);

    r = invoke({"oracle", "--config", (kConfigs / "oracle_matrix.json").string(), "--out", (dir / "c").string()});
    CHECK(r.code == 0);
    o = read_json(dir / "c" / "oracle.json");
    CHECK(o.at("lower").get<double>() <= o.at("upper").get<double>() + 1e-9);

    const json bad = {{"matrix", {{1, 2}, {3}}}, {"structure", {{"m", {1, 2}}}}};
    r = invoke({"oracle", "--config", write_config(dir, "d.json", bad).string(), "--out", (dir / "d").string()});
    CHECK(r.code == 1);
    CHECK_FALSE(fs::exists(dir / "d"));
}

TEST_CASE("oracle: plant on a grid") {
    const fs::path dir = scratch("oracle_plant");
    const Outcome r = invoke({"oracle", "--config", (kConfigs / "oracle_plant.json").string(), "--n-freq", "64",
                              "--out", (dir / "o").string()});
    CHECK(r.code == 0);
    const json o = read_json(dir / "o" / "oracle.json");
    CHECK(o.at("lower").get<double>() <= o.at("upper").get<double>() + 1e-9);
    CHECK(o.at("upper").get<double>() <= o.at("hinf_grid").get<double>() + 1e-9);
}

TEST_CASE("bench: empty campaign, manifest, determinism") {
    const fs::path dir = scratch("bench");
    const json empty = {{"kind", "test2"}, {"repetitions", 0}};
    Outcome r = invoke({"bench", "--config", write_config(dir, "e.json", empty).string(), "--out",
                        (dir / "e").string(), "--quiet"});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "e" / "manifest.json"));

    const json small = {{"kind", "test2"}, {"n_list", {2}}, {"repetitions", 2}, {"N", 32}};
    const fs::path cfg = write_config(dir, "s.json", small);
    for (const char* sub : {"s1", "s2"}) {
        r = invoke({"bench", "--config", cfg.string(), "--seed", "7", "--out", (dir / sub).string(), "--quiet"});
        CHECK(r.code == 0);
    }
    const json m = read_json(dir / "s1" / "manifest.json");
    CHECK(m.at("config").at("seed").get<int>() == 7);
    for (const json& a : m.at("artifacts")) {
        const std::string f = a.at("file").get<std::string>();
        REQUIRE(fs::exists(dir / "s1" / f));
        CHECK(slurp(dir / "s1" / f) == slurp(dir / "s2" / f));
    }
    CHECK(slurp(dir / "s1" / "manifest.json") == slurp(dir / "s2" / "manifest.json"));

    r = invoke({"bench", "--config", write_config(dir, "x.json", json{{"kind", "test9"}}).string(), "--out",
                (dir / "x").string()});
    CHECK(r.code == 1);
    CHECK_FALSE(fs::exists(dir / "x"));
}

TEST_CASE("help lists every flag") {
    const Outcome r = invoke({"estimate", "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--config", "--seed", "--n-freq", "--tol", "--noise", "--reps", "--max-iter", "--out",
                             "--quiet"})
        CHECK(r.out.find(flag) != std::string::npos);
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"estimate", "--seed", "abc"}).code == 1);
}
