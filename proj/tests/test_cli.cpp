#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "treequery/cli.hpp"

using namespace treequery;
namespace fs = std::filesystem;

namespace {

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::vector<const char*> argv;
    argv.push_back("treequery");
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("treequery-cli-" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& text) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << text;
        return p.string();
    }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream text;
    text << in.rdbuf();
    return text.str();
}

const char* kChain = R"({"nodes": ["A", "B", "C"], "directed": [["A", "B"], ["B", "C"]]})";

struct NoKey {
    std::string saved;
    bool had = false;
    NoKey() {
        if (const char* v = std::getenv("TREEQUERY_API_KEY")) {
            had = true;
            saved = v;
        }
        unsetenv("TREEQUERY_API_KEY");
    }
    ~NoKey() {
        if (had) setenv("TREEQUERY_API_KEY", saved.c_str(), 1);
    }
};

} // namespace

TEST_CASE("the panel-size calculator prints a bare integer") {
    std::string out;
    CHECK(cli({"theory", "--experts-for", "0.95", "--stages", "4", "--alpha", "0.3"}, &out) == 0);
    CHECK(out == "55\n");
}

TEST_CASE("the bound calculator reports both stage accountings") {
    std::string out;
    CHECK(cli({"theory", "--bound", "--experts", "101", "--alpha", "0.3", "--edges", "10"},
              &out) == 0);
    CHECK(out.find("bound(M=4, m=101, alpha=0.3) = 0.998761") != std::string::npos);
    CHECK(out.find("bound(M=9, m=101, alpha=0.3) = 0.997213") != std::string::npos);
    CHECK(out.find("expected correct edges over 10 = 9.987613") != std::string::npos);
}

TEST_CASE("theory requires exactly one mode") {
    std::string err;
    CHECK(cli({"theory"}, nullptr, &err) == 1);
    CHECK(err.find("exactly one of") != std::string::npos);
    CHECK(cli({"theory", "--bound", "--experts-for", "0.9"}, nullptr, &err) == 1);
}

TEST_CASE("discover writes a graph, decisions, and a config snapshot") {
    TempDir dir;
    const auto truth = dir.file("truth.json", kChain);
    const auto out_dir = dir.sub("disc");
    std::string out;
    REQUIRE(cli({"discover", "--graph", truth, "--out", out_dir}, &out) == 0);
    CHECK(out.find("3 variables, 2 directed and 0 bidirected") != std::string::npos);

    const auto doc = nlohmann::json::parse(slurp(out_dir + "/discovered.json"));
    CHECK(doc["kind"] == "discovery");
    CHECK(doc["decisions"].size() == 3);
    CHECK(doc["config"]["seed"] == 0);
    CHECK(doc["config"]["backend"] == "simulated");
    CHECK(doc["graph"]["directed"].size() == 2);
    CHECK(nlohmann::json::parse(slurp(out_dir + "/config.json"))["kind"] == "config");

    std::string check;
    CHECK(cli({"validate", out_dir + "/discovered.json"}, &check) == 0);
    CHECK(check.find("ok: discovered graph") != std::string::npos);
    CHECK(cli({"validate", out_dir + "/config.json"}, &check) == 0);
}

TEST_CASE("discover pair mode emits one decision") {
    TempDir dir;
    const auto truth = dir.file("truth.json", kChain);
    const auto out_dir = dir.sub("pair");
    std::string out;
    REQUIRE(cli({"discover", "--graph", truth, "--pair", "A", "B", "--out", out_dir}, &out) == 0);
    CHECK(out.find("A -> B (confidence 1.00)") != std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(out_dir + "/pair.json"));
    CHECK(doc["kind"] == "pair_decision");
    CHECK(doc["relation"] == "->");
    std::string check;
    CHECK(cli({"validate", out_dir + "/pair.json"}, &check) == 0);
    CHECK(check.find("ok: pair decision A -> B") != std::string::npos);
}

TEST_CASE("discover rejects inconsistent input modes") {
    TempDir dir;
    const auto truth = dir.file("truth.json", kChain);
    std::string err;
    CHECK(cli({"discover", "--graph", truth, "--graphless"}, nullptr, &err) == 1);
    CHECK(err.find("either --graph or --graphless") != std::string::npos);
    CHECK(cli({"discover", "--graphless", "--vars", "A"}, nullptr, &err) == 1);
    CHECK(err.find("at least two names") != std::string::npos);
    CHECK(cli({"discover"}, nullptr, &err) == 1);
    CHECK(cli({"discover", "--graphless", "--vars", "A,B,C"}, nullptr, &err) == 1);
    CHECK(err.find("truth graph") != std::string::npos);
}

TEST_CASE("graphless pairs need the remote backend and its token") {
    NoKey guard;
    std::string err;
    CHECK(cli({"discover", "--pair", "A", "B", "--graphless", "--vars", "A,B,C", "--backend",
               "remote"},
              nullptr, &err) == 1);
    CHECK(err.find("TREEQUERY_API_KEY") != std::string::npos);
}

TEST_CASE("a failed run leaves no partial outputs") {
    TempDir dir;
    const auto truth = dir.file("truth.json", kChain);
    const auto out_dir = dir.sub("never");
    std::string err;
    CHECK(cli({"discover", "--graph", truth, "--pair", "A", "A", "--out", out_dir}, nullptr,
              &err) == 1);
    CHECK_FALSE(fs::exists(out_dir));
}

TEST_CASE("config files load first and flags override them") {
    TempDir dir;
    const auto truth = dir.file("truth.json", kChain);
    const auto cfg = dir.file("cfg.json", R"({"alpha": 0.25, "seed": 9, "tau": 0.8})");
    const auto out_dir = dir.sub("cfgrun");
    REQUIRE(cli({"discover", "--graph", truth, "--config", cfg, "--alpha", "0", "--out",
                 out_dir}) == 0);
    const auto doc = nlohmann::json::parse(slurp(out_dir + "/config.json"));
    CHECK(doc["alpha"] == 0.0); // flag wins
    CHECK(doc["seed"] == 9);    // file survives
    CHECK(doc["tau"] == 0.8);

    std::string err;
    CHECK(cli({"discover", "--graph", truth, "--config", dir.sub("missing.json")}, nullptr,
              &err) == 1);
    CHECK(err.find("cannot open") != std::string::npos);
}

TEST_CASE("benchmark runs are byte-identical under a fixed config") {
    TempDir dir;
    dir.file("chain.json", kChain);
    const auto manifest =
        dir.file("manifest.json", R"({"suite": "standard", "graphs": ["chain.json"]})");
    const auto out_dir = dir.sub("bench");
    std::string out;
    REQUIRE(cli({"benchmark", "--manifest", manifest, "--runs", "2", "--alpha", "0.2", "--seed",
                 "5", "--out", out_dir},
                &out) == 0);
    CHECK(out.find("| Method | Suite | NDCG | SHD |") != std::string::npos);
    const std::string first_json = slurp(out_dir + "/report.json");
    const std::string first_md = slurp(out_dir + "/report.md");

    REQUIRE(cli({"benchmark", "--manifest", manifest, "--runs", "2", "--alpha", "0.2", "--seed",
                 "5", "--out", out_dir}) == 0);
    CHECK(slurp(out_dir + "/report.json") == first_json);
    CHECK(slurp(out_dir + "/report.md") == first_md);

    const auto doc = nlohmann::json::parse(first_json);
    CHECK(doc["config"]["backend"] == "simulated");
    CHECK(doc["config"]["alpha"] == 0.2);

    std::string check;
    CHECK(cli({"validate", out_dir + "/report.json"}, &check) == 0);
    CHECK(check.find("ok: benchmark report with 2 cell(s)") != std::string::npos);
    CHECK(cli({"validate", out_dir + "/report.md"}, &check) == 0);
}

TEST_CASE("the suite flag overrides the manifest") {
    TempDir dir;
    dir.file("latent.json",
             R"({"nodes": ["A", "B", "H"], "directed": [["H", "A"], ["H", "B"]],)"
             R"( "hidden": ["H"]})");
    const auto manifest =
        dir.file("manifest.json", R"({"suite": "standard", "graphs": ["latent.json"]})");
    const auto out_dir = dir.sub("bench");
    REQUIRE(cli({"benchmark", "--manifest", manifest, "--suite", "latent", "--out", out_dir}) ==
            0);
    const auto doc = nlohmann::json::parse(slurp(out_dir + "/report.json"));
    CHECK(doc["config"]["suite"] == "latent");
    CHECK(doc["aggregate"]["shd_mean"] == 0.0);
}

TEST_CASE("an all-failing benchmark leaves nothing behind") {
    TempDir dir;
    dir.file("hidden.json",
             R"({"nodes": ["A", "B", "H"], "directed": [["H", "A"], ["H", "B"]],)"
             R"( "hidden": ["H"]})");
    const auto manifest =
        dir.file("manifest.json", R"({"suite": "standard", "graphs": ["hidden.json"]})");
    const auto out_dir = dir.sub("bench");
    std::string err;
    CHECK(cli({"benchmark", "--manifest", manifest, "--out", out_dir}, nullptr, &err) == 1);
    CHECK(err.find("error:") != std::string::npos);
    CHECK_FALSE(fs::exists(out_dir));
}

TEST_CASE("screen reads a stages file and writes a trace") {
    TempDir dir;
    const auto truth = dir.file(
        "truth.json",
        R"({"nodes": ["diet", "weight", "exercise"],)"
        R"( "directed": [["diet", "weight"], ["exercise", "weight"]]})");
    const auto stages = dir.file("stages.json",
                                 R"({"treatment": "diet", "outcome": "weight",)"
                                 R"( "stages": [["diet", "weight"],)"
                                 R"( ["diet", "weight", "exercise"]]})");
    const auto out_dir = dir.sub("screen");
    std::string out;
    REQUIRE(cli({"screen", "--stages", stages, "--graph", truth, "--out", out_dir}, &out) == 0);
    CHECK(out.find("stage 1: 2 variables, diet -> weight, confidence 1.00, confounding 0.00") !=
          std::string::npos);
    CHECK(out.find("stage 2: 3 variables") != std::string::npos);

    const auto doc = nlohmann::json::parse(slurp(out_dir + "/screening.json"));
    CHECK(doc["kind"] == "screening_trace");
    CHECK(doc["stages"].size() == 2);
    std::string check;
    CHECK(cli({"validate", out_dir + "/screening.json"}, &check) == 0);
    CHECK(check.find("ok: screening trace with 2 stage(s)") != std::string::npos);

    // Bare-array stage files take the endpoints from flags instead.
    const auto bare = dir.file("bare.json", R"([["diet", "weight"]])");
    const auto out2 = dir.sub("screen2");
    REQUIRE(cli({"screen", "--stages", bare, "--treatment", "diet", "--outcome", "weight",
                 "--graph", truth, "--out", out2}) == 0);
    std::string err;
    CHECK(cli({"screen", "--stages", bare, "--graph", truth}, nullptr, &err) == 1);
    CHECK(err.find("treatment and outcome") != std::string::npos);
}

TEST_CASE("theory sweeps emit a csv that validate accepts") {
    TempDir dir;
    const auto spec = dir.file(
        "sweep.json", R"({"m": [5], "alpha": [0.0, 0.3], "M": [4], "trials": 40,)"
                      R"( "relations": ["->", "independent"]})");
    const auto out_dir = dir.sub("sweep");
    std::string out;
    REQUIRE(cli({"theory", "--sweep", spec, "--seed", "3", "--out", out_dir}, &out) == 0);
    CHECK(out.find("wrote 4 row(s)") != std::string::npos);

    const std::string csv = slurp(out_dir + "/sweep.csv");
    CHECK(csv.rfind("m,alpha,M,trials,relation,bound,empirical,stderr\n", 0) == 0);
    std::string check;
    CHECK(cli({"validate", out_dir + "/sweep.csv"}, &check) == 0);
    CHECK(check.find("ok: sweep csv with 4 row(s)") != std::string::npos);
    CHECK(cli({"validate", out_dir + "/config.json"}, &check) == 0);
    CHECK(check.find("ok: config snapshot") != std::string::npos);
}

TEST_CASE("validate rejects what nothing emits") {
    TempDir dir;
    std::string err;
    CHECK(cli({"validate", dir.sub("absent.json")}, nullptr, &err) == 1);
    const auto weird = dir.file("weird.json", R"({"kind": "mystery"})");
    CHECK(cli({"validate", weird}, nullptr, &err) == 1);
    CHECK(err.find("unknown document kind") != std::string::npos);
    const auto notgraph = dir.file("notes.json", R"({"text": "hello"})");
    CHECK(cli({"validate", notgraph}, nullptr, &err) == 1);
    const auto badcsv = dir.file("bad.csv", "a,b,c\n1,2,3\n");
    CHECK(cli({"validate", badcsv}, nullptr, &err) == 1);
    CHECK(err.find("unexpected header") != std::string::npos);
}

TEST_CASE("cyclic graphs validate with a warning") {
    TempDir dir;
    const auto cyclic = dir.file(
        "cycle.json",
        R"({"nodes": ["A", "B", "C"], "directed": [["A", "B"], ["B", "C"], ["C", "A"]]})");
    std::string out;
    CHECK(cli({"validate", cyclic}, &out) == 0);
    CHECK(out.find("warning: graph contains a directed cycle") != std::string::npos);
    CHECK(out.find("ok: graph") != std::string::npos);
}

TEST_CASE("usage errors exit through the parser") {
    std::string out;
    std::string err;
    CHECK(cli({"conjure"}, &out, &err) != 0);
    CHECK(cli({"--help"}, &out, &err) == 0);
    CHECK(out.find("discover") != std::string::npos);
    CHECK(cli({"benchmark"}, &out, &err) != 0); // --manifest is required
}
