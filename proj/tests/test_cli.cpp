#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "credeval/cli.hpp"

using namespace credeval;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CREDEVAL_FIXTURES;

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "credeval");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("credeval_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("evaluate matches the golden files") {
    auto out = scratch("golden");
    auto r = cli({"evaluate", "--manifest", (kFixtures / "manifest.json").string(), "--labels",
                  (kFixtures / "labels.txt").string(), "--lambda", "1", "--per-instance", "--out", out.string()});
    CHECK(r.code == 0);
    for (const char* f : {"summary.jsonl", "rankings.jsonl", "per_instance.jsonl"})
        CHECK_MESSAGE(slurp(out / f) == slurp(kFixtures / "golden" / f), f);

    // a second run is byte-identical
    auto again = scratch("golden2");
    cli({"evaluate", "--manifest", (kFixtures / "manifest.json").string(), "--labels",
         (kFixtures / "labels.txt").string(), "--lambda", "1", "--per-instance", "--out", again.string()});
    CHECK(slurp(out / "per_instance.jsonl") == slurp(again / "per_instance.jsonl"));
}

TEST_CASE("evaluate options") {
    auto out = scratch("opts");
    const std::string m = (kFixtures / "manifest.json").string(), l = (kFixtures / "labels.txt").string();
    for (const char* ns : {"dubois", "smets", "korner", "cu"})
        for (const char* div : {"kl", "js"})
            for (const char* v : {"exact", "approx"}) {
                auto r = cli({"evaluate", "--manifest", m, "--labels", l, "--lambda", "0.5", "--divergence", div,
                              "--ns", ns, "--vertices", v, "--out", out.string()});
                CHECK(r.code == 0);
            }
    CHECK_FALSE(fs::exists(out / "per_instance.jsonl"));
    CHECK(cli({"evaluate", "--manifest", m, "--labels", l, "--lambda", "1", "--ns", "shannon", "--out", out.string()})
              .code == 1);
    CHECK(cli({"evaluate", "--manifest", m, "--labels", l, "--out", out.string()}).code == 1);
    CHECK(cli({"evaluate", "--manifest", m, "--labels", l, "--lambda", "-1", "--out", out.string()}).code == 1);
    CHECK(cli({"evaluate", "--manifest", "/nonexistent.json", "--labels", l, "--lambda", "1", "--out", out.string()})
              .code == 1);
    CHECK(cli({}).code == 1);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("rank writes one row per lambda") {
    auto out = scratch("rank");
    auto r = cli({"rank", "--manifest", (kFixtures / "manifest.json").string(), "--labels",
                  (kFixtures / "labels.txt").string(), "--lambdas", "0:1:0.25", "--out", out.string()});
    CHECK(r.code == 0);
    std::istringstream rows(slurp(out / "rankings.jsonl"));
    int n = 0;
    for (std::string line; std::getline(rows, line);) ++n;
    CHECK(n == 5);
    CHECK(cli({"rank", "--manifest", (kFixtures / "manifest.json").string(), "--labels",
               (kFixtures / "labels.txt").string(), "--lambdas", "0:1", "--out", out.string()})
              .code == 1);
}

TEST_CASE("failure threshold sets exit code 2") {
    auto dir = scratch("failures");
    std::ofstream(dir / "p.jsonl") << "{\"encoding\":\"point\",\"num_classes\":2}\n"
                                      "{\"id\":0,\"p\":[0.9,0.1]}\n"
                                      "{\"id\":1,\"p\":[0.9,0.3]}\n"
                                      "{\"id\":2,\"p\":[0.2,0.8]}\n";
    std::ofstream(dir / "m.json") << R"({"models":[{"id":"a","encoding":"point","num_classes":2,"predictions":"p.jsonl"}]})";
    std::ofstream(dir / "labels.txt") << "0\n1\n1\n";
    const std::string m = (dir / "m.json").string(), l = (dir / "labels.txt").string();
    auto r = cli({"evaluate", "--manifest", m, "--labels", l, "--lambda", "1", "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
    // results are still written
    CHECK(fs::exists(dir / "o" / "summary.jsonl"));
    auto ok = cli({"evaluate", "--manifest", m, "--labels", l, "--lambda", "1", "--max-failures", "0.5", "--out",
                   (dir / "o").string()});
    CHECK(ok.code == 0);
}

TEST_CASE("labels out of range are per-instance failures") {
    auto dir = scratch("labels");
    std::ofstream(dir / "p.jsonl") << "{\"encoding\":\"point\",\"num_classes\":2}\n{\"id\":0,\"p\":[0.9,0.1]}\n"
                                      "{\"id\":1,\"p\":[0.9,0.1]}\n";
    std::ofstream(dir / "m.json") << R"({"models":[{"id":"a","encoding":"point","num_classes":2,"predictions":"p.jsonl"}]})";
    std::ofstream(dir / "labels.txt") << "0\n7\n";
    auto r = cli({"evaluate", "--manifest", (dir / "m.json").string(), "--labels", (dir / "labels.txt").string(),
                  "--lambda", "1", "--out", (dir / "o").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("outside") != std::string::npos);
}

TEST_CASE("inspect prints the intermediate quantities") {
    auto r = cli({"inspect", "--manifest", (kFixtures / "manifest.json").string(), "--model", "fixture",
                  "--instance", "0", "--labels", (kFixtures / "labels.txt").string()});
    CHECK(r.code == 0);
    for (const char* s : {"lower probabilities", "masses", "vertices", "ns_dubois", "0.207944", "0.356675",
                          "credal_uncertainty", "mutual_information"})
        CHECK_MESSAGE(r.out.find(s) != std::string::npos, s);
    CHECK(cli({"inspect", "--manifest", (kFixtures / "manifest.json").string(), "--model", "nope", "--instance",
               "0"})
              .code == 1);
    CHECK(cli({"inspect", "--manifest", (kFixtures / "manifest.json").string(), "--model", "fixture",
               "--instance", "5"})
              .code == 1);
}

TEST_CASE("oracle self-test command") {
    auto r = cli({"oracle", "--self-test", "--max-classes", "4"});
    CHECK(r.code == 0);
    CHECK(r.out.find("self-test passed") != std::string::npos);
    CHECK(cli({"oracle", "--self-test", "--max-classes", "9"}).code == 1);
}
