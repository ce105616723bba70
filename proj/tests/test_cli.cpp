#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(DSF_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto dir = fs::temp_directory_path() / "dsf_cli_test";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("analytic subcommand") {
    auto r = run("analytic mu --p 2");
    CHECK(r.code == 0);
    CHECK(r.out == "{\"p\":2,\"rational\":\"7/5\",\"float\":1.4}\n");
    r = run("analytic mu --p 5");
    CHECK(nlohmann::json::parse(r.out)["rational"] == "219/11");
    r = run("analytic pdf --tau 1.0");
    CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == doctest::Approx(0.591452).epsilon(1e-6));
    r = run("analytic mean-T --N 10 --m0 1");
    CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == 10.0);
    CHECK(run("analytic bogus").code == 2);
    CHECK(run("analytic pdf --tau -1").code == 2);
}

TEST_CASE("usage errors") {
    CHECK(run("").code == 2);
    CHECK(run("simulate").code == 2);
    CHECK(run("simulate --config /nonexistent.json --seed 1").code == 2);
    CHECK(run("--help").code == 0);
}

TEST_CASE("simulate writes outputs and is reproducible") {
    const auto cfg = write_config("c.json", R"({"graph": {"kind": "complete", "V": 101}, "replicas": 200})");
    const auto base = fs::temp_directory_path() / "dsf_cli_test";
    fs::remove_all(base / "a");
    fs::remove_all(base / "b");
    CHECK(run("simulate --config " + cfg.string() + " --out " + (base / "a").string()).code == 2);  // no seed
    auto r = run("simulate --quiet --config " + cfg.string() + " --seed 3 --out " + (base / "a").string());
    CHECK(r.code == 0);
    r = run("simulate --quiet --config " + cfg.string() + " --seed 3 --workers 2 --out " + (base / "b").string());
    CHECK(r.code == 0);
    const auto a = slurp(base / "a" / "halting.csv");
    CHECK(a == slurp(base / "b" / "halting.csv"));
    int lines = 0;
    for (char ch : a) lines += ch == '\n';
    CHECK(lines == 201);

    r = run("compare --quiet " + (base / "a" / "halting.csv").string() + " --N 100");
    CHECK(r.code == 2);  // compare has no --quiet
    r = run("compare " + (base / "a" / "halting.csv").string() + " --N 100");
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).contains("comparisons"));
    CHECK(run("compare /nonexistent.csv --N 100").code == 2);
}

TEST_CASE("config errors name the field") {
    const auto cfg = write_config("bad.json", R"({"graph": {"kind": "complete", "V": 101}, "replicas": 0, "seed": 1})");
    const auto r = run("simulate --config " + cfg.string());
    CHECK(r.code == 2);
    CHECK(r.out.find("replicas") != std::string::npos);
}

TEST_CASE("event ceiling exits with 3") {
    const auto cfg = write_config(
        "ceiling.json", R"({"graph": {"kind": "ring", "L": 300}, "replicas": 2, "seed": 1, "max_events": 100})");
    const auto out = fs::temp_directory_path() / "dsf_cli_test" / "ceiling";
    const auto r = run("simulate --quiet --config " + cfg.string() + " --out " + out.string());
    CHECK(r.code == 3);
    CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("undersized scan exits with 2") {
    const auto cfg = write_config("scan.json", R"({"sweep": {"kind": "ring", "sizes": [8, 16]}, "replicas": 2, "seed": 1})");
    CHECK(run("scan --config " + cfg.string()).code == 2);
}
