#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsf/dsf.h"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

namespace {

nlohmann::ordered_json analytic(const char* fn, const char* params) {
    char* out = nullptr;
    REQUIRE(dsf_analytic(fn, params, &out) == DSF_OK);
    auto j = nlohmann::ordered_json::parse(out);
    dsf_string_free(out);
    return j;
}

} // namespace

TEST_CASE("version and errors") {
    CHECK(std::strlen(dsf_version()) > 0);
    char* out = nullptr;
    CHECK(dsf_analytic("nope", "{}", &out) == DSF_ERR_INVALID_ARGUMENT);
    CHECK(out == nullptr);
    CHECK(std::string(dsf_last_error()).find("nope") != std::string::npos);
    CHECK(dsf_analytic("pdf", "{}", &out) == DSF_ERR_INVALID_ARGUMENT);
    CHECK(dsf_analytic("pdf", "{\"tau\": -1}", &out) == DSF_ERR_INVALID_ARGUMENT);
    CHECK(dsf_analytic("hypoexp-pdf", "{\"N\": 1, \"m0\": 100, \"T\": 1}", &out) == DSF_ERR_UNSUPPORTED);
    CHECK(dsf_analytic(nullptr, "{}", &out) == DSF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("analytic values") {
    const auto mu = analytic("mu", "{\"p\": 2}");
    CHECK(mu.dump() == R"({"p":2,"rational":"7/5","float":1.4})");
    CHECK(analytic("mu", "{\"p\": 5}")["rational"] == "219/11");
    CHECK(analytic("pdf", "{\"tau\": 1.0}")["value"].get<double>() == doctest::Approx(0.591452).epsilon(1e-6));
    CHECK(analytic("mean-T", "{\"N\": 10, \"m0\": 1}")["value"].get<double>() == 10.0);
    CHECK(analytic("mean_T", "{\"N\": 10, \"m0\": 1}")["value"].get<double>() == 10.0);
    CHECK(analytic("joint-moment", "{\"p\": 1}")["value"].get<double>() == doctest::Approx(M_PI * M_PI / 6 + 1));
    const auto cum = analytic("cumulants", "{\"n0\": 1, \"v0\": 0, \"w0\": 0, \"t\": 0}");
    CHECK(cum["n"].get<double>() == 1.0);
}

TEST_CASE("graph handles") {
    dsf_graph* g = nullptr;
    REQUIRE(dsf_graph_create(R"({"kind": "ring", "L": 5})", &g) == DSF_OK);
    uint64_t V = 0;
    uint32_t r = 0, w = 0;
    CHECK(dsf_graph_vertex_count(g, &V) == DSF_OK);
    CHECK(V == 5);
    CHECK(dsf_graph_degree(g, &r) == DSF_OK);
    CHECK(r == 2);
    CHECK(dsf_graph_neighbor(g, 0, 0, &w) == DSF_OK);
    CHECK((w == 1 || w == 4));
    CHECK(dsf_graph_neighbor(g, 5, 0, &w) == DSF_ERR_INVALID_ARGUMENT);

    dsf_halting_sample a{}, b{};
    CHECK(dsf_simulate_replica(g, 0, 0, 42, 0, &a) == DSF_OK);
    CHECK(dsf_simulate_replica(g, 0, 0, 42, 0, &b) == DSF_OK);
    CHECK(a.T == b.T);
    CHECK(a.seed == 42);
    CHECK(dsf_simulate_replica(g, 1, 9, 42, 0, &a) == DSF_ERR_INVALID_ARGUMENT);
    dsf_graph_free(g);

    REQUIRE(dsf_graph_create(R"({"kind": "ring", "L": 500})", &g) == DSF_OK);
    CHECK(dsf_simulate_replica(g, 1, 0, 1, 10, &a) == DSF_ERR_ABORTED);
    dsf_graph_free(g);

    CHECK(dsf_graph_create(R"({"kind": "ring", "L": 2})", &g) == DSF_ERR_CONFIG);
    CHECK(dsf_graph_create("{", &g) == DSF_ERR_CONFIG);
    CHECK(g == nullptr);
}

TEST_CASE("fast sampler") {
    dsf_halting_sample s{};
    CHECK(dsf_sample_complete_fast(100, 20, 3, &s) == DSF_OK);
    CHECK(s.events == 20);
    CHECK(dsf_sample_complete_fast(0, 20, 3, &s) == DSF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("experiment handles") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "dsf_capi_run";
    fs::remove_all(dir);

    dsf_experiment* e = nullptr;
    CHECK(dsf_experiment_parse(R"({"graph": {"kind": "complete", "V": 101}, "replicas": 0})", &e) == DSF_ERR_CONFIG);
    CHECK(std::string(dsf_last_error()).find("replicas") != std::string::npos);
    CHECK(dsf_experiment_load("/nonexistent.json", &e) == DSF_ERR_IO);

    REQUIRE(dsf_experiment_parse(R"({"graph": {"kind": "complete", "V": 101}, "replicas": 50})", &e) == DSF_OK);
    CHECK(dsf_experiment_run(e, "simulate", dir.string().c_str(), nullptr) == DSF_ERR_CONFIG);  // no seed
    CHECK(dsf_experiment_set_seed(e, 17) == DSF_OK);
    CHECK(dsf_experiment_set_workers(e, 2) == DSF_OK);
    char* report = nullptr;
    CHECK(dsf_experiment_run(e, "simulate", dir.string().c_str(), &report) == DSF_OK);
    REQUIRE(report);
    CHECK(nlohmann::json::parse(report)["master_seed"] == 17);
    dsf_string_free(report);
    CHECK(fs::exists(dir / "halting.csv"));
    CHECK(dsf_experiment_run(e, "scan", dir.string().c_str(), nullptr) == DSF_ERR_CONFIG);
    CHECK(dsf_experiment_run(e, "dance", dir.string().c_str(), nullptr) == DSF_ERR_INVALID_ARGUMENT);
    dsf_experiment_free(e);

    char* cmp = nullptr;
    CHECK(dsf_compare_csv((dir / "halting.csv").string().c_str(), 100.0, 4, nullptr, &cmp) == DSF_OK);
    REQUIRE(cmp);
    CHECK(nlohmann::json::parse(cmp)["comparisons"].size() > 3);
    dsf_string_free(cmp);
    CHECK(dsf_compare_csv((dir / "absent.csv").string().c_str(), 100.0, 4, nullptr, &cmp) == DSF_ERR_IO);
}
