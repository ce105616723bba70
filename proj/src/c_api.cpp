#include "dsf/dsf.h"

#include "dsf/analytics.hpp"
#include "dsf/config.hpp"
#include "dsf/engine.hpp"
#include "dsf/error.hpp"
#include "dsf/experiments.hpp"
#include "dsf/graphs.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

struct dsf_graph {
    dsf::RegularGraph graph;
};

struct dsf_experiment {
    dsf::ExperimentConfig config;
};

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

thread_local std::string g_last_error;

dsf_status fail(dsf_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <class F>
dsf_status guarded(F&& f) {
    try {
        g_last_error.clear();
        return f();
    } catch (const dsf::ConfigError& e) {
        return fail(DSF_ERR_CONFIG, e.what());
    } catch (const dsf::InvalidArgument& e) {
        return fail(DSF_ERR_INVALID_ARGUMENT, e.what());
    } catch (const dsf::EventCeilingExceeded& e) {
        return fail(DSF_ERR_ABORTED, e.what());
    } catch (const dsf::IoError& e) {
        return fail(DSF_ERR_IO, e.what());
    } catch (const dsf::UnsupportedRange& e) {
        return fail(DSF_ERR_UNSUPPORTED, e.what());
    } catch (const dsf::GenerationFailed& e) {
        return fail(DSF_ERR_INVALID_ARGUMENT, e.what());
    } catch (const json::exception& e) {
        return fail(DSF_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DSF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(DSF_ERR_INTERNAL, e.what());
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool ok, const char* msg) {
    if (!ok) throw dsf::InvalidArgument(msg);
}

void fill(const dsf::HaltingSample& s, dsf_halting_sample* out) {
    out->T = s.T;
    out->t_last = s.t_last;
    out->m0 = s.m0;
    out->events = s.events;
    out->seed = s.seed;
}

class Params {
public:
    explicit Params(const char* text) {
        if (text && *text) doc_ = json::parse(text);
        if (doc_.is_null()) doc_ = json::object();
        if (!doc_.is_object()) throw dsf::InvalidArgument("parameters must be a JSON object");
    }
    double number(const char* key) const {
        const auto it = doc_.find(key);
        if (it == doc_.end() || !it->is_number())
            throw dsf::InvalidArgument(std::string("missing numeric parameter '") + key + "'");
        return it->get<double>();
    }
    std::uint64_t count(const char* key) const {
        const double x = number(key);
        if (!(x >= 0.0) || x != static_cast<double>(static_cast<std::uint64_t>(x)))
            throw dsf::InvalidArgument(std::string("parameter '") + key + "' must be a nonnegative integer");
        return static_cast<std::uint64_t>(x);
    }
    int order(const char* key) const {
        const std::uint64_t p = count(key);
        if (p > 1000) throw dsf::InvalidArgument(std::string("parameter '") + key + "' is too large");
        return static_cast<int>(p);
    }

private:
    json doc_;
};

ordered_json analytic(std::string fn, const Params& p) {
    using namespace dsf;
    std::replace(fn.begin(), fn.end(), '_', '-');
    if (fn == "pdf") {
        const double tau = p.number("tau");
        return {{"tau", tau}, {"value", scaled_halting_pdf(tau)}};
    }
    if (fn == "cdf") {
        const double tau = p.number("tau");
        return {{"tau", tau}, {"value", scaled_halting_cdf(tau)}};
    }
    if (fn == "mu") {
        const auto m = normalized_moment(p.order("p"));
        return {{"p", m.p}, {"rational", m.str()}, {"float", m.to_double()}};
    }
    if (fn == "moment") {
        const int k = p.order("p");
        return {{"p", k}, {"value", scaled_moment(k)}};
    }
    if (fn == "mean-T") {
        const double N = p.number("N");
        const auto m0 = p.count("m0");
        return {{"N", N}, {"m0", m0}, {"value", mean_halting_finite(N, m0)}};
    }
    if (fn == "hypoexp-pdf") {
        const double N = p.number("N"), T = p.number("T");
        const auto m0 = p.count("m0");
        return {{"N", N}, {"m0", m0}, {"T", T}, {"value", hypoexp_halting_pdf(N, m0, T)}};
    }
    if (fn == "laplace-Q") {
        const double sigma = p.number("sigma");
        return {{"sigma", sigma}, {"value", laplace_Q(sigma)}};
    }
    if (fn == "laplace-Q-finite") {
        const double s = p.number("s"), N = p.number("N");
        const auto m0 = p.count("m0");
        return {{"s", s}, {"N", N}, {"m0", m0}, {"value", laplace_Q_finite(s, N, m0)}};
    }
    if (fn == "cumulants") {
        const double t = p.number("t");
        const CumulantSolution sol(p.number("n0"), p.number("v0"), p.number("w0"));
        return {{"t", t}, {"n", sol.n(t)}, {"v", sol.v(t)}, {"w", sol.w(t)}};
    }
    if (fn == "occupancy-cumulants") {
        const auto V = p.count("V");
        const double N = p.number("N");
        const auto ic = occupancy_cumulants(V, N);
        return {{"V", V}, {"N", N}, {"n0", ic.n0}, {"v0", ic.v0}, {"w0", ic.w0}};
    }
    if (fn == "last-step-pdf") {
        const double N = p.number("N"), t = p.number("t");
        return {{"N", N}, {"t", t}, {"value", last_step_pdf(N, t)}};
    }
    if (fn == "joint-R") {
        const double tau = p.number("tau");
        return {{"tau", tau}, {"value", joint_R(tau)}};
    }
    if (fn == "joint-moment") {
        const int k = p.order("p");
        return {{"p", k}, {"value", joint_moment(k)}};
    }
    if (fn == "joint-pdf") {
        const double tau = p.number("tau"), tl = p.number("tau_last");
        return {{"tau", tau}, {"tau_last", tl}, {"value", scaled_joint_pdf(tau, tl)}};
    }
    if (fn == "gaussian-pdf") {
        const double m = p.number("m"), N = p.number("N"), t = p.number("t");
        const CumulantSolution sol(p.number("n0"), p.number("v0"), 0.0);
        return {{"m", m}, {"N", N}, {"t", t}, {"value", gaussian_scaling_pdf(m, N, t, sol)}};
    }
    throw InvalidArgument("unknown analytic function '" + fn + "'");
}

} // namespace

extern "C" {

const char* dsf_version(void) { return dsf::kToolVersion; }

const char* dsf_last_error(void) { return g_last_error.c_str(); }

void dsf_string_free(char* s) { std::free(s); }

dsf_status dsf_graph_create(const char* spec_json, dsf_graph** out) {
    return guarded([&] {
        require(spec_json && out, "null argument");
        *out = nullptr;
        json doc;
        try {
            doc = json::parse(spec_json);
        } catch (const json::parse_error& e) {
            throw dsf::ConfigError("graph", e.what());
        }
        const auto spec = dsf::parse_graph_spec(doc, "graph");
        *out = new dsf_graph{dsf::build_graph(spec)};
        return DSF_OK;
    });
}

void dsf_graph_free(dsf_graph* graph) { delete graph; }

dsf_status dsf_graph_vertex_count(const dsf_graph* graph, uint64_t* out) {
    return guarded([&] {
        require(graph && out, "null argument");
        *out = graph->graph.vertex_count();
        return DSF_OK;
    });
}

dsf_status dsf_graph_degree(const dsf_graph* graph, uint32_t* out) {
    return guarded([&] {
        require(graph && out, "null argument");
        *out = graph->graph.degree();
        return DSF_OK;
    });
}

dsf_status dsf_graph_neighbor(const dsf_graph* graph, uint32_t vertex, uint32_t k, uint32_t* out) {
    return guarded([&] {
        require(graph && out, "null argument");
        require(vertex < graph->graph.vertex_count(), "vertex out of range");
        require(k < graph->graph.degree(), "neighbor index out of range");
        *out = graph->graph.neighbor(vertex, k);
        return DSF_OK;
    });
}

dsf_status dsf_simulate_replica(const dsf_graph* graph, int localized, uint32_t vertex, uint64_t seed,
                                uint64_t max_events, dsf_halting_sample* out) {
    return guarded([&] {
        require(graph && out, "null argument");
        dsf::Rng rng(seed);
        const auto& g = graph->graph;
        dsf::ABState state = localized ? dsf::init_localized(g, vertex) : dsf::init_uncorrelated(g, rng);
        auto sample = dsf::run_to_halt(g, std::move(state), rng, nullptr,
                                       max_events ? max_events : dsf::RunLimits{}.max_events);
        sample.seed = seed;
        fill(sample, out);
        return DSF_OK;
    });
}

dsf_status dsf_sample_complete_fast(uint64_t N, uint64_t m0, uint64_t seed, dsf_halting_sample* out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        dsf::Rng rng(seed);
        auto sample = dsf::sample_complete_fast(N, m0, rng);
        sample.seed = seed;
        fill(sample, out);
        return DSF_OK;
    });
}

dsf_status dsf_analytic(const char* function, const char* params_json, char** out_json) {
    return guarded([&] {
        require(function && out_json, "null argument");
        *out_json = nullptr;
        const Params params(params_json);
        *out_json = copy_string(analytic(function, params).dump());
        return DSF_OK;
    });
}

dsf_status dsf_experiment_load(const char* path, dsf_experiment** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = nullptr;
        *out = new dsf_experiment{dsf::load_config(path)};
        return DSF_OK;
    });
}

dsf_status dsf_experiment_parse(const char* json_text, dsf_experiment** out) {
    return guarded([&] {
        require(json_text && out, "null argument");
        *out = nullptr;
        *out = new dsf_experiment{dsf::parse_config_text(json_text)};
        return DSF_OK;
    });
}

dsf_status dsf_experiment_set_seed(dsf_experiment* exp, uint64_t seed) {
    return guarded([&] {
        require(exp != nullptr, "null argument");
        exp->config.seed = seed;
        return DSF_OK;
    });
}

dsf_status dsf_experiment_set_workers(dsf_experiment* exp, unsigned workers) {
    return guarded([&] {
        require(exp != nullptr, "null argument");
        require(workers >= 1, "workers must be >= 1");
        exp->config.workers = workers;
        return DSF_OK;
    });
}

dsf_status dsf_experiment_run(dsf_experiment* exp, const char* mode, const char* out_dir, char** report_json) {
    return guarded([&] {
        require(exp && mode && out_dir, "null argument");
        if (report_json) *report_json = nullptr;
        const std::string m = mode;
        dsf::ExperimentReport report;
        if (m == "simulate")
            report = dsf::run_simulation(exp->config);
        else if (m == "scan")
            report = dsf::run_scaling_scan(exp->config);
        else
            throw dsf::InvalidArgument("unknown run mode '" + m + "' (simulate, scan)");
        dsf::write_outputs(report, exp->config, out_dir);
        if (report_json) *report_json = copy_string(dsf::report_to_json(report, &exp->config).dump(2));
        if (report.aborted) return fail(DSF_ERR_ABORTED, report.failure);
        return DSF_OK;
    });
}

void dsf_experiment_free(dsf_experiment* exp) { delete exp; }

dsf_status dsf_compare_csv(const char* halting_csv, double N, int moments_p_max, const char* out_dir,
                           char** report_json) {
    return guarded([&] {
        require(halting_csv != nullptr, "null argument");
        if (report_json) *report_json = nullptr;
        require(moments_p_max >= 2 && moments_p_max <= dsf::kMaxMomentOrder, "moments_p_max out of range");
        const auto samples = dsf::read_halting_csv(halting_csv);
        const auto report = dsf::compare_halting(samples, N, moments_p_max);
        auto j = dsf::report_to_json(report, nullptr);
        j["source"] = halting_csv;
        j["rate_scale_N"] = N;
        if (out_dir) {
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (ec) throw dsf::IoError(std::string("cannot create ") + out_dir);
            dsf::write_report_json((std::filesystem::path(out_dir) / "report.json").string(), j);
        }
        if (report_json) *report_json = copy_string(j.dump(2));
        return DSF_OK;
    });
}

} // extern "C"
