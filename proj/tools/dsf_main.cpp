// dsf command-line front end. Talks to the library only through dsf.h.
#include "dsf/dsf.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitAbort = 3;

int exit_code(dsf_status s) {
    switch (s) {
    case DSF_OK: return kExitOk;
    case DSF_ERR_ABORTED: return kExitAbort;
    case DSF_ERR_INTERNAL: return 1;
    default: return kExitUsage;
    }
}

int report_failure(dsf_status s, const char* what) {
    std::cerr << "dsf " << what << ": " << dsf_last_error() << '\n';
    return exit_code(s);
}

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out = ".";
    bool quiet = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config, "experiment config (JSON)")->required();
    cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
    cmd->add_option("--workers", o.workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_flag("--quiet", o.quiet, "do not print the report");
}

int run_experiment(const RunOptions& o, const char* mode) {
    dsf_experiment* exp = nullptr;
    dsf_status s = dsf_experiment_load(o.config.c_str(), &exp);
    if (s != DSF_OK) return report_failure(s, mode);
    if (o.seed) s = dsf_experiment_set_seed(exp, *o.seed);
    if (s == DSF_OK && o.workers) s = dsf_experiment_set_workers(exp, *o.workers);
    char* report = nullptr;
    if (s == DSF_OK) s = dsf_experiment_run(exp, mode, o.out.c_str(), &report);
    dsf_experiment_free(exp);
    if (report && !o.quiet) std::cout << report << '\n';
    dsf_string_free(report);
    if (s != DSF_OK) return report_failure(s, mode);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic space filling and two-species annihilation: simulation and exact results"};
    app.set_version_flag("--version", std::string(dsf_version()));
    app.require_subcommand(1, 1);

    RunOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "run replicas of one graph and analyze halting and/or m(t)");
    add_run_options(simulate, sim_opts);

    RunOptions scan_opts;
    auto* scan = app.add_subcommand("scan", "size sweep of halting statistics with log-log fits");
    add_run_options(scan, scan_opts);

    std::string function;
    auto* analytic = app.add_subcommand("analytic", "evaluate an exact result");
    analytic->add_option("function", function,
                         "pdf, cdf, mu, moment, mean-T, hypoexp-pdf, laplace-Q, laplace-Q-finite, cumulants, "
                         "occupancy-cumulants, last-step-pdf, joint-R, joint-moment, joint-pdf, gaussian-pdf")
        ->required();
    const std::pair<const char*, const char*> keys[] = {
        {"tau", "scaled time T/N"},   {"tau_last", "scaled last-step time"}, {"p", "moment order"},
        {"N", "rate scale N"},        {"m0", "initial empty vertices"},     {"T", "halting time"},
        {"t", "time"},                {"sigma", "scaled Laplace variable"}, {"s", "Laplace variable"},
        {"n0", "initial density"},    {"v0", "initial scaled variance"},   {"w0", "initial third cumulant"},
        {"V", "number of vertices"},  {"m", "empty vertex count"},
    };
    std::map<std::string, std::optional<double>> raw;
    for (const auto& [key, help] : keys) {
        std::string flag = std::string("--") + key;
        if (std::string(key) == "tau_last") flag += ",--tau-last";
        analytic->add_option(flag, raw[key], help);
    }

    std::string csv;
    double compare_N = 0.0;
    int p_max = 8;
    std::optional<std::string> compare_out;
    auto* compare = app.add_subcommand("compare", "halting analysis of an existing halting.csv");
    compare->add_option("--input,input", csv, "halting.csv to analyze")->required();
    compare->add_option("--N", compare_N, "rate scale N of K_{N+1}")->required();
    compare->add_option("--p-max", p_max, "highest normalized moment compared")->capture_default_str();
    compare->add_option("--out", compare_out, "directory for report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*simulate) return run_experiment(sim_opts, "simulate");
    if (*scan) return run_experiment(scan_opts, "scan");

    if (*analytic) {
        nlohmann::json p = nlohmann::json::object();
        for (const auto& [key, value] : raw)
            if (value) p[key] = *value;
        char* out = nullptr;
        const dsf_status s = dsf_analytic(function.c_str(), p.dump().c_str(), &out);
        if (s != DSF_OK) return report_failure(s, "analytic");
        std::cout << out << '\n';
        dsf_string_free(out);
        return kExitOk;
    }

    if (*compare) {
        char* out = nullptr;
        const dsf_status s =
            dsf_compare_csv(csv.c_str(), compare_N, p_max, compare_out ? compare_out->c_str() : nullptr, &out);
        if (s != DSF_OK) return report_failure(s, "compare");
        std::cout << out << '\n';
        dsf_string_free(out);
        return kExitOk;
    }
    return kExitUsage;
}
