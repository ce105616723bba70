#include "dsf/error.hpp"
#include "dsf/experiments.hpp"

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dsf {

using nlohmann::ordered_json;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

void close_out(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

} // namespace

void write_halting_csv(const std::string& path, const ExperimentReport& report) {
    auto out = open_out(path);
    out << "replica,m0,T,t_last,events,seed\n";
    for (std::size_t i = 0; i < report.halting.size(); ++i) {
        const auto& s = report.halting[i];
        const std::uint64_t idx = i < report.replica_index.size() ? report.replica_index[i] : i;
        out << idx << ',' << s.m0 << ',' << num(s.T) << ',' << num(s.t_last) << ',' << s.events << ',' << s.seed
            << '\n';
    }
    close_out(out, path);
}

void write_trace_csv(const std::string& path, const ExperimentReport& report) {
    auto out = open_out(path);
    out << "replica,t,m\n";
    for (std::size_t i = 0; i < report.traces.size(); ++i) {
        const auto& tr = report.traces[i];
        const std::uint64_t idx = i < report.replica_index.size() ? report.replica_index[i] : i;
        for (std::size_t k = 0; k < tr.size() && k < report.trace_grid.size(); ++k) {
            if (tr[k] < 0) continue;
            out << idx << ',' << num(report.trace_grid[k]) << ',' << tr[k] << '\n';
        }
    }
    close_out(out, path);
}

void write_scaling_csv(const std::string& path, const ExperimentReport& report) {
    auto out = open_out(path);
    out << "size,vertices,completed,mean_T,se_T,mean_tlast,se_tlast,var_T,se_var_T,aborted\n";
    for (const auto& r : report.scaling)
        out << r.size << ',' << r.vertices << ',' << r.completed << ',' << num(r.mean_T) << ',' << num(r.se_T) << ','
            << num(r.mean_tlast) << ',' << num(r.se_tlast) << ',' << num(r.var_T) << ',' << num(r.se_var_T) << ','
            << (r.aborted ? 1 : 0) << '\n';
    close_out(out, path);
}

ordered_json report_to_json(const ExperimentReport& report, const ExperimentConfig* config) {
    ordered_json j;
    j["tool"] = "dsf";
    j["version"] = kToolVersion;
    j["experiment"] = report.experiment;
    j["status"] = report.aborted ? "aborted" : "ok";
    if (report.aborted) j["failure"] = report.failure;
    if (config) {
        j["config_hash"] = config_hash(*config);
        if (config->seed) j["master_seed"] = *config->seed;
        j["config"] = config_to_json(*config);
    }
    j["completed_replicas"] = report.replica_index.size();
    ordered_json cmp = ordered_json::array();
    for (const auto& c : report.comparisons) cmp.push_back(c.to_json());
    j["comparisons"] = cmp;
    j["all_within_tolerance"] = report.all_within_tolerance();
    j["details"] = report.details;
    return j;
}

void write_report_json(const std::string& path, const ordered_json& report) {
    auto out = open_out(path);
    out << report.dump(2) << '\n';
    close_out(out, path);
}

std::vector<std::string> write_outputs(const ExperimentReport& report, const ExperimentConfig& config,
                                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    const fs::path dir(out_dir);
    std::vector<std::string> written;
    auto path = [&](const std::string& name) { return (dir / name).string(); };
    if (!report.halting.empty() || report.experiment == "halting" || report.experiment == "halting+trace") {
        written.push_back(path(config.outputs.halting_csv));
        write_halting_csv(written.back(), report);
    }
    if (!report.trace_grid.empty()) {
        written.push_back(path(config.outputs.trace_csv));
        write_trace_csv(written.back(), report);
    }
    if (!report.scaling.empty()) {
        written.push_back(path(config.outputs.scaling_csv));
        write_scaling_csv(written.back(), report);
    }
    written.push_back(path(config.outputs.report_json));
    write_report_json(written.back(), report_to_json(report, &config));
    return written;
}

std::vector<HaltingSample> read_halting_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "replica,m0,T,t_last,events,seed")
        throw IoError(path + ": unexpected header '" + line + "'");

    std::vector<HaltingSample> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        auto bad = [&](const std::string& what) {
            return IoError(path + ":" + std::to_string(lineno) + ": " + what);
        };
        if (f.size() != 6) throw bad("expected 6 fields");
        auto u64 = [&](const std::string& s) {
            errno = 0;
            char* end = nullptr;
            const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
            if (s.empty() || *end != '\0' || errno != 0 || s[0] == '-') throw bad("bad integer '" + s + "'");
            return static_cast<std::uint64_t>(v);
        };
        auto f64 = [&](const std::string& s) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0') throw bad("bad number '" + s + "'");
            return v;
        };
        HaltingSample s;
        u64(f[0]);
        s.m0 = u64(f[1]);
        s.T = f64(f[2]);
        s.t_last = f64(f[3]);
        s.events = u64(f[4]);
        s.seed = u64(f[5]);
        out.push_back(s);
    }
    return out;
}

} // namespace dsf
