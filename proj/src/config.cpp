#include "dsf/config.hpp"

#include "dsf/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dsf {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Walks one JSON object, remembering which keys were consumed so leftovers
/// can be rejected.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string field(const std::string& key) const { return join(path_, key); }

    std::uint64_t uint(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
        const json* v = find(key);
        if (!v) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "required field is missing");
        }
        return as_uint(*v, field(key));
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const json* v = find(key);
        if (!v) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "required field is missing");
        }
        if (!v->is_number()) throw ConfigError(field(key), "expected a number");
        return v->get<double>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const json* v = find(key);
        if (!v) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "required field is missing");
        }
        if (!v->is_string()) throw ConfigError(field(key), "expected a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }

    static std::uint64_t as_uint(const json& v, const std::string& where) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() < 0) throw ConfigError(where, "must be nonnegative");
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (x >= 0.0 && x < 1.8e19 && std::floor(x) == x) return static_cast<std::uint64_t>(x);
        }
        throw ConfigError(where, "expected a nonnegative integer");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(where + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

void check_increasing(const std::vector<double>& xs, const std::string& where) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] >= 0.0) || !std::isfinite(xs[i])) throw ConfigError(where, "times must be finite and nonnegative");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError(where, "times must be strictly increasing");
    }
}

SweepSpec parse_sweep(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    SweepSpec s;
    const std::string kind = r.string("kind");
    if (kind == "ring") {
        s.topology = SweepTopology::ring;
    } else if (kind == "torus") {
        s.topology = SweepTopology::torus;
        s.d = static_cast<std::uint32_t>(r.uint("d"));
    } else if (kind == "complete") {
        s.topology = SweepTopology::complete;
    } else if (kind == "random_regular") {
        s.topology = SweepTopology::random_regular;
        s.r = static_cast<std::uint32_t>(r.uint("r"));
        s.graph_seed = r.uint("graph_seed", 0);
    } else {
        throw ConfigError(r.field("kind"), "unknown sweep kind '" + kind + "'");
    }
    const json* sizes = r.find("sizes");
    if (!sizes) throw ConfigError(r.field("sizes"), "required field is missing");
    if (!sizes->is_array() || sizes->empty()) throw ConfigError(r.field("sizes"), "expected a nonempty array");
    for (std::size_t i = 0; i < sizes->size(); ++i) {
        const auto where_i = r.field("sizes") + "[" + std::to_string(i) + "]";
        s.sizes.push_back(ObjectReader::as_uint((*sizes)[i], where_i));
        if (i > 0 && s.sizes[i] <= s.sizes[i - 1]) throw ConfigError(r.field("sizes"), "sizes must be strictly increasing");
        try {
            validate(s.graph_for(s.sizes[i]));
        } catch (const InvalidArgument& e) {
            throw ConfigError(where_i, e.what());
        }
    }
    r.finish();
    return s;
}

std::vector<double> parse_trace(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    std::vector<double> grid;
    if (const json* times = r.find("times")) {
        grid = number_list(*times, r.field("times"));
    } else {
        const std::string spacing = r.string("spacing");
        const double start = r.number("start");
        const double stop = r.number("stop");
        const std::uint64_t count = r.uint("count");
        const bool include_zero = r.boolean("include_zero", false);
        if (count < 2) throw ConfigError(r.field("count"), "must be >= 2");
        if (!(stop > start)) throw ConfigError(r.field("stop"), "must exceed start");
        if (include_zero) grid.push_back(0.0);
        for (std::uint64_t i = 0; i < count; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(count - 1);
            if (spacing == "linear") {
                grid.push_back(start + f * (stop - start));
            } else if (spacing == "log") {
                if (!(start > 0.0)) throw ConfigError(r.field("start"), "log spacing requires start > 0");
                grid.push_back(i + 1 == count ? stop : start * std::pow(stop / start, f));
            } else {
                throw ConfigError(r.field("spacing"), "expected 'linear' or 'log'");
            }
        }
    }
    r.finish();
    if (grid.empty()) throw ConfigError(where, "trace grid is empty");
    check_increasing(grid, where);
    return grid;
}

std::pair<double, double> parse_window(const json& v, const std::string& where) {
    const auto w = number_list(v, where);
    if (w.size() != 2 || !(w[0] > 0.0) || !(w[1] > w[0])) throw ConfigError(where, "expected [t_lo, t_hi] with 0 < t_lo < t_hi");
    return {w[0], w[1]};
}

AnalysisOptions parse_analysis(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    AnalysisOptions a;
    auto times = [&](const char* key, std::optional<std::vector<double>>& out) {
        if (const json* t = r.find(key)) {
            out = number_list(*t, r.field(key));
            check_increasing(*out, r.field(key));
        }
    };
    times("mean_times", a.mean_times);
    times("fano_times", a.fano_times);
    times("gaussian_times", a.gaussian_times);
    if (const json* w = r.find("decay_window")) a.decay_window = parse_window(*w, r.field("decay_window"));
    if (const json* w = r.find("early_window")) a.early_window = parse_window(*w, r.field("early_window"));
    a.moments_p_max = static_cast<int>(r.uint("moments_p_max", 8));
    if (a.moments_p_max < 2 || a.moments_p_max > 12) throw ConfigError(r.field("moments_p_max"), "must lie in [2, 12]");
    r.finish();
    return a;
}

std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

GraphSpec parse_graph_spec(const json& v, const std::string& where) {
    ObjectReader r(v, where);
    const std::string kind = r.string("kind");
    GraphSpec spec;
    if (kind == "ring") {
        spec = Ring{r.uint("L")};
    } else if (kind == "torus") {
        spec = Torus{static_cast<std::uint32_t>(r.uint("d")), r.uint("L")};
    } else if (kind == "complete") {
        spec = Complete{r.uint("V")};
    } else if (kind == "random_regular") {
        spec = RandomRegular{r.uint("V"), static_cast<std::uint32_t>(r.uint("r")), r.uint("graph_seed", 0)};
    } else {
        throw ConfigError(r.field("kind"), "unknown graph kind '" + kind + "' (ring, torus, complete, random_regular)");
    }
    r.finish();
    try {
        validate(spec);
    } catch (const InvalidArgument& e) {
        throw ConfigError(where, e.what());
    }
    return spec;
}

GraphSpec SweepSpec::graph_for(std::uint64_t size) const {
    switch (topology) {
    case SweepTopology::ring: return Ring{size};
    case SweepTopology::torus: return Torus{d, size};
    case SweepTopology::complete: return Complete{size};
    case SweepTopology::random_regular: return RandomRegular{size, r, graph_seed};
    }
    return Ring{size};
}

ExperimentConfig parse_config(const json& doc) {
    ObjectReader r(doc, "");
    ExperimentConfig c;
    if (const json* g = r.find("graph")) c.graph = parse_graph_spec(*g, "graph");
    if (const json* s = r.find("sweep")) c.sweep = parse_sweep(*s, "sweep");
    if (!c.graph && !c.sweep) throw ConfigError("graph", "either 'graph' or 'sweep' is required");

    const std::string ic = r.string("initial_condition", "uncorrelated");
    if (ic == "uncorrelated") {
        c.initial_condition = InitialCondition::uncorrelated;
    } else if (ic == "localized") {
        c.initial_condition = InitialCondition::localized;
    } else {
        throw ConfigError("initial_condition", "expected 'uncorrelated' or 'localized'");
    }
    c.localized_vertex = static_cast<Vertex>(r.uint("localized_vertex", 0));
    if (c.graph && c.localized_vertex >= vertex_count(*c.graph))
        throw ConfigError("localized_vertex", "vertex index out of range");

    c.replicas = r.uint("replicas");
    if (c.replicas < 1) throw ConfigError("replicas", "must be >= 1");
    if (const json* s = r.find("seed")) c.seed = ObjectReader::as_uint(*s, "seed");
    c.workers = static_cast<unsigned>(r.uint("workers", 1));
    if (c.workers < 1) throw ConfigError("workers", "must be >= 1");

    const std::string engine = r.string("engine", "auto");
    if (engine == "auto") {
        c.engine = EngineKind::automatic;
    } else if (engine == "fast") {
        c.engine = EngineKind::fast;
    } else if (engine == "ab") {
        c.engine = EngineKind::ab;
    } else if (engine == "piles") {
        c.engine = EngineKind::piles;
    } else {
        throw ConfigError("engine", "expected 'auto', 'fast', 'ab' or 'piles'");
    }

    if (const json* t = r.find("trace")) c.trace_times = parse_trace(*t, "trace");
    if (const json* o = r.find("observables")) {
        ObjectReader obs(*o, "observables");
        c.observables.halting = obs.boolean("halting", true);
        c.observables.last_step = obs.boolean("last_step", true);
        c.observables.trace = obs.boolean("trace", false);
        obs.finish();
    }
    if (c.observables.trace && c.trace_times.empty())
        throw ConfigError("trace", "observables.trace requires a trace grid");
    if (!c.observables.halting && !c.observables.trace)
        throw ConfigError("observables", "at least one of halting or trace must be enabled");
    if (const json* a = r.find("analysis")) c.analysis = parse_analysis(*a, "analysis");

    c.max_events = r.uint("max_events", c.max_events);
    if (c.max_events < 1) throw ConfigError("max_events", "must be >= 1");
    c.bootstrap_resamples = r.uint("bootstrap_resamples", c.bootstrap_resamples);

    if (const json* o = r.find("outputs")) {
        ObjectReader out(*o, "outputs");
        c.outputs.halting_csv = out.string("halting_csv", c.outputs.halting_csv);
        c.outputs.trace_csv = out.string("trace_csv", c.outputs.trace_csv);
        c.outputs.scaling_csv = out.string("scaling_csv", c.outputs.scaling_csv);
        c.outputs.report_json = out.string("report_json", c.outputs.report_json);
        out.finish();
    }

    const bool complete_graph = c.graph && std::holds_alternative<Complete>(*c.graph);
    if (c.engine == EngineKind::fast) {
        if (c.graph && !complete_graph) throw ConfigError("engine", "the fast sampler requires a complete graph");
        if (c.sweep && c.sweep->topology != SweepTopology::complete)
            throw ConfigError("engine", "the fast sampler requires a complete-graph sweep");
        if (c.observables.trace) throw ConfigError("engine", "the fast sampler cannot record m(t) traces");
    }
    r.finish();
    return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "JSON syntax error at " + line_column(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string to_string(InitialCondition ic) { return ic == InitialCondition::localized ? "localized" : "uncorrelated"; }

std::string to_string(EngineKind engine) {
    switch (engine) {
    case EngineKind::automatic: return "auto";
    case EngineKind::fast: return "fast";
    case EngineKind::ab: return "ab";
    case EngineKind::piles: return "piles";
    }
    return "auto";
}

namespace {

json graph_json(const GraphSpec& g) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Ring>) return {{"kind", "ring"}, {"L", s.L}};
            else if constexpr (std::is_same_v<T, Torus>) return {{"kind", "torus"}, {"d", s.d}, {"L", s.L}};
            else if constexpr (std::is_same_v<T, Complete>) return {{"kind", "complete"}, {"V", s.V}};
            else return {{"kind", "random_regular"}, {"V", s.V}, {"r", s.r}, {"graph_seed", s.graph_seed}};
        },
        g);
}

const char* topology_name(SweepTopology t) {
    switch (t) {
    case SweepTopology::ring: return "ring";
    case SweepTopology::torus: return "torus";
    case SweepTopology::complete: return "complete";
    case SweepTopology::random_regular: return "random_regular";
    }
    return "ring";
}

} // namespace

json config_to_json(const ExperimentConfig& c) {
    json j;
    if (c.graph) j["graph"] = graph_json(*c.graph);
    if (c.sweep) {
        json s{{"kind", topology_name(c.sweep->topology)}, {"sizes", c.sweep->sizes}};
        if (c.sweep->topology == SweepTopology::torus) s["d"] = c.sweep->d;
        if (c.sweep->topology == SweepTopology::random_regular) {
            s["r"] = c.sweep->r;
            s["graph_seed"] = c.sweep->graph_seed;
        }
        j["sweep"] = s;
    }
    j["initial_condition"] = to_string(c.initial_condition);
    j["localized_vertex"] = c.localized_vertex;
    j["replicas"] = c.replicas;
    if (c.seed) j["seed"] = *c.seed;
    j["engine"] = to_string(c.engine);
    if (!c.trace_times.empty()) j["trace"] = {{"times", c.trace_times}};
    j["observables"] = {{"halting", c.observables.halting},
                        {"last_step", c.observables.last_step},
                        {"trace", c.observables.trace}};
    json a{{"moments_p_max", c.analysis.moments_p_max}};
    if (c.analysis.mean_times) a["mean_times"] = *c.analysis.mean_times;
    if (c.analysis.fano_times) a["fano_times"] = *c.analysis.fano_times;
    if (c.analysis.gaussian_times) a["gaussian_times"] = *c.analysis.gaussian_times;
    if (c.analysis.decay_window) a["decay_window"] = {c.analysis.decay_window->first, c.analysis.decay_window->second};
    if (c.analysis.early_window) a["early_window"] = {c.analysis.early_window->first, c.analysis.early_window->second};
    j["analysis"] = a;
    j["max_events"] = c.max_events;
    j["bootstrap_resamples"] = c.bootstrap_resamples;
    j["outputs"] = {{"halting_csv", c.outputs.halting_csv},
                    {"trace_csv", c.outputs.trace_csv},
                    {"scaling_csv", c.outputs.scaling_csv},
                    {"report_json", c.outputs.report_json}};
    // workers only affect scheduling, never results, so they stay out of the hash
    return j;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace dsf
