#include "dsf/experiments.hpp"

#include "dsf/analytics.hpp"
#include "dsf/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace dsf {

using nlohmann::ordered_json;

double Comparison::deviation() const {
    switch (kind) {
    case ToleranceKind::relative: return std::abs(estimate - reference) / std::abs(reference);
    case ToleranceKind::absolute: return std::abs(estimate - reference);
    case ToleranceKind::standard_errors:
        return standard_error > 0.0 ? std::abs(estimate - reference) / standard_error
                                    : (estimate == reference ? 0.0 : std::numeric_limits<double>::infinity());
    case ToleranceKind::ks_critical: return estimate;
    }
    return std::numeric_limits<double>::infinity();
}

bool Comparison::within_tolerance() const { return deviation() <= tolerance; }

ordered_json Comparison::to_json() const {
    static constexpr const char* kinds[] = {"relative", "absolute", "standard_errors", "ks_critical"};
    ordered_json j;
    j["observable"] = observable;
    j["estimate"] = estimate;
    j["standard_error"] = standard_error;
    j["reference"] = reference;
    j["reference_name"] = reference_name;
    j["tolerance"] = {{"kind", kinds[static_cast<int>(kind)]}, {"value", tolerance}};
    j["deviation"] = deviation();
    j["within_tolerance"] = within_tolerance();
    j["conjectural"] = conjectural;
    return j;
}

bool ExperimentReport::all_within_tolerance() const {
    return std::all_of(comparisons.begin(), comparisons.end(),
                       [](const Comparison& c) { return c.conjectural || c.within_tolerance(); });
}

std::uint64_t require_seed(const ExperimentConfig& config) {
    if (!config.seed) throw ConfigError("seed", "a master seed is required (config 'seed' or --seed)");
    return *config.seed;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ReplicaRecord {
    HaltingSample sample;
    bool halted = false;
    std::vector<std::int64_t> trace;
};

template <class R>
struct ReplicaBatch {
    std::vector<std::optional<R>> results;
    bool aborted = false;
    std::string failure;
};

// Runs task(i) for i in [0, count) on `workers` threads. Event-ceiling aborts
// stop the dispatch and are reported; any other error propagates.
template <class R, class Task>
ReplicaBatch<R> run_batch(std::uint64_t count, unsigned workers, Task&& task) {
    ReplicaBatch<R> batch;
    batch.results.resize(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                batch.results[i] = task(i);
            } catch (...) {
                errors[i] = std::current_exception();
                stop = true;
            }
        }
    };
    const unsigned n_threads = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), count));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const EventCeilingExceeded& e) {
            batch.aborted = true;
            batch.failure = "replica " + std::to_string(i) + ": " + e.what();
        }
        break;
    }
    return batch;
}

bool is_complete(const GraphSpec& g) { return std::holds_alternative<Complete>(g); }

EngineKind resolve_engine(const ExperimentConfig& c, const GraphSpec& g, bool need_trace) {
    if (c.engine != EngineKind::automatic) return c.engine;
    return is_complete(g) && !need_trace ? EngineKind::fast : EngineKind::ab;
}

ReplicaRecord simulate_replica(const RegularGraph& graph, const ExperimentConfig& c, EngineKind engine,
                               std::uint64_t master, std::uint64_t index, const std::vector<double>* grid,
                               double horizon) {
    const std::uint64_t seed = derive_stream_seed(master, index);
    Rng rng(seed);
    ReplicaRecord rec;
    const std::uint64_t V = graph.vertex_count();

    if (engine == EngineKind::fast) {
        const std::uint64_t m0 =
            c.initial_condition == InitialCondition::localized ? V - 1 : sample_empty_count(V, rng);
        if (m0 > 0) rec.sample = sample_complete_fast(V - 1, m0, rng);
        rec.sample.seed = seed;
        rec.halted = true;
        return rec;
    }

    std::optional<TraceObserver> observer;
    if (grid) observer.emplace(*grid);
    TraceObserver* obs = observer ? &*observer : nullptr;
    const RunLimits limits{c.max_events, horizon};

    auto finish = [&](const auto& state, RunStatus status) {
        rec.halted = status == RunStatus::halted;
        rec.sample.T = state.clock;
        rec.sample.m0 = state.m0;
        rec.sample.events = state.events;
        rec.sample.t_last = rec.halted && state.m0 > 0 ? state.clock - state.m1_since : 0.0;
        rec.sample.seed = seed;
        if (observer) rec.trace = observer->values();
    };

    if (engine == EngineKind::piles) {
        PileState s = c.initial_condition == InitialCondition::localized
                          ? init_piles_localized(graph, c.localized_vertex)
                          : init_piles_uncorrelated(graph, rng);
        finish(s, advance_piles(graph, s, rng, obs, limits));
    } else {
        ABState s = c.initial_condition == InitialCondition::localized ? init_localized(graph, c.localized_vertex)
                                                                       : init_uncorrelated(graph, rng);
        finish(s, advance(graph, s, rng, obs, limits));
    }
    return rec;
}

ordered_json summary_json(const SampleSummary& s) {
    ordered_json j;
    j["count"] = s.count;
    j["mean"] = s.mean;
    j["se_mean"] = s.se_mean;
    j["variance"] = s.variance;
    j["se_variance"] = s.se_variance;
    j["k3"] = s.k3;
    j["se_k3"] = s.se_k3;
    ordered_json moments = ordered_json::array();
    for (std::size_t p = 1; p <= s.normalized_moments.size(); ++p)
        moments.push_back({{"p", p}, {"value", s.normalized_moments[p - 1]}, {"se", s.se_normalized_moments[p - 1]}});
    j["normalized_moments"] = moments;
    return j;
}

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

// ---------------------------------------------------------------- halting --

void analyze_halting(ExperimentReport& report, std::span<const HaltingSample> samples, double N, bool complete,
                     int p_max, bool last_step) {
    ordered_json h;
    h["rate_scale_N"] = N;
    h["replicas"] = samples.size();
    if (samples.size() < 4) {
        h["note"] = "fewer than 4 replicas; no summary statistics";
        report.details["halting"] = h;
        return;
    }
    std::vector<double> tau(samples.size()), tl(samples.size()), joint1(samples.size()), joint2(samples.size());
    double finite_mean = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        tau[i] = samples[i].T / N;
        tl[i] = samples[i].t_last / N;
        joint1[i] = tau[i] * tl[i];
        joint2[i] = tau[i] * tl[i] * tl[i];
        if (complete && samples[i].m0 > 0) finite_mean += mean_halting_finite(1.0, samples[i].m0);
    }
    finite_mean /= static_cast<double>(samples.size());

    const auto sT = summarize(tau, p_max);
    h["T_over_N"] = summary_json(sT);
    if (!complete) {
        if (last_step) h["t_last_over_N"] = summary_json(summarize(tl, 3));
        report.details["halting"] = h;
        return;
    }

    const auto sl = summarize(tl, 3);
    const auto sj1 = summarize(joint1, 1);
    const auto sj2 = summarize(joint2, 1);
    if (last_step) h["t_last_over_N"] = summary_json(sl);
    h["finite_size_mean_T_over_N"] = finite_mean;

    auto& cmp = report.comparisons;
    cmp.push_back({"mean(T)/N", "pi^2/6 (scaled mean halting time)", sT.mean, sT.se_mean, kZeta2, 0.02,
                   ToleranceKind::relative});
    cmp.push_back({"mean(T)/N", "sum_{m<=m0} m^-2 averaged over replicas (exact finite-size mean)", sT.mean,
                   sT.se_mean, finite_mean, 4.0, ToleranceKind::standard_errors});
    cmp.push_back({"mu_2", "7/5 (normalized second moment)", sT.normalized_moment(2), sT.se_normalized_moment(2),
                   1.4, 0.05, ToleranceKind::relative});
    for (int p = 3; p <= std::min(p_max, 5); ++p) {
        const auto mu = normalized_moment(p);
        cmp.push_back({"mu_" + std::to_string(p), mu.str() + " (normalized moment)", sT.normalized_moment(p),
                       sT.se_normalized_moment(p), mu.to_double(), 4.0, ToleranceKind::standard_errors});
    }
    const auto ks = ks_one_sample(tau, [](double x) { return x > 0.0 ? scaled_halting_cdf(x) : 0.0; });
    cmp.push_back({"ks_distance(T/N)", "scaled halting CDF sum_k (-1)^k exp(-k^2 tau)", ks.distance, 0.0,
                   0.0, ks.critical_01, ToleranceKind::ks_critical});
    h["ks_scaled_cdf"] = {{"distance", ks.distance}, {"critical_05", ks.critical_05}, {"critical_01", ks.critical_01}};

    if (last_step) {
        cmp.push_back({"mean(t_last)/N", "1 (exponential last step)", sl.mean, sl.se_mean, 1.0, 0.05,
                       ToleranceKind::relative});
        cmp.push_back({"<t_last^2>/<t_last>^2", "2! (exponential last step)", sl.normalized_moment(2),
                       sl.se_normalized_moment(2), 2.0, 0.05, ToleranceKind::relative});
        cmp.push_back({"<t_last^3>/<t_last>^3", "3! (exponential last step)", sl.normalized_moment(3),
                       sl.se_normalized_moment(3), 6.0, 0.10, ToleranceKind::relative});
        cmp.push_back({"<T t_last>/N^2", "pi^2/6 + 1 (joint moment p=1)", sj1.mean, sj1.se_mean, joint_moment(1),
                       0.05, ToleranceKind::relative});
        cmp.push_back({"<T t_last^2>/N^3", "2 pi^2/6 + 4 (joint moment p=2)", sj2.mean, sj2.se_mean,
                       joint_moment(2), 0.10, ToleranceKind::relative});
    }
    report.details["halting"] = h;
}

// ------------------------------------------------------------------ trace --

std::vector<double> select_times(const std::optional<std::vector<double>>& requested, const std::vector<double>& grid,
                                 double lo, double hi) {
    std::vector<double> out;
    if (requested) {
        for (double t : *requested) {
            if (!std::binary_search(grid.begin(), grid.end(), t))
                throw ConfigError("analysis", "time " + fmt_time(t) + " is not on the trace grid");
            out.push_back(t);
        }
        return out;
    }
    for (double t : grid)
        if (t >= lo && t <= hi) out.push_back(t);
    return out;
}

std::vector<double> column(const ExperimentReport& report, std::size_t k) {
    std::vector<double> out;
    out.reserve(report.traces.size());
    for (const auto& tr : report.traces)
        if (k < tr.size() && tr[k] >= 0) out.push_back(static_cast<double>(tr[k]));
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void analyze_trace_complete(ExperimentReport& report, const ExperimentConfig& c, std::uint64_t V) {
    const double N = static_cast<double>(V - 1);
    const auto ic = c.initial_condition == InitialCondition::localized ? InitialCumulants{1.0, 0.0, 0.0}
                                                                       : occupancy_cumulants(V, N);
    const CumulantSolution sol(ic.n0, ic.v0, ic.w0);
    const auto& grid = report.trace_grid;

    ordered_json rows = ordered_json::array();
    std::vector<SampleSummary> summaries(grid.size());
    std::vector<bool> have(grid.size(), false);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto m = column(report, k);
        ordered_json row{{"t", grid[k]}, {"replicas", m.size()}};
        row["n_reference"] = sol.n(grid[k]);
        row["fano2_reference"] = sol.v(grid[k]) / sol.n(grid[k]);
        row["fano3_reference"] = sol.w(grid[k]) / sol.n(grid[k]);
        if (m.size() >= 4) {
            summaries[k] = summarize(m, 1);
            have[k] = true;
            const auto& s = summaries[k];
            row["mean_m_over_N"] = s.mean / N;
            row["var_over_mean"] = s.mean > 0 ? s.variance / s.mean : 0.0;
            row["k3_over_mean"] = s.mean > 0 ? s.k3 / s.mean : 0.0;
        }
        rows.push_back(row);
    }
    ordered_json tr;
    tr["rate_scale_N"] = N;
    tr["initial_cumulants"] = {{"n0", ic.n0}, {"v0", ic.v0}, {"w0", ic.w0}};
    tr["rows"] = rows;

    auto index_of = [&](double t) {
        return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
    };
    auto& cmp = report.comparisons;
    for (double t : select_times(c.analysis.mean_times, grid, 1e-300, 0.01 * N)) {
        const auto k = index_of(t);
        if (!have[k]) continue;
        cmp.push_back({"mean(m)/N at t=" + fmt_time(t), "n(t) mean-field density", summaries[k].mean / N,
                       summaries[k].se_mean / N, sol.n(t), 0.01, ToleranceKind::relative});
    }
    for (double t : select_times(c.analysis.fano_times, grid, 0.001 * N, 0.01 * N)) {
        const auto k = index_of(t);
        if (!have[k] || !(summaries[k].mean > 0)) continue;
        const auto& s = summaries[k];
        cmp.push_back({"var(m)/mean(m) at t=" + fmt_time(t), "1/3 (variance Fano factor)", s.variance / s.mean,
                       s.se_variance / s.mean, 1.0 / 3.0, 0.10, ToleranceKind::relative});
        cmp.push_back({"k3(m)/mean(m) at t=" + fmt_time(t), "1/15 (third-cumulant Fano factor)", s.k3 / s.mean,
                       s.se_k3 / s.mean, 1.0 / 15.0, 0.25, ToleranceKind::relative});
    }
    ordered_json gauss = ordered_json::array();
    for (double t : select_times(c.analysis.gaussian_times, grid, 1.0, 0.01 * N)) {
        const auto k = index_of(t);
        const double var = N * sol.v(t);
        const auto m = column(report, k);
        if (m.empty() || !(var > 0.0)) continue;
        std::vector<double> xi(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) xi[i] = (m[i] - N * sol.n(t)) / std::sqrt(var);
        const auto ks = ks_one_sample(xi, normal_cdf);
        cmp.push_back({"ks_distance(standardized m) at t=" + fmt_time(t), "standard normal CDF (Gaussian scaling)",
                       ks.distance, 0.0, 0.0, ks.critical_01, ToleranceKind::ks_critical});
        gauss.push_back({{"t", t}, {"distance", ks.distance}, {"critical_01", ks.critical_01}});
    }
    tr["gaussian_ks"] = gauss;
    report.details["trace"] = tr;
}

// ------------------------------------------------------------------ decay --

double dimension_of(const GraphSpec& g) {
    if (const auto* t = std::get_if<Torus>(&g)) return t->d;
    if (std::holds_alternative<Ring>(g)) return 1.0;
    return kInf;
}

void analyze_decay(ExperimentReport& report, const ExperimentConfig& c, const GraphSpec& g, std::uint64_t V) {
    const auto& grid = report.trace_grid;
    const double Vd = static_cast<double>(V);
    std::vector<std::vector<double>> density;
    for (const auto& tr : report.traces) {
        std::vector<double> row(grid.size());
        bool complete_trace = true;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            complete_trace = complete_trace && tr[k] >= 0;
            row[k] = static_cast<double>(tr[k]) / Vd;
        }
        if (complete_trace) density.push_back(std::move(row));
    }
    ordered_json dj;
    dj["vertices"] = V;
    dj["replicas"] = density.size();
    if (density.empty()) {
        report.details["decay"] = dj;
        return;
    }
    std::vector<double> mean(grid.size(), 0.0);
    for (const auto& r : density)
        for (std::size_t k = 0; k < grid.size(); ++k) mean[k] += r[k];
    for (double& x : mean) x /= static_cast<double>(density.size());
    ordered_json rows = ordered_json::array();
    for (std::size_t k = 0; k < grid.size(); ++k) rows.push_back({{"t", grid[k]}, {"density", mean[k]}});
    dj["rows"] = rows;

    const double d = dimension_of(g);
    const double late_reference = d < 4.0 ? -d / 4.0 : -1.0;
    const BootstrapOptions boot{c.bootstrap_resamples, derive_stream_seed(*c.seed, 0xdeca7)};

    auto first_positive = std::find_if(grid.begin(), grid.end(), [](double t) { return t > 0.0; });
    const auto window = c.analysis.decay_window.value_or(
        std::pair<double, double>{first_positive == grid.end() ? 0.0 : *first_positive, grid.back()});
    auto fit_json = [](const DecayFit& f) {
        return ordered_json{{"slope", f.slope},         {"intercept", f.intercept}, {"ci_half_width", f.ci_half_width},
                            {"t_lo", f.t_lo},           {"t_hi", f.t_hi},           {"points", f.points}};
    };
    const auto fit = decay_exponent(grid, density, window.first, window.second, boot);
    dj["fit"] = fit_json(fit);
    dj["reference_mean_field"] = -1.0;
    dj["reference_low_dimension"] = d < 4.0 ? -d / 4.0 : -1.0;
    report.comparisons.push_back({"decay exponent on [" + fmt_time(window.first) + ", " + fmt_time(window.second) + "]",
                                  d < 4.0 ? "-d/4 (two-species annihilation decay)" : "-1 (mean-field decay)",
                                  fit.slope, fit.ci_half_width / 1.96, late_reference, 0.05, ToleranceKind::absolute,
                                  d != 1.0});
    if (c.analysis.early_window) {
        const auto early = decay_exponent(grid, density, c.analysis.early_window->first,
                                          c.analysis.early_window->second, boot);
        dj["early_fit"] = fit_json(early);
        report.comparisons.push_back({"decay exponent on [" + fmt_time(early.t_lo) + ", " + fmt_time(early.t_hi) + "]",
                                      "-1 (mean-field transient)", early.slope, early.ci_half_width / 1.96, -1.0, 0.3,
                                      ToleranceKind::absolute, true});
    }
    if (grid.front() == 0.0 && density.size() >= 4) {
        std::vector<double> d0;
        for (const auto& r : density) d0.push_back(r[0]);
        const auto s = summarize(d0, 1);
        const auto ic = occupancy_cumulants(V, Vd);
        report.comparisons.push_back({"density at t=0", "exp(-1) occupancy limit, exact finite-V value", s.mean,
                                      s.se_mean, ic.n0, 3.0, ToleranceKind::standard_errors});
    }
    report.details["decay"] = dj;
}

// ------------------------------------------------------------------- core --

ExperimentReport simulate(const ExperimentConfig& c) {
    if (!c.graph) throw ConfigError("graph", "a single graph is required for this experiment");
    const std::uint64_t master = require_seed(c);
    const GraphSpec& spec = *c.graph;
    const bool want_trace = c.observables.trace;
    const EngineKind engine = resolve_engine(c, spec, want_trace);
    if (engine == EngineKind::fast && !is_complete(spec))
        throw ConfigError("engine", "the fast sampler requires a complete graph");
    if (engine == EngineKind::fast && want_trace) throw ConfigError("engine", "the fast sampler cannot record traces");

    const RegularGraph graph = build_graph(spec);
    const std::uint64_t V = graph.vertex_count();
    const double horizon = c.observables.halting ? kInf : c.trace_times.back();
    const std::vector<double>* grid = want_trace ? &c.trace_times : nullptr;

    auto batch = run_batch<ReplicaRecord>(c.replicas, c.workers, [&](std::uint64_t i) {
        return simulate_replica(graph, c, engine, master, i, grid, horizon);
    });

    ExperimentReport report;
    report.experiment = c.observables.halting && want_trace ? "halting+trace" : (want_trace ? "trace" : "halting");
    report.aborted = batch.aborted;
    report.failure = batch.failure;
    if (want_trace) report.trace_grid = c.trace_times;
    for (std::uint64_t i = 0; i < batch.results.size(); ++i) {
        auto& r = batch.results[i];
        if (!r) continue;
        report.replica_index.push_back(i);
        if (c.observables.halting) report.halting.push_back(r->sample);
        if (want_trace) report.traces.push_back(std::move(r->trace));
    }
    report.details["graph"] = describe(spec);
    report.details["vertices"] = V;
    report.details["engine"] = to_string(engine);
    report.details["initial_condition"] = to_string(c.initial_condition);
    if (report.aborted) return report;

    if (c.observables.halting) {
        const double N = is_complete(spec) ? static_cast<double>(V - 1) : static_cast<double>(V);
        analyze_halting(report, report.halting, N, is_complete(spec), c.analysis.moments_p_max,
                        c.observables.last_step);
    }
    if (want_trace) {
        if (is_complete(spec))
            analyze_trace_complete(report, c, V);
        else
            analyze_decay(report, c, spec, V);
    }
    return report;
}

} // namespace

ExperimentReport run_simulation(const ExperimentConfig& config) { return simulate(config); }

ExperimentReport run_halting_experiment(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    c.observables.halting = true;
    c.observables.trace = false;
    return simulate(c);
}

ExperimentReport run_trace_experiment(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    if (!c.graph || !is_complete(*c.graph)) throw ConfigError("graph", "trace experiments require a complete graph");
    if (c.trace_times.empty()) throw ConfigError("trace", "a trace grid is required");
    c.observables.halting = false;
    c.observables.trace = true;
    return simulate(c);
}

ExperimentReport run_density_decay(const ExperimentConfig& config) {
    ExperimentConfig c = config;
    if (!c.graph || is_complete(*c.graph))
        throw ConfigError("graph", "density decay experiments require a ring, torus or random regular graph");
    if (c.trace_times.empty()) throw ConfigError("trace", "a trace grid is required");
    c.observables.halting = false;
    c.observables.trace = true;
    ExperimentReport report = simulate(c);
    report.experiment = "decay";
    return report;
}

ExperimentReport compare_halting(std::span<const HaltingSample> samples, double N, int moments_p_max) {
    if (!(N > 0.0)) throw InvalidArgument("compare requires a positive rate scale N");
    if (samples.size() < 4) throw InvalidArgument("compare requires at least 4 samples");
    ExperimentReport report;
    report.experiment = "compare";
    report.halting.assign(samples.begin(), samples.end());
    analyze_halting(report, samples, N, true, moments_p_max, true);
    return report;
}

ExperimentReport run_scaling_scan(const ExperimentConfig& c) {
    if (!c.sweep) throw ConfigError("sweep", "a size sweep is required for a scan");
    if (c.sweep->sizes.size() < 3) throw ConfigError("sweep.sizes", "a scan needs at least 3 sizes");
    const std::uint64_t master = require_seed(c);
    const SweepSpec& sweep = *c.sweep;

    ExperimentReport report;
    report.experiment = "scan";
    std::vector<double> fit_sizes;
    std::vector<std::vector<double>> T_sets, tlast_sets;
    std::vector<double> var_values, var_errors;

    for (std::size_t si = 0; si < sweep.sizes.size(); ++si) {
        const GraphSpec spec = sweep.graph_for(sweep.sizes[si]);
        const RegularGraph graph = build_graph(spec);
        const EngineKind engine = resolve_engine(c, spec, false);
        const std::uint64_t size_master = derive_stream_seed(master, 0x5ca0'0000ULL + si);
        auto batch = run_batch<ReplicaRecord>(c.replicas, c.workers, [&](std::uint64_t i) {
            return simulate_replica(graph, c, engine, size_master, i, nullptr, kInf);
        });

        ScanRow row;
        row.size = sweep.sizes[si];
        row.vertices = graph.vertex_count();
        row.aborted = batch.aborted;
        row.failure = batch.failure;
        std::vector<double> T, tl;
        for (auto& r : batch.results) {
            if (!r) continue;
            T.push_back(r->sample.T);
            tl.push_back(r->sample.t_last);
        }
        row.completed = T.size();
        if (T.size() >= 4) {
            const auto sT = summarize(T, 1);
            const auto sl = summarize(tl, 1);
            row.mean_T = sT.mean;
            row.se_T = sT.se_mean;
            row.var_T = sT.variance;
            row.se_var_T = sT.se_variance;
            row.mean_tlast = sl.mean;
            row.se_tlast = sl.se_mean;
            if (!row.aborted && row.mean_T > 0 && row.var_T > 0 && row.mean_tlast > 0) {
                fit_sizes.push_back(static_cast<double>(row.vertices));
                T_sets.push_back(std::move(T));
                tlast_sets.push_back(std::move(tl));
                var_values.push_back(row.var_T);
                var_errors.push_back(row.se_var_T);
            }
        }
        report.scaling.push_back(row);
    }
    if (std::any_of(report.scaling.begin(), report.scaling.end(), [](const ScanRow& r) { return r.aborted; })) {
        report.aborted = true;
        report.failure = "event ceiling reached for at least one size";
    }

    ordered_json sj;
    sj["topology"] = describe(sweep.graph_for(sweep.sizes.front()));
    sj["axis"] = "number of vertices N";
    if (fit_sizes.size() < 3) {
        sj["note"] = "fewer than 3 sizes completed; no fits";
        report.details["scan"] = sj;
        return report;
    }
    const BootstrapOptions boot{c.bootstrap_resamples, derive_stream_seed(master, 0xb007)};
    const auto fT = loglog_fit_replicas(fit_sizes, T_sets, boot);
    const auto fl = loglog_fit_replicas(fit_sizes, tlast_sets, boot);
    const auto fv = loglog_fit(fit_sizes, var_values, var_errors, boot);
    auto fit_json = [](const ScalingFit& f) {
        return ordered_json{{"slope", f.slope}, {"intercept", f.intercept}, {"ci_half_width", f.slope_ci_half_width}};
    };
    sj["fit_mean_T"] = fit_json(fT);
    sj["fit_mean_tlast"] = fit_json(fl);
    sj["fit_var_T"] = fit_json(fv);
    report.details["scan"] = sj;

    auto& cmp = report.comparisons;
    switch (sweep.topology) {
    case SweepTopology::complete:
        cmp.push_back({"slope mean(T) vs N", "1 (linear halting time on complete graphs)", fT.slope,
                       fT.slope_ci_half_width / 1.96, 1.0, 0.1, ToleranceKind::absolute});
        cmp.push_back({"slope mean(t_last) vs N", "1 (exponential last step with mean N)", fl.slope,
                       fl.slope_ci_half_width / 1.96, 1.0, 0.1, ToleranceKind::absolute});
        cmp.push_back({"slope var(T) vs N", "2 (non-self-averaging halting time)", fv.slope,
                       fv.slope_ci_half_width / 1.96, 2.0, 0.2, ToleranceKind::absolute});
        break;
    case SweepTopology::ring:
    case SweepTopology::torus: {
        const double d = sweep.topology == SweepTopology::ring ? 1.0 : sweep.d;
        const double t_ref = d < 4.0 ? 4.0 / d : 1.0;
        const double t_tol = d == 2.0 ? 0.4 : 0.5;
        cmp.push_back({"slope mean(T) vs N", d < 4.0 ? "4/d (conjectured halting scaling)" : "1 (conjectured)",
                       fT.slope, fT.slope_ci_half_width / 1.96, t_ref, t_tol, ToleranceKind::absolute, true});
        const double l_ref = d == 1.0 ? 2.0 : 1.0;
        cmp.push_back({"slope mean(t_last) vs N",
                       d == 1.0 ? "2 (target hitting time, d=1)"
                                : (d == 2.0 ? "1 up to log N (target hitting time, d=2)" : "1 (target hitting time)"),
                       fl.slope, fl.slope_ci_half_width / 1.96, l_ref, 0.3, ToleranceKind::absolute, true});
        break;
    }
    case SweepTopology::random_regular:
        cmp.push_back({"slope mean(T) vs N", "1 (expected for effectively infinite-dimensional graphs)", fT.slope,
                       fT.slope_ci_half_width / 1.96, 1.0, 0.2, ToleranceKind::absolute, true});
        break;
    }
    return report;
}

} // namespace dsf
