#include "dsf/engine.hpp"

#include "dsf/error.hpp"

#include <algorithm>
#include <string>

namespace dsf {

TraceObserver::TraceObserver(std::vector<double> grid) : grid_(std::move(grid)), values_(grid_.size(), -1) {}

TraceObserver observe_m_trace(std::vector<double> grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw InvalidArgument("trace grid times must be nonnegative");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("trace grid must be strictly increasing");
    }
    return TraceObserver(std::move(grid));
}

void ABState::check_invariants() const {
    if (a_index.size() != m) throw InvalidArgument("A count differs from B count");
    std::uint64_t b = 0, a = 0;
    for (std::size_t v = 0; v < b_flag.size(); ++v) {
        b += b_flag[v];
        a += a_count[v];
        if (b_flag[v] && a_count[v] > 0) throw InvalidArgument("A and B share vertex " + std::to_string(v));
    }
    if (b != m) throw InvalidArgument("B flags disagree with m");
    if (a != m) throw InvalidArgument("per-vertex A counts disagree with m");
}

std::uint64_t PileState::particle_count() const noexcept {
    std::uint64_t n = 0;
    for (const auto& s : stacks) n += s.size();
    return n;
}

void PileState::check_invariants() const {
    if (particle_count() != stacks.size()) throw InvalidArgument("particle count differs from vertex count");
    std::uint64_t empty = 0;
    for (const auto& s : stacks) empty += s.empty();
    if (empty != m) throw InvalidArgument("empty-vertex count disagrees with m");
    if (mobile.size() != m) throw InvalidArgument("mobile particle count differs from empty-vertex count");
}

std::vector<std::uint32_t> sample_occupancy(std::uint64_t V, Rng& rng) {
    std::vector<std::uint32_t> occ(V, 0);
    for (std::uint64_t i = 0; i < V; ++i) ++occ[rng.below(V)];
    return occ;
}

std::uint64_t sample_empty_count(std::uint64_t V, Rng& rng) {
    const auto occ = sample_occupancy(V, rng);
    return static_cast<std::uint64_t>(std::count(occ.begin(), occ.end(), 0u));
}

ABState ab_from_occupancy(std::span<const std::uint32_t> occupancy) {
    ABState s;
    const std::size_t V = occupancy.size();
    s.a_count.assign(V, 0);
    s.b_flag.assign(V, 0);
    for (std::size_t v = 0; v < V; ++v) {
        if (occupancy[v] == 0) {
            s.b_flag[v] = 1;
            ++s.m;
        } else {
            s.a_count[v] = occupancy[v] - 1;
            for (std::uint32_t k = 1; k < occupancy[v]; ++k) s.a_index.push_back(static_cast<Vertex>(v));
        }
    }
    if (s.a_index.size() != s.m) throw InvalidArgument("occupancy must place exactly one particle per vertex on average");
    s.m0 = s.m;
    return s;
}

ABState init_uncorrelated(const RegularGraph& graph, Rng& rng) {
    const auto occ = sample_occupancy(graph.vertex_count(), rng);
    return ab_from_occupancy(occ);
}

ABState init_localized(const RegularGraph& graph, Vertex vertex) {
    const std::uint64_t V = graph.vertex_count();
    if (vertex >= V) throw InvalidArgument("localized vertex " + std::to_string(vertex) + " out of range");
    std::vector<std::uint32_t> occ(V, 0);
    occ[vertex] = static_cast<std::uint32_t>(V);
    return ab_from_occupancy(occ);
}

namespace {

void finalize_piles(PileState& s) {
    for (std::size_t v = 0; v < s.stacks.size(); ++v) {
        if (s.stacks[v].empty()) ++s.m;
        for (std::size_t k = 1; k < s.stacks[v].size(); ++k) s.mobile.push_back(static_cast<Vertex>(v));
    }
    s.m0 = s.m;
}

} // namespace

PileState init_piles_uncorrelated(const RegularGraph& graph, Rng& rng) {
    const std::uint64_t V = graph.vertex_count();
    PileState s;
    s.stacks.resize(V);
    for (std::uint64_t i = 0; i < V; ++i) s.stacks[rng.below(V)].push_back(static_cast<std::uint32_t>(i));
    finalize_piles(s);
    return s;
}

PileState init_piles_localized(const RegularGraph& graph, Vertex vertex) {
    const std::uint64_t V = graph.vertex_count();
    if (vertex >= V) throw InvalidArgument("localized vertex " + std::to_string(vertex) + " out of range");
    PileState s;
    s.stacks.resize(V);
    for (std::uint64_t i = 0; i < V; ++i) s.stacks[vertex].push_back(static_cast<std::uint32_t>(i));
    finalize_piles(s);
    return s;
}

ABState ab_from_piles(const PileState& piles) {
    std::vector<std::uint32_t> occ(piles.stacks.size());
    for (std::size_t v = 0; v < occ.size(); ++v) occ[v] = static_cast<std::uint32_t>(piles.stacks[v].size());
    ABState s = ab_from_occupancy(occ);
    s.clock = piles.clock;
    s.events = piles.events;
    s.m0 = piles.m0;
    s.m1_since = piles.m1_since;
    return s;
}

namespace {

[[noreturn]] void ceiling_hit(std::uint64_t max_events, std::uint64_t m, double clock) {
    throw EventCeilingExceeded("event ceiling of " + std::to_string(max_events) + " reached with m=" +
                               std::to_string(m) + " at t=" + std::to_string(clock));
}

} // namespace

RunStatus advance(const RegularGraph& graph, ABState& s, Rng& rng, TraceObserver* observer,
                  const RunLimits& limits) {
    const std::uint32_t r = graph.degree();
    while (s.m > 0) {
        const double t_next = s.clock + rng.exponential(static_cast<double>(s.a_index.size()));
        if (observer) observer->advance(t_next, s.m);
        if (t_next > limits.horizon) {
            s.clock = limits.horizon;
            return RunStatus::horizon_reached;
        }
        if (s.events >= limits.max_events) ceiling_hit(limits.max_events, s.m, s.clock);
        s.clock = t_next;
        ++s.events;

        const std::size_t i = rng.below(s.a_index.size());
        const Vertex from = s.a_index[i];
        const Vertex to = graph.neighbor(from, static_cast<std::uint32_t>(rng.below(r)));
        --s.a_count[from];
        if (s.b_flag[to]) {
            s.b_flag[to] = 0;
            s.a_index[i] = s.a_index.back();
            s.a_index.pop_back();
            if (--s.m == 1) s.m1_since = s.clock;
        } else {
            ++s.a_count[to];
            s.a_index[i] = to;
        }
    }
    if (observer) observer->finish(0);
    return RunStatus::halted;
}

RunStatus advance_piles(const RegularGraph& graph, PileState& s, Rng& rng, TraceObserver* observer,
                        const RunLimits& limits) {
    const std::uint32_t r = graph.degree();
    while (s.m > 0) {
        const double t_next = s.clock + rng.exponential(static_cast<double>(s.mobile.size()));
        if (observer) observer->advance(t_next, s.m);
        if (t_next > limits.horizon) {
            s.clock = limits.horizon;
            return RunStatus::horizon_reached;
        }
        if (s.events >= limits.max_events) ceiling_hit(limits.max_events, s.m, s.clock);
        s.clock = t_next;
        ++s.events;

        // uniform over mobile particles: uniform entry picks the pile with
        // weight (size - 1), then a uniform non-bottom slot within it
        const std::size_t i = rng.below(s.mobile.size());
        const Vertex from = s.mobile[i];
        auto& src = s.stacks[from];
        const std::size_t slot = 1 + rng.below(src.size() - 1);
        const std::uint32_t particle = src[slot];
        src.erase(src.begin() + static_cast<std::ptrdiff_t>(slot));

        const Vertex to = graph.neighbor(from, static_cast<std::uint32_t>(rng.below(r)));
        auto& dst = s.stacks[to];
        const bool filled = dst.empty();
        dst.push_back(particle);
        if (filled) {
            s.mobile[i] = s.mobile.back();
            s.mobile.pop_back();
            if (--s.m == 1) s.m1_since = s.clock;
        } else {
            s.mobile[i] = to;
        }
    }
    if (observer) observer->finish(0);
    return RunStatus::halted;
}

namespace {

template <class State>
HaltingSample to_sample(const State& s) {
    HaltingSample out;
    out.T = s.clock;
    out.m0 = s.m0;
    out.events = s.events;
    out.t_last = s.m0 == 0 ? 0.0 : s.clock - s.m1_since;
    return out;
}

} // namespace

HaltingSample run_to_halt(const RegularGraph& graph, ABState state, Rng& rng, TraceObserver* observer,
                          std::uint64_t max_events) {
    if (state.m == 1 && state.events == 0) state.m1_since = state.clock;
    advance(graph, state, rng, observer, RunLimits{max_events});
    return to_sample(state);
}

HaltingSample run_to_halt_piles(const RegularGraph& graph, PileState state, Rng& rng, TraceObserver* observer,
                                std::uint64_t max_events) {
    if (state.m == 1 && state.events == 0) state.m1_since = state.clock;
    advance_piles(graph, state, rng, observer, RunLimits{max_events});
    return to_sample(state);
}

HaltingSample sample_complete_fast(std::uint64_t N, std::uint64_t m0, Rng& rng) {
    if (N < 1) throw InvalidArgument("sample_complete_fast requires N >= 1");
    if (m0 < 1) throw InvalidArgument("sample_complete_fast requires m0 >= 1");
    HaltingSample out;
    out.m0 = m0;
    out.events = m0;
    const double n = static_cast<double>(N);
    double total = 0.0;
    for (std::uint64_t m = m0; m >= 1; --m) {
        const double md = static_cast<double>(m);
        const double t = rng.exponential(md * md / n);
        total += t;
        if (m == 1) out.t_last = t;
    }
    out.T = total;
    return out;
}

} // namespace dsf
