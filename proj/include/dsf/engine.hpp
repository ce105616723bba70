#pragma once

#include "dsf/graphs.hpp"
#include "dsf/rng.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace dsf {

/// Outcome of one replica run to halting. Times are in units where every
/// mobile particle hops at total rate 1.
struct HaltingSample {
    double T = 0.0;          ///< halting time
    double t_last = 0.0;     ///< time spent with exactly one empty vertex
    std::uint64_t m0 = 0;    ///< initial number of empty vertices
    std::uint64_t events = 0;
    std::uint64_t seed = 0;  ///< stream seed of the replica
};

/// Records the number of empty vertices m on a fixed time grid. The value at
/// grid time g is the state immediately before the first event after g.
class TraceObserver {
public:
    explicit TraceObserver(std::vector<double> grid);

    const std::vector<double>& grid() const noexcept { return grid_; }
    /// Recorded values; entries past `recorded()` have not been reached.
    const std::vector<std::int64_t>& values() const noexcept { return values_; }
    std::size_t recorded() const noexcept { return cursor_; }
    bool complete() const noexcept { return cursor_ == grid_.size(); }

    /// Called by the engines before an event at time t_next, with the current m.
    void advance(double t_next, std::uint64_t m) noexcept {
        while (cursor_ < grid_.size() && grid_[cursor_] < t_next) values_[cursor_++] = static_cast<std::int64_t>(m);
    }
    /// Fills every remaining grid point with m (used at halting, m = 0).
    void finish(std::uint64_t m) noexcept { advance(std::numeric_limits<double>::infinity(), m); }

private:
    std::vector<double> grid_;
    std::vector<std::int64_t> values_;
    std::size_t cursor_ = 0;
};

/// Throws InvalidArgument unless the grid is nonnegative and strictly increasing.
TraceObserver observe_m_trace(std::vector<double> grid);

/// Annihilation representation. A vertex with k+1 pile particles hosts k A
/// particles; an empty vertex hosts a B particle.
struct ABState {
    std::vector<std::uint32_t> a_count;  ///< A particles per vertex
    std::vector<Vertex> a_index;         ///< position of every A particle
    std::vector<std::uint8_t> b_flag;    ///< 1 if the vertex hosts B
    std::uint64_t m = 0;                 ///< number of B (= number of A)
    std::uint64_t m0 = 0;
    double clock = 0.0;
    std::uint64_t events = 0;
    double m1_since = 0.0;               ///< clock when m last became 1

    /// Throws InvalidArgument if species counts differ or A and B share a vertex.
    void check_invariants() const;
};

/// Pile representation: bottom particle first.
struct PileState {
    std::vector<std::vector<std::uint32_t>> stacks;
    std::vector<Vertex> mobile;  ///< one entry per non-bottom particle: its vertex
    std::uint64_t m = 0;         ///< empty vertices
    std::uint64_t m0 = 0;
    double clock = 0.0;
    std::uint64_t events = 0;
    double m1_since = 0.0;

    std::uint64_t particle_count() const noexcept;
    void check_invariants() const;
};

/// Occupancy of V particles dropped independently and uniformly on V vertices.
std::vector<std::uint32_t> sample_occupancy(std::uint64_t V, Rng& rng);

ABState ab_from_occupancy(std::span<const std::uint32_t> occupancy);
ABState init_uncorrelated(const RegularGraph& graph, Rng& rng);
ABState init_localized(const RegularGraph& graph, Vertex vertex);

/// Uses the same random draws as init_uncorrelated, so equal seeds give equal
/// occupancies in both representations.
PileState init_piles_uncorrelated(const RegularGraph& graph, Rng& rng);
PileState init_piles_localized(const RegularGraph& graph, Vertex vertex);
ABState ab_from_piles(const PileState& piles);

struct RunLimits {
    std::uint64_t max_events = 10'000'000'000ULL;
    double horizon = std::numeric_limits<double>::infinity();
};

enum class RunStatus { halted, horizon_reached };

/// Exact continuous-time dynamics (aggregate Gillespie): wait Exp(#A), move a
/// uniformly chosen A to a uniform neighbor, annihilate on contact with B.
/// Stops at halting or when the next event would fall past limits.horizon
/// (state.clock is then set to the horizon; by memorylessness the run may be
/// resumed). Throws EventCeilingExceeded past limits.max_events.
RunStatus advance(const RegularGraph& graph, ABState& state, Rng& rng, TraceObserver* observer,
                  const RunLimits& limits = {});
RunStatus advance_piles(const RegularGraph& graph, PileState& state, Rng& rng, TraceObserver* observer,
                        const RunLimits& limits = {});

HaltingSample run_to_halt(const RegularGraph& graph, ABState state, Rng& rng, TraceObserver* observer = nullptr,
                          std::uint64_t max_events = RunLimits{}.max_events);
HaltingSample run_to_halt_piles(const RegularGraph& graph, PileState state, Rng& rng,
                                TraceObserver* observer = nullptr,
                                std::uint64_t max_events = RunLimits{}.max_events);

/// Exact halting-time sampler on K_{N+1}: T is a sum of independent
/// Exp(m^2/N), m = 1..m0. `events` counts transitions.
HaltingSample sample_complete_fast(std::uint64_t N, std::uint64_t m0, Rng& rng);

/// Number of empty vertices after dropping V particles on V vertices.
std::uint64_t sample_empty_count(std::uint64_t V, Rng& rng);

} // namespace dsf
