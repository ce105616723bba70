#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsf/analytics.hpp"
#include "dsf/engine.hpp"
#include "dsf/error.hpp"
#include "dsf/stats.hpp"

#include <cmath>
#include <map>
#include <numeric>

using namespace dsf;

namespace {

// Exact mean halting time by value iteration over occupancy vectors. The
// occupancy alone is Markov: every vertex holding n >= 2 particles emits
// hops at rate n - 1, each to a uniform neighbor.
class OccupancyChain {
public:
    explicit OccupancyChain(const RegularGraph& g) : g_(g) {}

    double mean_halting(const std::vector<int>& start) {
        std::vector<std::vector<int>> states;
        std::vector<int> cur(g_.vertex_count(), 0);
        enumerate(0, static_cast<int>(g_.vertex_count()), cur, states);
        for (std::size_t i = 0; i < states.size(); ++i) index_[states[i]] = i;
        std::vector<double> E(states.size(), 0.0);
        for (int sweep = 0; sweep < 100000; ++sweep) {
            double change = 0.0;
            for (std::size_t i = 0; i < states.size(); ++i) {
                const auto& s = states[i];
                double rate = 0.0, acc = 0.0;
                for (Vertex v = 0; v < g_.vertex_count(); ++v) {
                    if (s[v] < 2) continue;
                    const double per = static_cast<double>(s[v] - 1) / g_.degree();
                    for (Vertex w : g_.neighbors(v)) {
                        auto t = s;
                        --t[v];
                        ++t[w];
                        rate += per;
                        acc += per * E[index_.at(t)];
                    }
                }
                if (rate == 0.0) continue;
                const double next = (1.0 + acc) / rate;
                change = std::max(change, std::abs(next - E[i]));
                E[i] = next;
            }
            if (change < 1e-13) break;
        }
        return E[index_.at(start)];
    }

private:
    void enumerate(std::size_t v, int left, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
        if (v + 1 == cur.size()) {
            cur[v] = left;
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            cur[v] = k;
            enumerate(v + 1, left - k, cur, out);
        }
    }

    const RegularGraph& g_;
    std::map<std::vector<int>, std::size_t> index_;
};

template <class Sampler>
SampleSummary halting_summary(std::size_t n, std::uint64_t master, Sampler&& sample) {
    std::vector<double> T(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = Rng::for_stream(master, i);
        T[i] = sample(rng).T;
    }
    return summarize(T, 2);
}

} // namespace

TEST_CASE("rng streams are reproducible and distinct") {
    Rng a(123), b(123), c(124);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    Rng d(123);
    CHECK(d() != c());
    CHECK(derive_stream_seed(1, 0) != derive_stream_seed(1, 1));
    CHECK(derive_stream_seed(1, 0) != derive_stream_seed(2, 0));
}

TEST_CASE("rng below is uniform") {
    Rng rng(5);
    const std::uint64_t n = 7;
    std::vector<double> counts(n, 0.0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
        const auto x = rng.below(n);
        REQUIRE(x < n);
        counts[x] += 1.0;
    }
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - draws / 7.0) * (c - draws / 7.0) / (draws / 7.0);
    CHECK(chi2 < 22.46);  // chi-square(6) at 0.999
}

TEST_CASE("rng exponential and normal moments") {
    Rng rng(9);
    std::vector<double> e(200000), z(200000);
    for (auto& x : e) x = rng.exponential(2.0);
    for (auto& x : z) x = rng.normal();
    const auto se = summarize(e, 2);
    const auto sz = summarize(z, 2);
    CHECK(std::abs(se.mean - 0.5) < 4 * se.se_mean);
    CHECK(std::abs(se.normalized_moment(2) - 2.0) < 4 * se.se_normalized_moment(2));
    CHECK(std::abs(sz.mean) < 4 * sz.se_mean);
    CHECK(std::abs(sz.variance - 1.0) < 4 * sz.se_variance);
}

TEST_CASE("occupancy and A/B representation") {
    Rng rng(17);
    const auto occ = sample_occupancy(1000, rng);
    CHECK(std::accumulate(occ.begin(), occ.end(), std::uint64_t{0}) == 1000);
    const auto s = ab_from_occupancy(occ);
    const auto empty = static_cast<std::uint64_t>(std::count(occ.begin(), occ.end(), 0u));
    CHECK(s.m == empty);
    CHECK(s.m0 == empty);
    CHECK(s.a_index.size() == empty);
    CHECK_NOTHROW(s.check_invariants());
}

TEST_CASE("pile and A/B initial conditions agree for equal seeds") {
    const auto g = build_graph(Torus{2, 10});
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng r1(seed), r2(seed);
        const auto ab = init_uncorrelated(g, r1);
        const auto piles = init_piles_uncorrelated(g, r2);
        CHECK(piles.particle_count() == g.vertex_count());
        CHECK_NOTHROW(piles.check_invariants());
        const auto converted = ab_from_piles(piles);
        CHECK(converted.m == ab.m);
        CHECK(converted.a_count == ab.a_count);
        CHECK(converted.b_flag == ab.b_flag);
    }
}

TEST_CASE("localized initial condition") {
    const auto g = build_graph(Ring{8});
    const auto s = init_localized(g, 3);
    CHECK(s.m == 7);
    CHECK(s.a_count[3] == 7);
    CHECK_THROWS_AS(init_localized(g, 8), InvalidArgument);
    CHECK_THROWS_AS(init_piles_localized(g, 8), InvalidArgument);
}

TEST_CASE("both engines match the exact mean halting time on small graphs") {
    struct Case {
        RegularGraph g;
        std::uint64_t master;
    };
    std::vector<Case> cases;
    cases.push_back({build_graph(Ring{4}), 1});
    cases.push_back({build_graph(Ring{5}), 2});
    cases.push_back({build_graph(Complete{5}), 3});
    cases.push_back({random_regular(6, 3, 11), 4});
    for (const auto& [g, master] : cases) {
        std::vector<int> start(g.vertex_count(), 0);
        start[0] = static_cast<int>(g.vertex_count());
        const double exact = OccupancyChain(g).mean_halting(start);
        const auto ab = halting_summary(20000, master, [&](Rng& rng) { return run_to_halt(g, init_localized(g, 0), rng); });
        const auto piles = halting_summary(
            20000, master + 100, [&](Rng& rng) { return run_to_halt_piles(g, init_piles_localized(g, 0), rng); });
        CAPTURE(g.vertex_count());
        CAPTURE(exact);
        CHECK(std::abs(ab.mean - exact) < 4 * ab.se_mean);
        CHECK(std::abs(piles.mean - exact) < 4 * piles.se_mean);
    }
}

TEST_CASE("complete graph engine agrees with the hypoexponential law") {
    // Localized start on K_11: m0 = 10, mean N sum_{m<=10} m^-2 with N = 10.
    const auto g = build_graph(Complete{11});
    const double exact = mean_halting_finite(10.0, 10);
    std::vector<double> engine(20000), fast(20000);
    for (std::size_t i = 0; i < engine.size(); ++i) {
        Rng r1 = Rng::for_stream(31, i), r2 = Rng::for_stream(32, i);
        engine[i] = run_to_halt(g, init_localized(g, 0), r1).T;
        fast[i] = sample_complete_fast(10, 10, r2).T;
    }
    const auto s = summarize(engine, 2);
    CHECK(std::abs(s.mean - exact) < 4 * s.se_mean);
    const auto ks = ks_two_sample(engine, fast);
    CHECK_FALSE(ks.rejects_at_01());
    // Closed-form CDF 1 - sum_m w_m exp(-l_m T) with l_m = m^2/N and
    // w_m = prod_{j != m} l_j / (l_j - l_m).
    std::vector<long double> w(11, 1.0L);
    for (int m = 1; m <= 10; ++m)
        for (int j = 1; j <= 10; ++j)
            if (j != m) w[m] *= static_cast<long double>(j * j) / (j * j - m * m);
    const auto ks_cdf = ks_one_sample(engine, [&](double T) {
        long double acc = 1.0L;
        for (int m = 1; m <= 10; ++m) acc -= w[m] * std::exp(-static_cast<long double>(m * m) / 10.0L * T);
        return static_cast<double>(acc);
    });
    CHECK_FALSE(ks_cdf.rejects_at_01());
}

TEST_CASE("last step duration and event count") {
    const auto g = build_graph(Complete{9});
    std::vector<double> tl(20000);
    for (std::size_t i = 0; i < tl.size(); ++i) {
        Rng rng = Rng::for_stream(41, i);
        const auto h = run_to_halt(g, init_localized(g, 0), rng);
        CHECK(h.m0 == 8);
        CHECK(h.t_last <= h.T);
        tl[i] = h.t_last;
    }
    const auto s = summarize(tl, 3);
    CHECK(std::abs(s.mean - 8.0) < 4 * s.se_mean);
    CHECK(std::abs(s.normalized_moment(2) - 2.0) < 4 * s.se_normalized_moment(2));
}

TEST_CASE("trace observer records a nonincreasing count") {
    const auto g = build_graph(Ring{50});
    Rng rng(3);
    auto obs = observe_m_trace({0.0, 1.0, 10.0, 100.0, 1e9});
    const auto state = init_uncorrelated(g, rng);
    const auto m0 = state.m0;
    const auto h = run_to_halt(g, state, rng, &obs);
    REQUIRE(obs.complete());
    CHECK(obs.values().front() == static_cast<std::int64_t>(m0));
    CHECK(obs.values().back() == 0);
    for (std::size_t k = 1; k < obs.values().size(); ++k) CHECK(obs.values()[k] <= obs.values()[k - 1]);
    CHECK(h.T < 1e9);
    CHECK_THROWS_AS(observe_m_trace({1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(observe_m_trace({-1.0}), InvalidArgument);
}

TEST_CASE("horizon stops and resumes without breaking invariants") {
    const auto g = build_graph(Torus{2, 8});
    Rng rng(77);
    auto s = init_uncorrelated(g, rng);
    RunLimits limits;
    limits.horizon = 2.0;
    const auto status = advance(g, s, rng, nullptr, limits);
    if (status == RunStatus::horizon_reached) CHECK(s.clock == 2.0);
    CHECK_NOTHROW(s.check_invariants());
    CHECK(advance(g, s, rng, nullptr) == RunStatus::halted);
    CHECK(s.m == 0);

    Rng rng2(78);
    auto p = init_piles_uncorrelated(g, rng2);
    advance_piles(g, p, rng2, nullptr, limits);
    CHECK_NOTHROW(p.check_invariants());
    CHECK(p.particle_count() == g.vertex_count());
    CHECK(advance_piles(g, p, rng2, nullptr) == RunStatus::halted);
    CHECK(p.m == 0);
    CHECK_NOTHROW(p.check_invariants());
}

TEST_CASE("event ceiling aborts") {
    const auto g = build_graph(Ring{200});
    Rng rng(1);
    CHECK_THROWS_AS(run_to_halt(g, init_localized(g, 0), rng, nullptr, 10), EventCeilingExceeded);
    Rng rng2(1);
    CHECK_THROWS_AS(run_to_halt_piles(g, init_piles_localized(g, 0), rng2, nullptr, 10), EventCeilingExceeded);
}

TEST_CASE("fast sampler") {
    Rng rng(8);
    const auto h = sample_complete_fast(100, 30, rng);
    CHECK(h.events == 30);
    CHECK(h.m0 == 30);
    CHECK(h.t_last > 0.0);
    CHECK(h.t_last < h.T);
    CHECK_THROWS_AS(sample_complete_fast(0, 3, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_complete_fast(3, 0, rng), InvalidArgument);
}

TEST_CASE("empty count matches the occupancy mean") {
    std::vector<double> m(20000);
    for (std::size_t i = 0; i < m.size(); ++i) {
        Rng rng = Rng::for_stream(5, i);
        m[i] = static_cast<double>(sample_empty_count(200, rng));
    }
    const auto s = summarize(m, 2);
    const double exact = 200.0 * std::pow(1.0 - 1.0 / 200.0, 200.0);
    CHECK(std::abs(s.mean - exact) < 4 * s.se_mean);
}
