#include "dsf/graphs.hpp"

#include "dsf/error.hpp"
#include "dsf/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

namespace dsf {

namespace {

constexpr std::uint64_t kMaxVertices = std::numeric_limits<Vertex>::max() - 1;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::uint64_t checked_power(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t out = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (out > kMaxVertices / base) throw InvalidArgument("torus has too many vertices");
        out *= base;
    }
    return out;
}

} // namespace

void validate(const GraphSpec& spec) {
    std::visit(overloaded{
                   [](const Ring& g) {
                       if (g.L < 3) throw InvalidArgument("ring requires L >= 3");
                       if (g.L > kMaxVertices) throw InvalidArgument("ring has too many vertices");
                   },
                   [](const Torus& g) {
                       if (g.d < 1) throw InvalidArgument("torus requires d >= 1");
                       if (g.L < 3) throw InvalidArgument("torus requires L >= 3");
                       checked_power(g.L, g.d);
                   },
                   [](const Complete& g) {
                       if (g.V < 2) throw InvalidArgument("complete graph requires V >= 2");
                       if (g.V > kMaxVertices) throw InvalidArgument("complete graph has too many vertices");
                   },
                   [](const RandomRegular& g) {
                       if (g.r < 3 || g.r + 1 > g.V)
                           throw InvalidArgument("random regular graph requires 3 <= r <= V-1");
                       if ((g.V * g.r) % 2 != 0)
                           throw InvalidArgument("random regular graph requires V*r even");
                       if (g.V > kMaxVertices) throw InvalidArgument("random regular graph has too many vertices");
                   },
               },
               spec);
}

std::string describe(const GraphSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Ring& g) { os << "ring(L=" << g.L << ")"; },
                   [&](const Torus& g) { os << "torus(d=" << g.d << ",L=" << g.L << ")"; },
                   [&](const Complete& g) { os << "complete(V=" << g.V << ")"; },
                   [&](const RandomRegular& g) {
                       os << "random_regular(V=" << g.V << ",r=" << g.r << ",graph_seed=" << g.graph_seed << ")";
                   },
               },
               spec);
    return os.str();
}

std::uint64_t vertex_count(const GraphSpec& spec) {
    return std::visit(overloaded{
                          [](const Ring& g) { return g.L; },
                          [](const Torus& g) { return checked_power(g.L, g.d); },
                          [](const Complete& g) { return g.V; },
                          [](const RandomRegular& g) { return g.V; },
                      },
                      spec);
}

RegularGraph RegularGraph::complete(std::uint64_t V) {
    validate(Complete{V});
    RegularGraph g;
    g.V_ = V;
    g.r_ = static_cast<std::uint32_t>(V - 1);
    g.implicit_complete_ = true;
    return g;
}

RegularGraph RegularGraph::from_adjacency(std::uint64_t V, std::uint32_t r, std::vector<Vertex> adjacency) {
    if (adjacency.size() != V * r) throw InvalidArgument("adjacency table size must be V*r");
    RegularGraph g;
    g.V_ = V;
    g.r_ = r;
    g.adjacency_ = std::move(adjacency);
    return g;
}

std::vector<Vertex> RegularGraph::neighbors(Vertex v) const {
    std::vector<Vertex> out(r_);
    for (std::uint32_t k = 0; k < r_; ++k) out[k] = neighbor(v, k);
    return out;
}

bool RegularGraph::is_connected() const {
    if (implicit_complete_ || V_ == 0) return true;
    std::vector<char> seen(V_, 0);
    std::vector<Vertex> queue;
    queue.reserve(V_);
    queue.push_back(0);
    seen[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex v = queue[head];
        for (std::uint32_t k = 0; k < r_; ++k) {
            const Vertex u = neighbor(v, k);
            if (!seen[u]) {
                seen[u] = 1;
                queue.push_back(u);
            }
        }
    }
    return queue.size() == V_;
}

void RegularGraph::check_invariants() const {
    if (implicit_complete_) return;
    auto fail = [](Vertex v, const char* what) {
        throw InvalidArgument("vertex " + std::to_string(v) + ": " + what);
    };
    std::vector<Vertex> sorted;
    for (Vertex v = 0; v < V_; ++v) {
        sorted = neighbors(v);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail(v, "duplicate neighbor");
        for (Vertex u : sorted) {
            if (u >= V_) fail(v, "neighbor index out of range");
            if (u == v) fail(v, "self-loop");
            bool back = false;
            for (std::uint32_t k = 0; k < r_ && !back; ++k) back = neighbor(u, k) == v;
            if (!back) fail(v, "asymmetric adjacency");
        }
    }
    if (!is_connected()) throw InvalidArgument("graph is disconnected");
}

std::vector<std::uint64_t> torus_coordinates(const Torus& torus, Vertex v) {
    std::vector<std::uint64_t> coords(torus.d);
    std::uint64_t rest = v;
    for (std::uint32_t k = torus.d; k-- > 0;) {
        coords[k] = rest % torus.L;
        rest /= torus.L;
    }
    return coords;
}

Vertex torus_index(const Torus& torus, std::span<const std::uint64_t> coords) {
    if (coords.size() != torus.d) throw InvalidArgument("coordinate tuple has wrong dimension");
    std::uint64_t index = 0;
    for (std::uint64_t x : coords) {
        if (x >= torus.L) throw InvalidArgument("coordinate out of range");
        index = index * torus.L + x;
    }
    return static_cast<Vertex>(index);
}

namespace {

RegularGraph build_torus(const Torus& t) {
    const std::uint64_t V = checked_power(t.L, t.d);
    const std::uint32_t r = 2 * t.d;
    std::vector<Vertex> adj(V * r);
    // stride of axis k in the row-major encoding
    std::vector<std::uint64_t> stride(t.d, 1);
    for (std::uint32_t k = t.d - 1; k-- > 0;) stride[k] = stride[k + 1] * t.L;
    for (std::uint64_t v = 0; v < V; ++v) {
        for (std::uint32_t k = 0; k < t.d; ++k) {
            const std::uint64_t x = (v / stride[k]) % t.L;
            const std::uint64_t base = v - x * stride[k];
            adj[v * r + 2 * k] = static_cast<Vertex>(base + ((x + 1) % t.L) * stride[k]);
            adj[v * r + 2 * k + 1] = static_cast<Vertex>(base + ((x + t.L - 1) % t.L) * stride[k]);
        }
    }
    return RegularGraph::from_adjacency(V, r, std::move(adj));
}

} // namespace

RegularGraph build_graph(const GraphSpec& spec) {
    validate(spec);
    return std::visit(overloaded{
                          [](const Ring& g) { return build_torus(Torus{1, g.L}); },
                          [](const Torus& g) { return build_torus(g); },
                          [](const Complete& g) { return RegularGraph::complete(g.V); },
                          [](const RandomRegular& g) { return random_regular(g.V, g.r, g.graph_seed); },
                      },
                      spec);
}

RegularGraph random_regular(std::uint64_t V, std::uint32_t r, std::uint64_t graph_seed,
                            std::uint64_t max_redraws) {
    validate(RandomRegular{V, r, graph_seed});
    Rng rng(graph_seed);
    const std::size_t stubs = V * r;
    std::vector<Vertex> points(stubs);
    std::vector<Vertex> adj(stubs);
    std::vector<std::uint32_t> fill(V);

    for (std::uint64_t attempt = 0; attempt < max_redraws; ++attempt) {
        for (std::size_t i = 0; i < stubs; ++i) points[i] = static_cast<Vertex>(i / r);
        for (std::size_t i = stubs - 1; i > 0; --i) std::swap(points[i], points[rng.below(i + 1)]);

        std::fill(fill.begin(), fill.end(), 0);
        bool simple = true;
        for (std::size_t i = 0; i < stubs && simple; i += 2) {
            const Vertex a = points[i], b = points[i + 1];
            if (a == b) {
                simple = false;
                break;
            }
            adj[static_cast<std::size_t>(a) * r + fill[a]++] = b;
            adj[static_cast<std::size_t>(b) * r + fill[b]++] = a;
        }
        if (!simple) continue;
        for (std::uint64_t v = 0; v < V && simple; ++v) {
            auto first = adj.begin() + static_cast<std::ptrdiff_t>(v * r);
            std::sort(first, first + r);
            simple = std::adjacent_find(first, first + r) == first + r;
        }
        if (!simple) continue;

        auto g = RegularGraph::from_adjacency(V, r, adj);
        if (g.is_connected()) return g;
    }
    throw GenerationFailed("random_regular(V=" + std::to_string(V) + ", r=" + std::to_string(r) +
                           "): no simple connected pairing after " + std::to_string(max_redraws) + " redraws");
}

} // namespace dsf
