#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dsf {

using Vertex = std::uint32_t;

struct Ring {
    std::uint64_t L = 0;
};

/// Periodic hypercubic lattice (R_L)^d. Vertices are encoded row-major: the
/// coordinate tuple (x_0, ..., x_{d-1}) maps to sum_k x_k * L^(d-1-k).
struct Torus {
    std::uint32_t d = 0;
    std::uint64_t L = 0;
};

struct Complete {
    std::uint64_t V = 0;
};

struct RandomRegular {
    std::uint64_t V = 0;
    std::uint32_t r = 0;
    std::uint64_t graph_seed = 0;
};

using GraphSpec = std::variant<Ring, Torus, Complete, RandomRegular>;

/// Throws InvalidArgument if the spec cannot describe a simple connected
/// regular graph.
void validate(const GraphSpec& spec);
std::string describe(const GraphSpec& spec);
std::uint64_t vertex_count(const GraphSpec& spec);

/// Connected simple r-regular graph. Complete graphs keep their adjacency
/// implicit (neighbor k of v is k if k < v, else k + 1) so that K_{N+1} with
/// N ~ 10^5 stays O(1) in memory; every other kind stores a flat V*r table.
class RegularGraph {
public:
    static RegularGraph complete(std::uint64_t V);
    /// Takes ownership of a flat adjacency table of size V*r.
    static RegularGraph from_adjacency(std::uint64_t V, std::uint32_t r, std::vector<Vertex> adjacency);

    std::uint64_t vertex_count() const noexcept { return V_; }
    std::uint32_t degree() const noexcept { return r_; }
    bool is_complete() const noexcept { return implicit_complete_; }

    Vertex neighbor(Vertex v, std::uint32_t k) const noexcept {
        if (implicit_complete_) return k < v ? k : k + 1;
        return adjacency_[static_cast<std::size_t>(v) * r_ + k];
    }

    std::vector<Vertex> neighbors(Vertex v) const;
    std::uint64_t edge_count() const noexcept { return V_ * r_ / 2; }

    /// Scans for regularity, simplicity, symmetry and connectivity; throws
    /// InvalidArgument describing the first violation. O(V r log r) for stored
    /// graphs, O(1) for implicit complete graphs.
    void check_invariants() const;
    bool is_connected() const;

private:
    RegularGraph() = default;

    std::uint64_t V_ = 0;
    std::uint32_t r_ = 0;
    bool implicit_complete_ = false;
    std::vector<Vertex> adjacency_;
};

RegularGraph build_graph(const GraphSpec& spec);

/// Pairing (configuration) model with full restart on any self-loop or
/// multi-edge, then a connectivity check (disconnected draws are regenerated).
/// Deterministic in graph_seed. Throws GenerationFailed after max_redraws.
RegularGraph random_regular(std::uint64_t V, std::uint32_t r, std::uint64_t graph_seed,
                            std::uint64_t max_redraws = 10'000);

/// Row-major coordinates of a torus vertex.
std::vector<std::uint64_t> torus_coordinates(const Torus& torus, Vertex v);
Vertex torus_index(const Torus& torus, std::span<const std::uint64_t> coords);

} // namespace dsf
