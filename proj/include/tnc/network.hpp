#ifndef TNC_NETWORK_HPP
#define TNC_NETWORK_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tnc/ids.hpp"
#include "tnc/tensor.hpp"

namespace tnc {

/// A wire of the network. Two or more endpoints; a single endpoint marks an
/// open leg that has not yet been attached to the environment vertex.
struct Edge {
    EdgeId id{};
    std::vector<VertexId> endpoints;
    std::uint64_t dim = 1;
    double weight = 0.0;  // log2(dim)
    std::vector<EdgeId> merged_from;  // non-empty when created by merging parallel edges

    bool is_open_leg() const noexcept { return endpoints.size() == 1; }
    bool is_hyperedge() const noexcept { return endpoints.size() > 2; }
    bool touches(VertexId v) const noexcept;
};

/// Plain undirected simple graph on vertices 0..vertex_count-1.
struct SimpleGraph {
    std::size_t vertex_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (u, v) with u < v, sorted, unique

    std::vector<std::vector<std::size_t>> adjacency() const;
    std::size_t degree(std::size_t v) const;
    std::size_t max_degree() const;
    bool has_edge(std::size_t u, std::size_t v) const;

    /// Builds a graph, normalising and deduplicating the edge list.
    static SimpleGraph from_edges(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);
};

/// Edge-weighted hypergraph with optional tensor payloads.
///
/// Vertices are dense ids 0..vertex_count-1 with unique string names. Edge
/// ids are assigned in insertion order and never reused, so they stay
/// meaningful across symbolic contraction; edges() is sorted by id.
class Network {
public:
    VertexId add_vertex(std::string name);

    /// Adds a wire of bond dimension dim >= 1. One endpoint adds an open leg.
    EdgeId add_edge(std::vector<VertexId> endpoints, std::uint64_t dim);

    /// Attaches a tensor; its axis labels must be exactly the incident edges of
    /// v with matching extents (any axis order).
    void set_tensor(VertexId v, DenseTensor tensor);

    std::size_t vertex_count() const noexcept { return names_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::string& name(VertexId v) const;
    std::optional<VertexId> find_vertex(const std::string& name) const;

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId id) const;
    bool has_edge(EdgeId id) const noexcept;
    /// Position of an edge within edges().
    std::size_t edge_position(EdgeId id) const;

    /// Incident edge ids of v, ascending.
    std::span<const EdgeId> incident(VertexId v) const;

    bool has_tensors() const noexcept;
    const DenseTensor* tensor(VertexId v) const;

    std::optional<VertexId> environment() const noexcept { return environment_; }
    bool has_open_legs() const noexcept;
    bool has_hyperedges() const noexcept;
    bool has_parallel_edges() const;
    /// Largest number of incident edges at a vertex.
    std::size_t max_degree() const;

    /// Next id that add_edge would hand out.
    EdgeId next_edge_id() const noexcept { return make_id<EdgeId>(next_edge_id_); }

    /// Copy without tensor payloads.
    Network without_tensors() const;

    /// Re-checks every structural invariant; throws std::invalid_argument.
    void validate() const;

private:
    friend Network contract_symbolic(const Network&, VertexId, VertexId);
    friend Network absorb_open_legs(const Network&);
    friend Network remove_edges(const Network&, std::span<const EdgeId>);

    void check_vertex(VertexId v) const;
    EdgeId insert_edge(EdgeId id, std::vector<VertexId> endpoints, std::uint64_t dim,
                       std::vector<EdgeId> merged_from);

    std::vector<std::string> names_;
    std::unordered_map<std::string, VertexId> by_name_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> incident_;
    std::vector<std::optional<DenseTensor>> tensors_;
    std::optional<VertexId> environment_;
    std::uint32_t next_edge_id_ = 0;
};

/// Sum of log2 bond dimensions over incident edges; hyperedges count once.
double weighted_degree(const Network& net, VertexId v);

/// Merges u and v into one vertex (appended last, named "(u,v)").
///
/// Edges strictly between u and v disappear, hyperedges keep a single
/// occurrence of the merged vertex, and 2-endpoint edges that end up parallel
/// between the merged vertex and a common neighbour are merged into one edge
/// with a fresh id and the product dimension. Tensors are not carried over.
Network contract_symbolic(const Network& net, VertexId u, VertexId v);

/// Vertex i of the result is edges()[i]; adjacent iff the edges share an endpoint.
SimpleGraph line_graph(const Network& net);

/// Wires every open leg to a single new environment vertex. Identity on
/// networks without open legs.
Network absorb_open_legs(const Network& net);

/// Network with the listed edges deleted (ids of the others unchanged). Tensors
/// are dropped since their axes would no longer match.
Network remove_edges(const Network& net, std::span<const EdgeId> cut);

/// Unit-free graph view: one vertex per network vertex, 2-endpoint edges only.
/// Throws on hyperedges.
SimpleGraph simple_graph(const Network& net);

/// Network on graph g, every edge with bond dimension dim, vertices named v0, v1, ...
Network network_from_graph(const SimpleGraph& g, std::uint64_t dim = 2);

}  // namespace tnc

#endif
