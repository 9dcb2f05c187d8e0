#include "tnc/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace tnc {

bool Edge::touches(VertexId v) const noexcept {
    return std::find(endpoints.begin(), endpoints.end(), v) != endpoints.end();
}

// ---------------------------------------------------------------- SimpleGraph

SimpleGraph SimpleGraph::from_edges(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) {
    SimpleGraph g;
    g.vertex_count = n;
    for (auto& [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("graph edge endpoint out of range");
        if (u == v) throw std::invalid_argument("graph self-loop");
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);
    return g;
}

std::vector<std::vector<std::size_t>> SimpleGraph::adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertex_count);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

std::size_t SimpleGraph::degree(std::size_t v) const {
    std::size_t d = 0;
    for (auto [a, b] : edges) d += (a == v) + (b == v);
    return d;
}

std::size_t SimpleGraph::max_degree() const {
    std::vector<std::size_t> deg(vertex_count, 0);
    for (auto [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

bool SimpleGraph::has_edge(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

// -------------------------------------------------------------------- Network

void Network::check_vertex(VertexId v) const {
    if (index(v) >= names_.size()) throw std::out_of_range("unknown vertex id " + std::to_string(index(v)));
}

VertexId Network::add_vertex(std::string name) {
    if (name.empty()) throw std::invalid_argument("vertex name must be non-empty");
    if (by_name_.count(name)) throw std::invalid_argument("duplicate vertex name '" + name + "'");
    const auto id = make_id<VertexId>(names_.size());
    by_name_.emplace(name, id);
    names_.push_back(std::move(name));
    incident_.emplace_back();
    tensors_.emplace_back();
    return id;
}

EdgeId Network::insert_edge(EdgeId id, std::vector<VertexId> endpoints, std::uint64_t dim,
                            std::vector<EdgeId> merged_from) {
    if (dim < 1) throw std::invalid_argument("bond dimension must be >= 1");
    if (endpoints.empty()) throw std::invalid_argument("edge needs at least one endpoint");
    for (auto v : endpoints) check_vertex(v);
    auto sorted = endpoints;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("edge endpoints must be distinct (no self-loops)");
    if (!edges_.empty() && edges_.back().id >= id) throw std::logic_error("edge ids must increase");
    Edge e;
    e.id = id;
    e.endpoints = std::move(endpoints);
    e.dim = dim;
    e.weight = std::log2(static_cast<double>(dim));
    e.merged_from = std::move(merged_from);
    for (auto v : e.endpoints) incident_[index(v)].push_back(id);
    edges_.push_back(std::move(e));
    next_edge_id_ = std::max<std::uint32_t>(next_edge_id_, static_cast<std::uint32_t>(index(id)) + 1);
    return id;
}

EdgeId Network::add_edge(std::vector<VertexId> endpoints, std::uint64_t dim) {
    return insert_edge(make_id<EdgeId>(next_edge_id_), std::move(endpoints), dim, {});
}

void Network::set_tensor(VertexId v, DenseTensor tensor) {
    check_vertex(v);
    const auto& inc = incident_[index(v)];
    if (tensor.rank() != inc.size())
        throw std::invalid_argument("tensor of '" + names_[index(v)] + "' has rank " + std::to_string(tensor.rank()) +
                                    ", vertex has " + std::to_string(inc.size()) + " incident edges");
    for (std::size_t k = 0; k < tensor.rank(); ++k) {
        const auto label = tensor.axes()[k];
        if (!std::binary_search(inc.begin(), inc.end(), label))
            throw std::invalid_argument("tensor of '" + names_[index(v)] + "' has an axis for a non-incident edge");
        if (edge(label).dim != tensor.extents()[k])
            throw std::invalid_argument("tensor of '" + names_[index(v)] + "' has wrong extent on edge " +
                                        std::to_string(index(label)));
    }
    tensors_[index(v)] = std::move(tensor);
}

const std::string& Network::name(VertexId v) const {
    check_vertex(v);
    return names_[index(v)];
}

std::optional<VertexId> Network::find_vertex(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::size_t Network::edge_position(EdgeId id) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), id, [](const Edge& e, EdgeId x) { return e.id < x; });
    if (it == edges_.end() || it->id != id) throw std::out_of_range("unknown edge id " + std::to_string(index(id)));
    return static_cast<std::size_t>(it - edges_.begin());
}

const Edge& Network::edge(EdgeId id) const { return edges_[edge_position(id)]; }

bool Network::has_edge(EdgeId id) const noexcept {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), id, [](const Edge& e, EdgeId x) { return e.id < x; });
    return it != edges_.end() && it->id == id;
}

std::span<const EdgeId> Network::incident(VertexId v) const {
    check_vertex(v);
    return incident_[index(v)];
}

bool Network::has_tensors() const noexcept {
    if (names_.empty()) return false;
    for (std::size_t v = 0; v < names_.size(); ++v) {
        if (environment_ && index(*environment_) == v) continue;
        if (!tensors_[v]) return false;
    }
    return true;
}

const DenseTensor* Network::tensor(VertexId v) const {
    check_vertex(v);
    const auto& t = tensors_[index(v)];
    return t ? &*t : nullptr;
}

bool Network::has_open_legs() const noexcept {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_open_leg(); });
}

bool Network::has_hyperedges() const noexcept {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_hyperedge(); });
}

bool Network::has_parallel_edges() const {
    std::set<std::vector<VertexId>> seen;
    for (const auto& e : edges_) {
        auto key = e.endpoints;
        std::sort(key.begin(), key.end());
        if (!seen.insert(std::move(key)).second) return true;
    }
    return false;
}

std::size_t Network::max_degree() const {
    std::size_t d = 0;
    for (const auto& inc : incident_) d = std::max(d, inc.size());
    return d;
}

Network Network::without_tensors() const {
    Network copy = *this;
    for (auto& t : copy.tensors_) t.reset();
    return copy;
}

void Network::validate() const {
    for (const auto& e : edges_) {
        if (e.dim < 1) throw std::invalid_argument("bond dimension must be >= 1");
        if (e.endpoints.empty()) throw std::invalid_argument("edge without endpoints");
        for (auto v : e.endpoints) check_vertex(v);
        auto s = e.endpoints;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("self-loop edge");
    }
    if (environment_) {
        check_vertex(*environment_);
        if (tensors_[index(*environment_)]) throw std::invalid_argument("environment vertex carries a tensor");
    }
    for (std::size_t v = 0; v < names_.size(); ++v) {
        const auto& t = tensors_[v];
        if (!t) continue;
        const auto& inc = incident_[v];
        if (t->rank() != inc.size()) throw std::invalid_argument("tensor rank mismatch at '" + names_[v] + "'");
        for (std::size_t k = 0; k < t->rank(); ++k) {
            if (!std::binary_search(inc.begin(), inc.end(), t->axes()[k]) || edge(t->axes()[k]).dim != t->extents()[k])
                throw std::invalid_argument("tensor axes mismatch at '" + names_[v] + "'");
        }
    }
}

// ----------------------------------------------------------------- operations

double weighted_degree(const Network& net, VertexId v) {
    double d = 0.0;
    for (auto e : net.incident(v)) d += net.edge(e).weight;
    return d;
}

Network contract_symbolic(const Network& net, VertexId u, VertexId v) {
    if (index(u) >= net.vertex_count() || index(v) >= net.vertex_count())
        throw std::out_of_range("contract_symbolic: unknown vertex");
    if (u == v) throw std::invalid_argument("contract_symbolic: cannot contract a vertex with itself");

    Network out;
    std::vector<VertexId> remap(net.vertex_count());
    for (std::size_t i = 0; i < net.vertex_count(); ++i) {
        const auto id = make_id<VertexId>(i);
        if (id == u || id == v) continue;
        remap[i] = out.add_vertex(net.name(id));
    }
    const auto merged = out.add_vertex("(" + net.name(u) + "," + net.name(v) + ")");
    remap[index(u)] = merged;
    remap[index(v)] = merged;
    if (net.environment()) {
        const auto env = *net.environment();
        out.environment_ = remap[index(env)];
    }

    // edges that end up as 2-endpoint wires merged--w, grouped by w
    std::map<VertexId, std::vector<const Edge*>> to_neighbour;
    struct Pending {
        const Edge* edge;
        std::vector<VertexId> endpoints;
    };
    std::vector<Pending> kept;
    for (const auto& e : net.edges()) {
        std::vector<VertexId> ends;
        for (auto x : e.endpoints) {
            auto y = remap[index(x)];
            if (std::find(ends.begin(), ends.end(), y) == ends.end()) ends.push_back(y);
        }
        const bool touched = e.touches(u) || e.touches(v);
        if (ends.size() < 2 && !e.is_open_leg()) continue;  // internal to the merged pair
        if (touched && ends.size() == 2) {
            const auto w = ends[0] == merged ? ends[1] : ends[0];
            to_neighbour[w].push_back(&e);
        }
        kept.push_back({&e, std::move(ends)});
    }

    std::uint32_t fresh = static_cast<std::uint32_t>(index(net.next_edge_id()));
    struct Merged {
        std::vector<VertexId> endpoints;
        std::uint64_t dim;
        std::vector<EdgeId> from;
    };
    std::vector<Merged> merged_edges;
    std::set<const Edge*> absorbed;
    for (auto& [w, group] : to_neighbour) {
        if (group.size() < 2) continue;
        std::uint64_t dim = 1;
        std::vector<EdgeId> from;
        for (const Edge* e : group) {
            if (dim > UINT64_MAX / e->dim) throw std::overflow_error("merged bond dimension overflows 64 bits");
            dim *= e->dim;
            from.push_back(e->id);
            absorbed.insert(e);
        }
        merged_edges.push_back({{merged, w}, dim, std::move(from)});
    }
    for (auto& p : kept) {
        if (absorbed.count(p.edge)) continue;
        out.insert_edge(p.edge->id, std::move(p.endpoints), p.edge->dim, p.edge->merged_from);
    }
    for (auto& m : merged_edges) {
        out.insert_edge(make_id<EdgeId>(fresh++), std::move(m.endpoints), m.dim, std::move(m.from));
    }
    out.next_edge_id_ = std::max(out.next_edge_id_, fresh);
    return out;
}

SimpleGraph line_graph(const Network& net) {
    const auto edges = net.edges();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            const bool share = std::any_of(edges[i].endpoints.begin(), edges[i].endpoints.end(),
                                           [&](VertexId x) { return edges[j].touches(x); });
            if (share) out.emplace_back(i, j);
        }
    }
    return SimpleGraph::from_edges(edges.size(), std::move(out));
}

Network absorb_open_legs(const Network& net) {
    if (!net.has_open_legs()) return net;
    Network out = net;
    std::string name = "_env";
    while (out.find_vertex(name)) name += "_";
    const auto env = out.add_vertex(name);
    for (auto& e : out.edges_) {
        if (!e.is_open_leg()) continue;
        e.endpoints.push_back(env);
        out.incident_[index(env)].push_back(e.id);
    }
    out.environment_ = env;
    return out;
}

Network remove_edges(const Network& net, std::span<const EdgeId> cut) {
    for (auto id : cut) (void)net.edge(id);
    Network out;
    for (std::size_t i = 0; i < net.vertex_count(); ++i) out.add_vertex(net.name(make_id<VertexId>(i)));
    out.environment_ = net.environment_;
    for (const auto& e : net.edges()) {
        if (std::find(cut.begin(), cut.end(), e.id) != cut.end()) continue;
        out.insert_edge(e.id, e.endpoints, e.dim, e.merged_from);
    }
    out.next_edge_id_ = net.next_edge_id_;
    return out;
}

SimpleGraph simple_graph(const Network& net) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : net.edges()) {
        if (e.endpoints.size() != 2) throw std::invalid_argument("simple_graph: hyperedges and open legs not allowed");
        out.emplace_back(index(e.endpoints[0]), index(e.endpoints[1]));
    }
    return SimpleGraph::from_edges(net.vertex_count(), std::move(out));
}

Network network_from_graph(const SimpleGraph& g, std::uint64_t dim) {
    Network net;
    std::vector<VertexId> ids;
    for (std::size_t i = 0; i < g.vertex_count; ++i) ids.push_back(net.add_vertex("v" + std::to_string(i)));
    for (auto [u, v] : g.edges) net.add_edge({ids[u], ids[v]}, dim);
    return net;
}

}  // namespace tnc
