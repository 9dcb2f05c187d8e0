#include "tnc/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tnc/errors.hpp"

namespace tnc {

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

/// Tree under surgery: nodes are never renumbered until compact().
struct MutableTree {
    std::vector<std::set<std::size_t>> adj;
    std::vector<char> alive;

    std::size_t add() {
        adj.emplace_back();
        alive.push_back(1);
        return adj.size() - 1;
    }
    void link(std::size_t a, std::size_t b) {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    void unlink(std::size_t a, std::size_t b) {
        adj[a].erase(b);
        adj[b].erase(a);
    }
    std::size_t subdivide(std::size_t a, std::size_t b) {
        unlink(a, b);
        const auto t = add();
        link(a, t);
        link(t, b);
        return t;
    }
    void remove(std::size_t x) {
        for (auto y : std::vector<std::size_t>(adj[x].begin(), adj[x].end())) unlink(x, y);
        alive[x] = 0;
    }
    std::size_t degree(std::size_t x) const { return adj[x].size(); }

    static MutableTree from(std::size_t nodes, const Pairs& edges) {
        MutableTree t;
        for (std::size_t i = 0; i < nodes; ++i) t.add();
        for (auto [a, b] : edges) t.link(a, b);
        return t;
    }

    /// Drops nodes of degree <= 1 that are not kept, until none remain.
    void prune(const std::vector<char>& keep) {
        std::vector<std::size_t> stack;
        for (std::size_t x = 0; x < adj.size(); ++x)
            if (alive[x] && !keep_at(keep, x) && degree(x) <= 1) stack.push_back(x);
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            if (!alive[x] || keep_at(keep, x) || degree(x) > 1) continue;
            std::vector<std::size_t> nbs(adj[x].begin(), adj[x].end());
            remove(x);
            for (auto y : nbs)
                if (!keep_at(keep, y) && degree(y) <= 1) stack.push_back(y);
        }
    }

    /// Contracts unkept degree-2 nodes into a single edge.
    void suppress(const std::vector<char>& keep) {
        for (std::size_t x = 0; x < adj.size(); ++x) {
            if (!alive[x] || keep_at(keep, x) || degree(x) != 2) continue;
            const auto a = *adj[x].begin();
            const auto b = *std::next(adj[x].begin());
            remove(x);
            link(a, b);
        }
    }

    /// Live nodes renumbered in increasing old id; returns old -> new.
    std::vector<std::size_t> compact(std::size_t& count, Pairs& edges) const {
        std::vector<std::size_t> map(adj.size(), SIZE_MAX);
        count = 0;
        for (std::size_t x = 0; x < adj.size(); ++x)
            if (alive[x]) map[x] = count++;
        edges.clear();
        for (std::size_t x = 0; x < adj.size(); ++x)
            if (alive[x])
                for (auto y : adj[x])
                    if (x < y) edges.emplace_back(map[x], map[y]);
        std::sort(edges.begin(), edges.end());
        return map;
    }

    static bool keep_at(const std::vector<char>& keep, std::size_t x) { return x < keep.size() && keep[x]; }
};

/// Nodes of the smallest subtree spanning the terminals (empty set -> none).
std::vector<char> steiner(const MutableTree& t, const std::vector<std::size_t>& terminals) {
    std::vector<char> in(t.adj.size(), 0);
    if (terminals.empty()) return in;
    std::vector<char> term(t.adj.size(), 0);
    for (auto x : terminals) term[x] = 1;
    std::vector<std::size_t> deg(t.adj.size(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t x = 0; x < t.adj.size(); ++x) {
        if (!t.alive[x]) continue;
        in[x] = 1;
        deg[x] = t.degree(x);
        if (!term[x] && deg[x] <= 1) stack.push_back(x);
    }
    while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        if (!in[x]) continue;
        in[x] = 0;
        for (auto y : t.adj[x])
            if (in[y] && --deg[y] <= 1 && !term[y]) stack.push_back(y);
    }
    return in;
}

/// Tree check for an edge list on node_count nodes.
void check_tree(std::size_t node_count, const Pairs& edges, const char* what) {
    if (node_count == 0) {
        if (!edges.empty()) throw std::invalid_argument(std::string(what) + ": edges without nodes");
        return;
    }
    if (edges.size() + 1 != node_count)
        throw std::invalid_argument(std::string(what) + ": a tree on " + std::to_string(node_count) + " nodes needs " +
                                    std::to_string(node_count - 1) + " edges");
    std::vector<std::size_t> parent(node_count);
    for (std::size_t i = 0; i < node_count; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [a, b] : edges) {
        if (a >= node_count || b >= node_count || a == b)
            throw std::invalid_argument(std::string(what) + ": invalid tree edge");
        const auto ra = find(a), rb = find(b);
        if (ra == rb) throw std::invalid_argument(std::string(what) + ": tree edges form a cycle");
        parent[ra] = rb;
    }
}

std::vector<std::vector<std::size_t>> incident_edges(const SimpleGraph& g) {
    std::vector<std::vector<std::size_t>> inc(g.vertex_count);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        inc[g.edges[k].first].push_back(k);
        inc[g.edges[k].second].push_back(k);
    }
    return inc;
}

void require_plain_graph(const Network& net, const char* what) {
    if (net.has_hyperedges())
        throw std::invalid_argument(std::string(what) + ": hyperedges present; expand them into copy tensors first");
    if (net.has_open_legs()) throw std::invalid_argument(std::string(what) + ": open legs present; absorb them first");
}

/// Positions (in edges()) of the wires at each vertex, ascending.
std::vector<std::vector<std::size_t>> wires_at(const Network& net) {
    std::vector<std::vector<std::size_t>> at(net.vertex_count());
    const auto edges = net.edges();
    for (std::size_t k = 0; k < edges.size(); ++k)
        for (auto v : edges[k].endpoints) at[index(v)].push_back(k);
    return at;
}

/// Replaces leaf x by a caterpillar with `count` leaves; returns them in order.
std::vector<std::size_t> spread(MutableTree& t, std::size_t x, std::size_t count) {
    if (count == 1) return {x};
    std::vector<std::size_t> leaves;
    std::size_t cur = x;
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const auto leaf = t.add();
        t.link(cur, leaf);
        leaves.push_back(leaf);
        if (i + 2 < count) {
            const auto next = t.add();
            t.link(cur, next);
            cur = next;
        }
    }
    const auto last = t.add();
    t.link(cur, last);
    leaves.push_back(last);
    return leaves;
}

/// Vertices reachable from v through s (excluding s and v), as a bitmask.
std::uint32_t reach_through(const std::vector<std::uint32_t>& adj, std::uint32_t s, std::size_t v) {
    std::uint32_t seen = 1u << v, frontier = 1u << v, out = 0;
    while (frontier) {
        std::uint32_t next = 0;
        for (std::uint32_t f = frontier; f; f &= f - 1) next |= adj[static_cast<std::size_t>(__builtin_ctz(f))];
        next &= ~seen;
        seen |= next;
        out |= next & ~s;
        frontier = next & s;
    }
    return out;
}

}  // namespace

// ------------------------------------------------------------------ widths

void validate_branch_decomposition(const BranchDecomposition& bd, const SimpleGraph& graph) {
    const std::size_t m = graph.edges.size();
    if (bd.leaf_of.size() != m)
        throw std::invalid_argument("branch decomposition maps " + std::to_string(bd.leaf_of.size()) +
                                    " edges, graph has " + std::to_string(m));
    if (m == 0) {
        if (bd.node_count != 0) throw std::invalid_argument("branch decomposition of an edgeless graph must be empty");
        return;
    }
    check_tree(bd.node_count, bd.tree_edges, "branch decomposition");
    std::vector<std::size_t> deg(bd.node_count, 0);
    for (auto [a, b] : bd.tree_edges) ++deg[a], ++deg[b];
    std::vector<char> is_leaf(bd.node_count, 0);
    for (std::size_t k = 0; k < m; ++k) {
        const auto x = bd.leaf_of[k];
        if (x >= bd.node_count) throw std::invalid_argument("branch decomposition leaf out of range");
        if (is_leaf[x]) throw std::invalid_argument("branch decomposition maps two edges to node " + std::to_string(x + 1));
        if (deg[x] > 1) throw std::invalid_argument("edge " + std::to_string(k + 1) + " mapped to an internal node");
        is_leaf[x] = 1;
    }
    for (std::size_t x = 0; x < bd.node_count; ++x) {
        if (deg[x] <= 1 && !is_leaf[x]) throw std::invalid_argument("node " + std::to_string(x + 1) + " is an unmapped leaf");
        if (deg[x] > 1 && deg[x] != 3)
            throw std::invalid_argument("internal node " + std::to_string(x + 1) + " has degree " + std::to_string(deg[x]));
    }
}

std::size_t branch_width(const BranchDecomposition& bd, const SimpleGraph& graph) {
    validate_branch_decomposition(bd, graph);
    if (bd.tree_edges.empty()) return 0;
    auto t = MutableTree::from(bd.node_count, bd.tree_edges);
    std::vector<std::size_t> count(bd.tree_edges.size(), 0);
    for (const auto& edges : incident_edges(graph)) {
        std::vector<std::size_t> terminals;
        for (auto k : edges) terminals.push_back(bd.leaf_of[k]);
        const auto in = steiner(t, terminals);
        for (std::size_t f = 0; f < bd.tree_edges.size(); ++f)
            if (in[bd.tree_edges[f].first] && in[bd.tree_edges[f].second]) ++count[f];
    }
    return *std::max_element(count.begin(), count.end());
}

int tree_width(const TreeDecomposition& td, const SimpleGraph& graph) {
    const std::size_t n = td.node_count();
    if (n == 0 && graph.vertex_count > 0) throw std::invalid_argument("vertex coverage: decomposition has no bags");
    check_tree(n, td.tree_edges, "tree decomposition");
    std::vector<std::vector<std::size_t>> holders(graph.vertex_count);
    for (std::size_t x = 0; x < n; ++x)
        for (auto v : td.bags[x]) {
            if (v >= graph.vertex_count)
                throw std::invalid_argument("bag " + std::to_string(x + 1) + " names vertex " + std::to_string(v + 1) +
                                            " outside the graph");
            holders[v].push_back(x);
        }
    for (std::size_t v = 0; v < graph.vertex_count; ++v)
        if (holders[v].empty())
            throw std::invalid_argument("vertex coverage: vertex " + std::to_string(v + 1) + " is in no bag");
    for (auto [u, v] : graph.edges) {
        bool found = false;
        for (auto x : holders[u]) {
            const auto& bag = td.bags[x];
            found = found || std::find(bag.begin(), bag.end(), v) != bag.end();
        }
        if (!found)
            throw std::invalid_argument("edge coverage: edge {" + std::to_string(u + 1) + "," + std::to_string(v + 1) +
                                        "} is in no bag");
    }
    // bags holding v induce a connected subtree iff they span |holders|-1 tree edges
    for (std::size_t v = 0; v < graph.vertex_count; ++v) {
        std::vector<char> has(n, 0);
        for (auto x : holders[v]) has[x] = 1;
        std::size_t inner = 0;
        for (auto [a, b] : td.tree_edges) inner += has[a] && has[b];
        if (inner + 1 != holders[v].size())
            throw std::invalid_argument("connectivity: bags containing vertex " + std::to_string(v + 1) +
                                        " are not connected");
    }
    std::size_t largest = 0;
    for (const auto& bag : td.bags) largest = std::max(largest, bag.size());
    return static_cast<int>(largest) - 1;
}

BranchwidthResult exact_branchwidth(const SimpleGraph& graph) {
    const std::size_t m = graph.edges.size();
    if (m > kExactBranchwidthEdgeCap)
        throw CapExceeded("exact branchwidth handles at most " + std::to_string(kExactBranchwidthEdgeCap) + " edges");
    BranchwidthResult r;
    r.bd.leaf_of.assign(m, 0);
    if (m == 0) return r;
    if (m == 1) {
        r.bd.node_count = 1;
        return r;
    }
    // the last edge is a fixed leaf; the rest form a rooted hierarchy below it
    const std::size_t k = m - 1;
    const std::uint32_t full = (1u << k) - 1;
    const std::uint32_t all_edges = (1u << m) - 1;
    std::vector<std::uint32_t> inc(graph.vertex_count, 0);
    for (std::size_t e = 0; e < m; ++e) {
        inc[graph.edges[e].first] |= 1u << e;
        inc[graph.edges[e].second] |= 1u << e;
    }
    auto mid = [&](std::uint32_t a) {
        std::uint8_t c = 0;
        for (auto mask : inc) c += (mask & a) && (mask & ~a & all_edges);
        return c;
    };
    std::vector<std::uint8_t> best(std::size_t{1} << k, 0);
    std::vector<std::uint32_t> split(std::size_t{1} << k, 0);
    for (std::uint32_t a = 1; a <= full; ++a) {
        const auto here = mid(a);
        if ((a & (a - 1)) == 0) {
            best[a] = here;
            continue;
        }
        const std::uint32_t low = a & (~a + 1);
        std::uint8_t bound = std::numeric_limits<std::uint8_t>::max();
        for (std::uint32_t b = (a - 1) & a; b; b = (b - 1) & a) {
            if (!(b & low)) continue;
            const auto w = std::max({best[b], best[a ^ b], here});
            if (w < bound) {
                bound = w;
                split[a] = b;
            }
        }
        best[a] = bound;
    }
    r.width = best[full];
    // rebuild: one node per hierarchy set, leaf edge k hangs off the top
    Pairs edges;
    std::size_t next = 0;
    std::vector<std::size_t> leaf_of(m);
    std::vector<std::pair<std::uint32_t, std::size_t>> stack;
    const std::size_t top = next++;
    stack.emplace_back(full, top);
    while (!stack.empty()) {
        auto [a, node] = stack.back();
        stack.pop_back();
        if ((a & (a - 1)) == 0) {
            leaf_of[static_cast<std::size_t>(__builtin_ctz(a))] = node;
            continue;
        }
        for (auto part : {split[a], a ^ split[a]}) {
            const std::size_t child = next++;
            edges.emplace_back(node, child);
            stack.emplace_back(part, child);
        }
    }
    const std::size_t last = next++;
    edges.emplace_back(top, last);
    leaf_of[k] = last;
    r.bd.node_count = next;
    r.bd.tree_edges = std::move(edges);
    r.bd.leaf_of = std::move(leaf_of);
    return r;
}

TreeDecomposition decomposition_from_elimination(const SimpleGraph& graph, const std::vector<std::size_t>& order) {
    const std::size_t n = graph.vertex_count;
    if (order.size() != n) throw std::invalid_argument("elimination order must list every vertex once");
    std::vector<std::size_t> pos(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        if (order[i] >= n || pos[order[i]] != SIZE_MAX)
            throw std::invalid_argument("elimination order must list every vertex once");
        pos[order[i]] = i;
    }
    std::vector<std::set<std::size_t>> adj(n);
    for (auto [u, v] : graph.edges) adj[u].insert(v), adj[v].insert(u);
    TreeDecomposition td;
    td.bags.resize(n);
    std::vector<std::optional<std::size_t>> parent(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = order[i];
        std::vector<std::size_t> later(adj[v].begin(), adj[v].end());
        for (auto a : later)
            for (auto b : later)
                if (a < b) adj[a].insert(b), adj[b].insert(a);
        for (auto a : later) adj[a].erase(v);
        td.bags[i] = later;
        td.bags[i].push_back(v);
        std::sort(td.bags[i].begin(), td.bags[i].end());
        if (!later.empty()) {
            std::size_t first = later[0];
            for (auto a : later)
                if (pos[a] < pos[first]) first = a;
            parent[i] = pos[first];
        }
    }
    // bags of separate components are chained so the result is one tree
    std::optional<std::size_t> prev_root;
    for (std::size_t i = 0; i < n; ++i) {
        if (parent[i]) {
            td.tree_edges.emplace_back(i, *parent[i]);
        } else {
            if (prev_root) td.tree_edges.emplace_back(*prev_root, i);
            prev_root = i;
        }
    }
    return td;
}

TreewidthResult exact_treewidth(const SimpleGraph& graph) {
    const std::size_t n = graph.vertex_count;
    if (n > kExactTreewidthVertexCap)
        throw CapExceeded("exact treewidth handles at most " + std::to_string(kExactTreewidthVertexCap) + " vertices");
    TreewidthResult r;
    if (n == 0) return r;
    std::vector<std::uint32_t> adj(n, 0);
    for (auto [u, v] : graph.edges) adj[u] |= 1u << v, adj[v] |= 1u << u;
    const std::size_t size = std::size_t{1} << n;
    // best[s]: smallest max |Q| when the vertices of s are eliminated first
    std::vector<std::int8_t> best(size, -1);
    std::vector<std::uint8_t> last(size, 0);
    for (std::uint32_t s = 1; s < size; ++s) {
        std::int8_t bound = std::numeric_limits<std::int8_t>::max();
        for (std::uint32_t f = s; f; f &= f - 1) {
            const auto v = static_cast<std::size_t>(__builtin_ctz(f));
            const std::uint32_t rest = s & ~(1u << v);
            const auto q = static_cast<std::int8_t>(__builtin_popcount(reach_through(adj, rest, v)));
            const auto w = std::max(best[rest], q);
            if (w < bound) {
                bound = w;
                last[s] = static_cast<std::uint8_t>(v);
            }
        }
        best[s] = bound;
    }
    std::vector<std::size_t> order(n);
    std::uint32_t s = static_cast<std::uint32_t>(size - 1);
    for (std::size_t i = n; i-- > 0;) {
        order[i] = last[s];
        s &= ~(1u << last[s]);
    }
    r.width = best[size - 1];
    r.elimination_order = order;
    r.td = decomposition_from_elimination(graph, order);
    const int check = tree_width(r.td, graph);
    if (check != r.width) throw std::logic_error("exact treewidth: decomposition width disagrees with the search");
    return r;
}

// ------------------------------------------------------------- conversions

BranchDecomposition embedding_to_branch_decomposition(const Network& net, const ContractionTree& input) {
    require_plain_graph(net, "embedding to branch decomposition");
    check_tree_matches(net, input);
    const ContractionTree tree = input.is_rooted() ? unroot(input) : input;
    const auto lg = line_graph(net);
    const auto at = wires_at(net);
    const auto edges = net.edges();

    // each line-graph edge belongs to the smallest vertex its two wires share
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> lg_index;
    std::vector<std::size_t> owner(lg.edges.size());
    for (std::size_t k = 0; k < lg.edges.size(); ++k) {
        const auto [i, j] = lg.edges[k];
        lg_index[{i, j}] = k;
        std::optional<std::size_t> common;
        for (auto a : edges[i].endpoints)
            for (auto b : edges[j].endpoints)
                if (a == b && (!common || index(a) < *common)) common = index(a);
        owner[k] = *common;
    }

    Pairs tree_edges;
    for (auto [a, b] : tree.edge_list()) tree_edges.emplace_back(index(a), index(b));
    auto t = MutableTree::from(tree.node_count(), tree_edges);
    std::vector<std::size_t> leaf_of(lg.edges.size(), SIZE_MAX);
    std::vector<char> is_bd_leaf;

    for (std::size_t v = 0; v < net.vertex_count(); ++v) {
        const auto l0 = index(tree.leaf_of(make_id<VertexId>(v)));
        const auto& ev = at[v];
        // group i: pairs {e_i, e_j}, j > i, owned by v
        std::vector<std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < ev.size(); ++i) {
            std::vector<std::size_t> items;
            for (std::size_t j = i + 1; j < ev.size(); ++j) {
                const auto k = lg_index.at({ev[i], ev[j]});
                if (owner[k] == v) items.push_back(k);
            }
            if (!items.empty()) groups.push_back(std::move(items));
        }
        if (groups.empty()) continue;  // pruned below
        const auto group_leaves = spread(t, l0, groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const auto item_leaves = spread(t, group_leaves[g], groups[g].size());
            for (std::size_t i = 0; i < groups[g].size(); ++i) leaf_of[groups[g][i]] = item_leaves[i];
        }
    }
    is_bd_leaf.assign(t.adj.size(), 0);
    for (auto x : leaf_of) is_bd_leaf[x] = 1;
    t.prune(is_bd_leaf);
    t.suppress(is_bd_leaf);

    BranchDecomposition bd;
    const auto map = t.compact(bd.node_count, bd.tree_edges);
    bd.leaf_of.resize(leaf_of.size());
    for (std::size_t k = 0; k < leaf_of.size(); ++k) bd.leaf_of[k] = map[leaf_of[k]];
    validate_branch_decomposition(bd, lg);
    return bd;
}

ContractionTree branch_decomposition_to_embedding(const Network& net, const BranchDecomposition& bd) {
    require_plain_graph(net, "branch decomposition to embedding");
    const auto lg = line_graph(net);
    try {
        validate_branch_decomposition(bd, lg);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("not a branch decomposition of the line graph: ") + e.what());
    }
    const std::size_t n = net.vertex_count();
    const std::size_t m = net.edge_count();
    const auto at = wires_at(net);
    const auto lg_inc = incident_edges(lg);
    auto t = MutableTree::from(bd.node_count, bd.tree_edges);

    // region[e]: nodes that wire e may be routed through; starts as its subtree
    std::vector<std::vector<char>> region(m);
    for (std::size_t e = 0; e < m; ++e) {
        std::vector<std::size_t> terminals;
        for (auto k : lg_inc[e]) terminals.push_back(bd.leaf_of[k]);
        region[e] = steiner(t, terminals);
    }
    std::vector<char> has_subtree(m, 0);
    for (std::size_t e = 0; e < m; ++e) has_subtree[e] = !lg_inc[e].empty();
    auto grow = [&](std::size_t node) {
        for (auto& r : region) r.resize(std::max(r.size(), node + 1), 0);
    };
    auto split = [&](std::size_t a, std::size_t b) {
        const auto s = t.subdivide(a, b);
        grow(s);
        for (auto& r : region)
            if (r[a] && r[b]) r[s] = 1;
        return s;
    };
    auto edge_load = [&](std::size_t a, std::size_t b) {
        std::size_t c = 0;
        for (const auto& r : region) c += r[a] && r[b];
        return c;
    };

    std::vector<std::optional<std::size_t>> leaf(n);
    std::vector<char> vertex_leaf;
    auto mark = [&](std::size_t v, std::size_t x) {
        leaf[v] = x;
        vertex_leaf.resize(std::max(vertex_leaf.size(), x + 1), 0);
        vertex_leaf[x] = 1;
    };
    auto attach_anywhere = [&](std::size_t v) -> std::size_t {
        std::optional<std::size_t> only;
        std::optional<std::pair<std::size_t, std::size_t>> first_edge;
        std::size_t live = 0;
        for (std::size_t x = 0; x < t.adj.size(); ++x) {
            if (!t.alive[x]) continue;
            ++live;
            only = x;
            for (auto y : t.adj[x])
                if (x < y && !first_edge) first_edge = {x, y};
        }
        const auto l = t.add();
        grow(l);
        if (first_edge) {
            t.link(split(first_edge->first, first_edge->second), l);
        } else if (live > 0) {
            t.link(*only, l);
        }
        mark(v, l);
        return l;
    };

    for (std::size_t v = 0; v < n; ++v) {
        const auto& ev = at[v];
        std::vector<std::size_t> anchored;
        for (auto e : ev)
            if (has_subtree[e]) anchored.push_back(e);
        if (anchored.empty()) {
            // isolated vertex, or a wire whose ends have no other wires
            std::optional<std::size_t> partner;
            if (ev.size() == 1)
                for (auto u : net.edges()[ev[0]].endpoints)
                    if (index(u) != v && leaf[index(u)]) partner = *leaf[index(u)];
            if (!partner) {
                const auto l = attach_anywhere(v);
                if (ev.size() == 1) region[ev[0]][l] = 1;
                continue;
            }
            const auto l = t.add();
            grow(l);
            if (t.degree(*partner) == 0) {
                t.link(*partner, l);
            } else {
                const auto s = split(*partner, *t.adj[*partner].begin());
                t.link(s, l);
                region[ev[0]][s] = 1;
            }
            region[ev[0]][l] = 1;
            region[ev[0]][*partner] = 1;
            mark(v, l);
            continue;
        }
        // common node of all the wire subtrees (they pairwise intersect)
        std::vector<std::size_t> common;
        for (std::size_t x = 0; x < t.adj.size(); ++x) {
            if (!t.alive[x] || (x < vertex_leaf.size() && vertex_leaf[x])) continue;
            bool all = true;
            for (auto e : anchored) all = all && region[e][x];
            if (all) common.push_back(x);
        }
        if (common.empty()) throw std::logic_error("wire subtrees of vertex " + std::to_string(v) + " share no node");
        // among anchors and their neighbours, the split adding the fewest wires
        // to an already loaded edge; ties by fewer added wires, then ids
        std::optional<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> best;
        for (auto t0 : common) {
            for (auto ti : t.adj[t0]) {
                std::size_t w = 0;
                for (auto e : anchored) w += !region[e][ti];
                const auto key = std::tuple{edge_load(t0, ti) + w, w, t0, ti};
                if (!best || key < *best) best = key;
            }
        }
        const auto l = t.add();
        grow(l);
        if (!best) {
            t.link(common.front(), l);
        } else {
            const auto [load, w, t0, ti] = *best;
            const auto s = split(t0, ti);
            t.link(s, l);
            for (auto e : anchored) region[e][s] = 1;
        }
        for (auto e : anchored) region[e][l] = 1;
        mark(v, l);
    }

    vertex_leaf.resize(t.adj.size(), 0);
    t.prune(vertex_leaf);
    t.suppress(vertex_leaf);
    std::size_t count = 0;
    Pairs edges;
    const auto map = t.compact(count, edges);
    std::vector<std::pair<NodeId, NodeId>> tree_edges;
    for (auto [a, b] : edges) tree_edges.emplace_back(make_id<NodeId>(a), make_id<NodeId>(b));
    std::vector<NodeId> leaf_of(n);
    for (std::size_t v = 0; v < n; ++v) leaf_of[v] = make_id<NodeId>(map[*leaf[v]]);
    return ContractionTree(n, std::move(tree_edges), std::move(leaf_of));
}

EmbeddingDecomposition validate_embedding_as_tree_decomposition(const Network& net, const ContractionTree& tree) {
    require_plain_graph(net, "embedding as tree decomposition");
    const auto routings = compute_routings(net, tree);
    EmbeddingDecomposition r;
    r.td.bags.assign(tree.node_count(), {});
    for (std::size_t k = 0; k < routings.size(); ++k)
        for (auto x : routings[k].nodes) r.td.bags[index(x)].push_back(k);
    for (auto [a, b] : tree.edge_list()) r.td.tree_edges.emplace_back(index(a), index(b));
    r.width = tree_width(r.td, line_graph(net));
    return r;
}

BranchDecomposition tree_to_branch_decomposition(const TreeDecomposition& td, const SimpleGraph& graph) {
    tree_width(td, graph);
    BranchDecomposition bd;
    bd.leaf_of.assign(graph.edges.size(), 0);
    if (graph.edges.empty()) return bd;
    auto t = MutableTree::from(td.node_count(), td.tree_edges);
    std::vector<std::size_t> leaf_of(graph.edges.size());
    for (std::size_t k = 0; k < graph.edges.size(); ++k) {
        const auto [u, v] = graph.edges[k];
        for (std::size_t x = 0; x < td.node_count(); ++x) {
            const auto& bag = td.bags[x];
            if (std::binary_search(bag.begin(), bag.end(), u) && std::binary_search(bag.begin(), bag.end(), v)) {
                leaf_of[k] = t.add();
                t.link(x, leaf_of[k]);
                break;
            }
        }
    }
    std::vector<char> keep(t.adj.size(), 0);
    for (auto x : leaf_of) keep[x] = 1;
    t.prune(keep);
    for (std::size_t x = 0; x < t.adj.size(); ++x) {
        if (!t.alive[x] || t.degree(x) <= 3) continue;
        std::vector<std::size_t> nb(t.adj[x].begin(), t.adj[x].end());
        const std::size_t d = nb.size();
        for (std::size_t i = 2; i < d; ++i) t.unlink(x, nb[i]);
        std::size_t cur = x;
        for (std::size_t i = 2; i + 2 < d; ++i) {
            const auto y = t.add();
            t.link(cur, y);
            t.link(y, nb[i]);
            cur = y;
        }
        const auto y = t.add();
        t.link(cur, y);
        t.link(y, nb[d - 2]);
        t.link(y, nb[d - 1]);
    }
    keep.resize(t.adj.size(), 0);
    t.suppress(keep);
    const auto map = t.compact(bd.node_count, bd.tree_edges);
    for (std::size_t k = 0; k < leaf_of.size(); ++k) bd.leaf_of[k] = map[leaf_of[k]];
    validate_branch_decomposition(bd, graph);
    return bd;
}

ImportedTree import_tree_decomposition(const TreeDecomposition& td, const Network& net) {
    require_plain_graph(net, "tree decomposition import");
    const auto lg = line_graph(net);
    try {
        tree_width(td, lg);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("not a tree decomposition of the line graph: ") + e.what());
    }
    auto bd = tree_to_branch_decomposition(td, lg);
    const auto width = branch_width(bd, lg);
    auto tree = branch_decomposition_to_embedding(net, bd);
    const auto unit = unit_congestion(net, tree);
    // every wire through an internal node uses two of its three edges
    if (2 * unit.vertcon > 3 * unit.edgecon) throw std::logic_error("imported tree: vertex congestion above 3/2 edge congestion");
    const std::size_t bound = 3 * (width + net.max_degree() / 3) / 2;
    return {std::move(tree), std::move(bd), width, unit.vertcon, unit.edgecon, std::max(bound, net.max_degree())};
}

// ------------------------------------------------------------ text formats

namespace {

/// Non-comment, non-empty lines split into tokens.
std::vector<std::vector<std::string>> token_lines(std::istream& in) {
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string w; ss >> w;) tok.push_back(w);
        if (tok.empty() || tok[0] == "c") continue;
        out.push_back(std::move(tok));
    }
    return out;
}

std::size_t parse_index(const std::string& s, std::size_t limit, const char* what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(std::string(what) + ": bad number '" + s + "'");
    if (limit != 0 && (v == 0 || v > limit))
        throw std::invalid_argument(std::string(what) + ": index " + s + " out of range 1.." + std::to_string(limit));
    return static_cast<std::size_t>(v);
}

}  // namespace

void write_td(std::ostream& out, const TreeDecomposition& td, std::size_t vertex_count) {
    std::size_t largest = 0;
    for (const auto& b : td.bags) largest = std::max(largest, b.size());
    out << "s td " << td.node_count() << ' ' << largest << ' ' << vertex_count << '\n';
    for (std::size_t x = 0; x < td.node_count(); ++x) {
        out << "b " << x + 1;
        for (auto v : td.bags[x]) out << ' ' << v + 1;
        out << '\n';
    }
    for (auto [a, b] : td.tree_edges) out << a + 1 << ' ' << b + 1 << '\n';
}

ParsedTd read_td(std::istream& in) {
    const auto lines = token_lines(in);
    if (lines.empty() || lines[0].size() != 5 || lines[0][0] != "s" || lines[0][1] != "td")
        throw std::invalid_argument("td: expected 's td <bags> <max bag> <vertices>'");
    ParsedTd r;
    const auto bags = parse_index(lines[0][2], 0, "td");
    parse_index(lines[0][3], 0, "td");
    r.vertex_count = parse_index(lines[0][4], 0, "td");
    r.td.bags.assign(bags, {});
    std::vector<char> seen(bags, 0);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& tok = lines[i];
        if (tok[0] == "b") {
            if (tok.size() < 2) throw std::invalid_argument("td: bag line without an index");
            const auto x = parse_index(tok[1], bags, "td bag") - 1;
            if (seen[x]) throw std::invalid_argument("td: bag " + tok[1] + " listed twice");
            seen[x] = 1;
            for (std::size_t j = 2; j < tok.size(); ++j)
                r.td.bags[x].push_back(parse_index(tok[j], r.vertex_count, "td vertex") - 1);
            std::sort(r.td.bags[x].begin(), r.td.bags[x].end());
            r.td.bags[x].erase(std::unique(r.td.bags[x].begin(), r.td.bags[x].end()), r.td.bags[x].end());
        } else if (tok.size() == 2) {
            r.td.tree_edges.emplace_back(parse_index(tok[0], bags, "td edge") - 1, parse_index(tok[1], bags, "td edge") - 1);
        } else {
            throw std::invalid_argument("td: unrecognised line starting with '" + tok[0] + "'");
        }
    }
    for (std::size_t x = 0; x < bags; ++x)
        if (!seen[x]) throw std::invalid_argument("td: bag " + std::to_string(x + 1) + " missing");
    return r;
}

void write_bd(std::ostream& out, const BranchDecomposition& bd) {
    out << "s bd " << bd.node_count << ' ' << bd.leaf_of.size() << '\n';
    for (std::size_t k = 0; k < bd.leaf_of.size(); ++k) out << "l " << k + 1 << ' ' << bd.leaf_of[k] + 1 << '\n';
    for (auto [a, b] : bd.tree_edges) out << a + 1 << ' ' << b + 1 << '\n';
}

BranchDecomposition read_bd(std::istream& in) {
    const auto lines = token_lines(in);
    if (lines.empty() || lines[0].size() != 4 || lines[0][0] != "s" || lines[0][1] != "bd")
        throw std::invalid_argument("bd: expected 's bd <nodes> <graph edges>'");
    BranchDecomposition bd;
    bd.node_count = parse_index(lines[0][2], 0, "bd");
    const auto m = parse_index(lines[0][3], 0, "bd");
    bd.leaf_of.assign(m, SIZE_MAX);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& tok = lines[i];
        if (tok[0] == "l" && tok.size() == 3) {
            const auto k = parse_index(tok[1], m, "bd edge") - 1;
            if (bd.leaf_of[k] != SIZE_MAX) throw std::invalid_argument("bd: edge " + tok[1] + " mapped twice");
            bd.leaf_of[k] = parse_index(tok[2], bd.node_count, "bd node") - 1;
        } else if (tok.size() == 2) {
            bd.tree_edges.emplace_back(parse_index(tok[0], bd.node_count, "bd tree edge") - 1,
                                       parse_index(tok[1], bd.node_count, "bd tree edge") - 1);
        } else {
            throw std::invalid_argument("bd: unrecognised line starting with '" + tok[0] + "'");
        }
    }
    for (std::size_t k = 0; k < m; ++k)
        if (bd.leaf_of[k] == SIZE_MAX) throw std::invalid_argument("bd: edge " + std::to_string(k + 1) + " has no leaf");
    return bd;
}

}  // namespace tnc
