#include "tnc/contraction_tree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace tnc {

// ------------------------------------------------------------ construction

ContractionTree::ContractionTree(std::size_t vertex_count, std::vector<std::pair<NodeId, NodeId>> edges,
                                 std::vector<NodeId> leaf_of, std::optional<NodeId> root,
                                 std::optional<VertexId> root_label)
    : edges_(std::move(edges)), leaf_of_(std::move(leaf_of)), root_(root), root_label_(root_label) {
    if (vertex_count == 0) throw std::invalid_argument("contraction tree needs at least one vertex");
    if (leaf_of_.size() != vertex_count) throw std::invalid_argument("leaf map must cover every vertex");
    const std::size_t n_nodes = edges_.size() + 1;
    adj_.assign(n_nodes, {});
    for (std::size_t f = 0; f < edges_.size(); ++f) {
        auto [a, b] = edges_[f];
        if (index(a) >= n_nodes || index(b) >= n_nodes || a == b)
            throw std::invalid_argument("invalid tree edge " + std::to_string(f));
        adj_[index(a)].push_back({b, make_id<TreeEdgeId>(f)});
        adj_[index(b)].push_back({a, make_id<TreeEdgeId>(f)});
    }
    // connected with n-1 edges => tree
    std::vector<bool> seen(n_nodes, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (auto nb : adj_[x]) {
            if (!seen[index(nb.node)]) {
                seen[index(nb.node)] = true;
                ++reached;
                stack.push_back(index(nb.node));
            }
        }
    }
    if (reached != n_nodes) throw std::invalid_argument("contraction tree is not connected");

    if (root_ && index(*root_) >= n_nodes) throw std::invalid_argument("root out of range");
    if (root_label_ && !root_) throw std::invalid_argument("root label given for an unrooted tree");
    if (root_label_ && index(*root_label_) >= vertex_count) throw std::invalid_argument("root label out of range");

    label_.assign(n_nodes, std::nullopt);
    for (std::size_t v = 0; v < vertex_count; ++v) {
        const auto x = leaf_of_[v];
        if (index(x) >= n_nodes) throw std::invalid_argument("leaf map points outside the tree");
        if (label_[index(x)]) throw std::invalid_argument("leaf map is not injective");
        label_[index(x)] = make_id<VertexId>(v);
        const bool is_root_label = root_label_ && index(*root_label_) == v;
        if (is_root_label) {
            if (x != *root_) throw std::invalid_argument("root label must map to the root");
        } else {
            if (root_ && x == *root_) throw std::invalid_argument("root must not be a vertex leaf");
            if (adj_[index(x)].size() > 1) throw std::invalid_argument("vertex mapped to an internal node");
        }
    }
    for (std::size_t x = 0; x < n_nodes; ++x) {
        const auto d = adj_[x].size();
        const bool is_root = root_ && index(*root_) == x;
        if (is_root) {
            if (d != 1) throw std::invalid_argument("root must have degree 1");
            continue;
        }
        if (d == 0 && n_nodes == 1) {
            if (!label_[x]) throw std::invalid_argument("single-node tree must be a leaf");
            continue;
        }
        if (d == 1) {
            if (!label_[x]) throw std::invalid_argument("unlabelled leaf " + std::to_string(x));
        } else if (d != 3) {
            throw std::invalid_argument("node " + std::to_string(x) + " has degree " + std::to_string(d) +
                                        " (binary trees need 1 or 3)");
        }
    }
    if (root_) build_rooted_views();
}

void ContractionTree::build_rooted_views() {
    const std::size_t n_nodes = adj_.size();
    parent_.assign(n_nodes, std::nullopt);
    parent_edge_.assign(n_nodes, TreeEdgeId{});
    children_.assign(n_nodes, {});
    below_.assign(n_nodes, {});
    post_order_.clear();
    // iterative DFS producing post-order
    std::vector<std::pair<std::size_t, std::size_t>> stack{{index(*root_), 0}};
    std::vector<bool> seen(n_nodes, false);
    seen[index(*root_)] = true;
    while (!stack.empty()) {
        auto& [x, k] = stack.back();
        if (k < adj_[x].size()) {
            auto nb = adj_[x][k++];
            if (!seen[index(nb.node)]) {
                seen[index(nb.node)] = true;
                parent_[index(nb.node)] = make_id<NodeId>(x);
                parent_edge_[index(nb.node)] = nb.edge;
                children_[x].push_back(nb.node);
                stack.emplace_back(index(nb.node), 0);
            }
        } else {
            post_order_.push_back(make_id<NodeId>(x));
            stack.pop_back();
        }
    }
    for (auto x : post_order_) {
        auto& c = children_[index(x)];
        std::sort(c.begin(), c.end());
        auto& b = below_[index(x)];
        if (c.empty()) {
            if (label_[index(x)] && x != *root_) b.push_back(*label_[index(x)]);
        } else {
            for (auto ch : c) b.insert(b.end(), below_[index(ch)].begin(), below_[index(ch)].end());
            std::sort(b.begin(), b.end());
        }
    }
}

void ContractionTree::require_rooted(const char* what) const {
    if (!root_) throw std::logic_error(std::string(what) + " requires a rooted contraction tree");
}

bool ContractionTree::is_leaf(NodeId x) const {
    if (root_ && x == *root_) return false;
    return adj_.at(index(x)).size() <= 1;
}

std::vector<NodeId> ContractionTree::internal_nodes() const {
    std::vector<NodeId> out;
    for (std::size_t x = 0; x < adj_.size(); ++x)
        if (is_internal(make_id<NodeId>(x))) out.push_back(make_id<NodeId>(x));
    return out;
}

std::optional<NodeId> ContractionTree::parent(NodeId x) const {
    require_rooted("parent");
    return parent_.at(index(x));
}

TreeEdgeId ContractionTree::parent_edge(NodeId x) const {
    require_rooted("parent_edge");
    if (!parent_.at(index(x))) throw std::logic_error("the root has no parent edge");
    return parent_edge_[index(x)];
}

std::span<const NodeId> ContractionTree::children(NodeId x) const {
    require_rooted("children");
    return children_.at(index(x));
}

const std::vector<VertexId>& ContractionTree::subtree_vertices(NodeId x) const {
    require_rooted("subtree_vertices");
    return below_.at(index(x));
}

const std::vector<NodeId>& ContractionTree::post_order() const {
    require_rooted("post_order");
    return post_order_;
}

namespace {

struct Form {
    std::size_t min_label;
    std::string text;
};

Form canonical_below(const ContractionTree& t, NodeId x, std::optional<NodeId> from) {
    if (t.label_of(x) && (!t.root() || x != *t.root()) && t.degree(x) <= 1) {
        const auto v = index(*t.label_of(x));
        return {v, std::to_string(v)};
    }
    std::vector<Form> parts;
    for (auto nb : t.neighbors(x)) {
        if (from && nb.node == *from) continue;
        parts.push_back(canonical_below(t, nb.node, x));
    }
    std::sort(parts.begin(), parts.end(), [](const Form& a, const Form& b) { return a.min_label < b.min_label; });
    Form f{parts.front().min_label, "("};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) f.text += ",";
        f.text += parts[i].text;
    }
    f.text += ")";
    return f;
}

}  // namespace

std::string ContractionTree::canonical_form() const {
    if (root_) {
        const auto child = adj_[index(*root_)].front().node;
        auto inner = canonical_below(*this, child, *root_);
        std::string prefix = root_label_ ? "root[" + std::to_string(index(*root_label_)) + "]" : "root";
        if (is_leaf(child)) return prefix + "(" + inner.text + ")";
        return prefix + inner.text;
    }
    if (adj_.size() == 1) return std::to_string(index(*label_[0]));
    // anchor at the leaf of vertex 0
    const auto anchor = leaf_of_[0];
    const auto next = adj_[index(anchor)].front().node;
    auto rest = canonical_below(*this, next, anchor);
    return "(0," + rest.text + ")";
}

bool same_labeled_tree(const ContractionTree& a, const ContractionTree& b) {
    return a.vertex_count() == b.vertex_count() && a.is_rooted() == b.is_rooted() &&
           a.canonical_form() == b.canonical_form();
}

// ------------------------------------------------------------------ routings

void check_tree_matches(const Network& net, const ContractionTree& tree) {
    if (tree.vertex_count() != net.vertex_count())
        throw std::invalid_argument("tree has " + std::to_string(tree.vertex_count()) + " labelled vertices, network has " +
                                    std::to_string(net.vertex_count()));
    if (net.has_open_legs()) throw std::invalid_argument("network has open legs; absorb them into an environment first");
    if (tree.root_label() && tree.root_label() != net.environment())
        throw std::invalid_argument("root is bound to a vertex that is not the network environment");
}

namespace {

/// Pre-order walk from node 0 used to root Steiner-tree computations.
struct Walk {
    std::vector<std::size_t> order;
    std::vector<std::size_t> parent;
    std::vector<TreeEdgeId> parent_edge;
};

Walk walk_from_zero(const ContractionTree& tree) {
    const std::size_t n = tree.node_count();
    Walk w;
    w.parent.assign(n, SIZE_MAX);
    w.parent_edge.assign(n, TreeEdgeId{});
    std::vector<std::size_t> stack{0};
    std::vector<bool> seen(n, false);
    seen[0] = true;
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        w.order.push_back(x);
        for (auto nb : tree.neighbors(make_id<NodeId>(x))) {
            if (seen[index(nb.node)]) continue;
            seen[index(nb.node)] = true;
            w.parent[index(nb.node)] = x;
            w.parent_edge[index(nb.node)] = nb.edge;
            stack.push_back(index(nb.node));
        }
    }
    return w;
}

template <class Visit>
void for_each_routing(const Network& net, const ContractionTree& tree, Visit&& visit) {
    check_tree_matches(net, tree);
    const auto walk = walk_from_zero(tree);
    const std::size_t n = tree.node_count();
    std::vector<std::size_t> count(n);
    std::vector<char> in_nodes(n);
    for (const auto& e : net.edges()) {
        std::fill(count.begin(), count.end(), 0);
        std::fill(in_nodes.begin(), in_nodes.end(), 0);
        for (auto v : e.endpoints) {
            ++count[index(tree.leaf_of(v))];
            in_nodes[index(tree.leaf_of(v))] = 1;
        }
        const std::size_t k = e.endpoints.size();
        Routing r;
        r.edge = e.id;
        for (auto it = walk.order.rbegin(); it != walk.order.rend(); ++it) {
            const auto x = *it;
            if (walk.parent[x] == SIZE_MAX) continue;
            if (count[x] > 0 && count[x] < k) {
                r.tree_edges.push_back(walk.parent_edge[x]);
                in_nodes[x] = 1;
                in_nodes[walk.parent[x]] = 1;
            }
            count[walk.parent[x]] += count[x];
        }
        for (std::size_t x = 0; x < n; ++x)
            if (in_nodes[x]) r.nodes.push_back(make_id<NodeId>(x));
        std::sort(r.tree_edges.begin(), r.tree_edges.end());
        visit(e, std::move(r));
    }
}

}  // namespace

std::vector<Routing> compute_routings(const Network& net, const ContractionTree& tree) {
    std::vector<Routing> out;
    out.reserve(net.edge_count());
    for_each_routing(net, tree, [&](const Edge&, Routing r) { out.push_back(std::move(r)); });
    return out;
}

CongestionMap congestion(const Network& net, const ContractionTree& tree) {
    CongestionMap m;
    m.node_con.assign(tree.node_count(), 0.0);
    m.tree_edge_con.assign(tree.edge_count(), 0.0);
    m.node_cost.assign(tree.node_count(), ExactCost(1));
    m.tree_edge_cost.assign(tree.edge_count(), ExactCost(1));
    for_each_routing(net, tree, [&](const Edge& e, Routing r) {
        for (auto x : r.nodes) {
            m.node_con[index(x)] += e.weight;
            m.node_cost[index(x)] *= ExactCost(e.dim);
        }
        for (auto f : r.tree_edges) {
            m.tree_edge_con[index(f)] += e.weight;
            m.tree_edge_cost[index(f)] *= ExactCost(e.dim);
        }
    });
    m.vertcon_cost = ExactCost(1);
    for (std::size_t x = 0; x < m.node_cost.size(); ++x) {
        if (x == 0 || m.node_cost[x] > m.vertcon_cost) {
            m.vertcon_cost = m.node_cost[x];
            m.vertcon_node = make_id<NodeId>(x);
        }
    }
    m.edgecon_cost = ExactCost(1);
    for (std::size_t f = 0; f < m.tree_edge_cost.size(); ++f) {
        if (f == 0 || m.tree_edge_cost[f] > m.edgecon_cost) {
            m.edgecon_cost = m.tree_edge_cost[f];
            m.edgecon_edge = make_id<TreeEdgeId>(f);
        }
    }
    m.vertcon = m.vertcon_cost.log2();
    m.edgecon = m.tree_edge_cost.empty() ? 0.0 : m.edgecon_cost.log2();
    return m;
}

UnitCongestion unit_congestion(const Network& net, const ContractionTree& tree) {
    UnitCongestion u;
    u.node.assign(tree.node_count(), 0);
    u.tree_edge.assign(tree.edge_count(), 0);
    for_each_routing(net, tree, [&](const Edge&, Routing r) {
        for (auto x : r.nodes) ++u.node[index(x)];
        for (auto f : r.tree_edges) ++u.tree_edge[index(f)];
    });
    for (auto c : u.node) u.vertcon = std::max(u.vertcon, c);
    for (auto c : u.tree_edge) u.edgecon = std::max(u.edgecon, c);
    return u;
}

// ---------------------------------------------------------- orders and trees

ContractionStep make_step(std::vector<VertexId> a, std::vector<VertexId> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (!a.empty() && !b.empty() && b.front() < a.front()) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

ContractionOrder linear_order(std::span<const VertexId> sequence) {
    ContractionOrder order;
    if (sequence.size() < 2) return order;
    std::vector<VertexId> prefix{sequence[0]};
    for (std::size_t i = 1; i < sequence.size(); ++i) {
        order.push_back(make_step(prefix, {sequence[i]}));
        prefix.push_back(sequence[i]);
    }
    return order;
}

ContractionTree tree_from_order(const Network& net, const ContractionOrder& order) {
    const auto env = net.environment();
    std::vector<VertexId> verts;
    for (std::size_t v = 0; v < net.vertex_count(); ++v)
        if (!env || index(*env) != v) verts.push_back(make_id<VertexId>(v));
    if (verts.empty()) throw std::invalid_argument("network has no tensors to contract");

    struct Group {
        std::vector<VertexId> members;
        NodeId node;
        bool alive;
    };
    std::vector<Group> groups;
    std::vector<std::size_t> group_of(net.vertex_count(), SIZE_MAX);
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<NodeId> leaf_of(net.vertex_count());
    std::size_t next = 0;
    for (auto v : verts) {
        const auto node = make_id<NodeId>(next++);
        leaf_of[index(v)] = node;
        group_of[index(v)] = groups.size();
        groups.push_back({{v}, node, true});
    }

    auto find_group = [&](std::size_t step, const std::vector<VertexId>& side) -> std::size_t {
        const std::string where = "contraction step " + std::to_string(step + 1) + ": ";
        if (side.empty()) throw std::invalid_argument(where + "empty vertex set");
        for (auto v : side) {
            if (index(v) >= net.vertex_count()) throw std::invalid_argument(where + "unknown vertex");
            if (env && v == *env) throw std::invalid_argument(where + "the environment vertex is not contracted");
        }
        const auto g = group_of[index(side.front())];
        auto sorted = side;
        std::sort(sorted.begin(), sorted.end());
        if (!groups[g].alive || groups[g].members != sorted)
            throw std::invalid_argument(where + "vertex set {" + net.name(side.front()) +
                                        ",...} is not a current tensor (already consumed or never formed)");
        return g;
    };

    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto ga = find_group(i, order[i].left);
        const auto gb = find_group(i, order[i].right);
        if (ga == gb) throw std::invalid_argument("contraction step " + std::to_string(i + 1) + ": contracts a tensor with itself");
        const auto node = make_id<NodeId>(next++);
        edges.emplace_back(groups[ga].node, node);
        edges.emplace_back(groups[gb].node, node);
        Group merged{groups[ga].members, node, true};
        merged.members.insert(merged.members.end(), groups[gb].members.begin(), groups[gb].members.end());
        std::sort(merged.members.begin(), merged.members.end());
        groups[ga].alive = groups[gb].alive = false;
        for (auto v : merged.members) group_of[index(v)] = groups.size();
        groups.push_back(std::move(merged));
    }
    if (order.size() + 1 != verts.size())
        throw std::invalid_argument("contraction order ends with " + std::to_string(verts.size() - order.size()) +
                                    " tensors unmerged");
    const auto top = groups.back().node;
    const auto root = make_id<NodeId>(next++);
    edges.emplace_back(top, root);
    if (env) leaf_of[index(*env)] = root;
    return ContractionTree(net.vertex_count(), std::move(edges), std::move(leaf_of), root, env);
}

namespace {

bool ready(const ContractionTree& tree, NodeId x, const std::vector<char>& done) {
    for (auto c : tree.children(x))
        if (tree.is_internal(c) && !done[index(c)]) return false;
    return true;
}

ContractionStep step_of(const ContractionTree& tree, NodeId x) {
    auto ch = tree.children(x);
    return make_step(tree.subtree_vertices(ch[0]), tree.subtree_vertices(ch[1]));
}

/// Internal nodes sorted by their sorted subtree vertex lists.
std::vector<NodeId> internal_by_key(const ContractionTree& tree) {
    auto nodes = tree.internal_nodes();
    std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
        return tree.subtree_vertices(a) < tree.subtree_vertices(b);
    });
    return nodes;
}

}  // namespace

ContractionOrder default_order(const ContractionTree& tree) {
    if (!tree.is_rooted()) throw std::logic_error("default_order requires a rooted tree");
    const auto nodes = internal_by_key(tree);
    std::vector<char> done(tree.node_count(), 0);
    ContractionOrder order;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        for (auto x : nodes) {
            if (done[index(x)] || !ready(tree, x, done)) continue;
            done[index(x)] = 1;
            order.push_back(step_of(tree, x));
            break;
        }
    }
    return order;
}

void for_each_order(const ContractionTree& tree, const std::function<bool(const ContractionOrder&)>& visit) {
    if (!tree.is_rooted()) throw std::logic_error("for_each_order requires a rooted tree");
    const auto nodes = internal_by_key(tree);
    std::vector<char> done(tree.node_count(), 0);
    ContractionOrder order;
    bool stop = false;
    std::function<void()> recurse = [&]() {
        if (stop) return;
        if (order.size() == nodes.size()) {
            if (!visit(order)) stop = true;
            return;
        }
        for (auto x : nodes) {
            if (done[index(x)] || !ready(tree, x, done)) continue;
            done[index(x)] = 1;
            order.push_back(step_of(tree, x));
            recurse();
            order.pop_back();
            done[index(x)] = 0;
            if (stop) return;
        }
    };
    recurse();
}

std::vector<ContractionOrder> all_orders(const ContractionTree& tree) {
    std::vector<ContractionOrder> out;
    for_each_order(tree, [&](const ContractionOrder& o) {
        out.push_back(o);
        return true;
    });
    return out;
}

std::vector<ContractionOrder> orders_of_unrooted(const ContractionTree& tree) {
    if (tree.is_rooted()) throw std::logic_error("orders_of_unrooted expects an unrooted tree");
    std::set<ContractionOrder> seen;
    for (std::size_t f = 0; f < tree.edge_count(); ++f) {
        const auto rooted = root_at(tree, make_id<TreeEdgeId>(f));
        for_each_order(rooted, [&](const ContractionOrder& o) {
            seen.insert(o);
            return true;
        });
    }
    return {seen.begin(), seen.end()};
}

void check_schedule(const ContractionTree& tree, std::span<const NodeId> schedule) {
    if (!tree.is_rooted()) throw std::logic_error("schedules require a rooted tree");
    std::vector<char> done(tree.node_count(), 0);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto x = schedule[i];
        const std::string where = "schedule step " + std::to_string(i + 1) + ": ";
        if (index(x) >= tree.node_count() || !tree.is_internal(x))
            throw std::invalid_argument(where + "node " + std::to_string(index(x)) + " is not an internal node");
        if (done[index(x)]) throw std::invalid_argument(where + "node contracted twice");
        if (!ready(tree, x, done)) throw std::invalid_argument(where + "node contracted before its children");
        done[index(x)] = 1;
    }
    const auto expected = tree.internal_nodes().size();
    if (schedule.size() != expected)
        throw std::invalid_argument("schedule has " + std::to_string(schedule.size()) + " steps, tree needs " +
                                    std::to_string(expected));
}

std::vector<NodeId> schedule_from_order(const ContractionTree& tree, const ContractionOrder& order) {
    if (!tree.is_rooted()) throw std::logic_error("schedule_from_order requires a rooted tree");
    std::map<ContractionStep, NodeId> by_step;
    for (auto x : tree.internal_nodes()) by_step.emplace(step_of(tree, x), x);
    std::vector<NodeId> schedule;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto norm = make_step(order[i].left, order[i].right);
        auto it = by_step.find(norm);
        if (it == by_step.end())
            throw std::invalid_argument("contraction step " + std::to_string(i + 1) + " does not match any node of the tree");
        schedule.push_back(it->second);
    }
    check_schedule(tree, schedule);
    return schedule;
}

ContractionOrder order_from_schedule(const ContractionTree& tree, std::span<const NodeId> schedule) {
    check_schedule(tree, schedule);
    ContractionOrder order;
    for (auto x : schedule) order.push_back(step_of(tree, x));
    return order;
}

// ----------------------------------------------------------------- rooting

ContractionTree root_at(const ContractionTree& tree, TreeEdgeId f) {
    if (tree.is_rooted()) throw std::logic_error("tree is already rooted");
    if (index(f) >= tree.edge_count()) throw std::out_of_range("root_at: no such tree edge");
    std::vector<std::pair<NodeId, NodeId>> edges(tree.edge_list().begin(), tree.edge_list().end());
    const auto n = tree.node_count();
    const auto split = make_id<NodeId>(n);
    const auto root = make_id<NodeId>(n + 1);
    auto [a, b] = edges[index(f)];
    edges[index(f)] = {a, split};
    edges.emplace_back(split, b);
    edges.emplace_back(split, root);
    std::vector<NodeId> leaf_of(tree.leaf_map().begin(), tree.leaf_map().end());
    return ContractionTree(tree.vertex_count(), std::move(edges), std::move(leaf_of), root);
}

ContractionTree root_at_leaf(const ContractionTree& tree, VertexId v) {
    if (tree.is_rooted()) throw std::logic_error("tree is already rooted");
    const auto x = tree.leaf_of(v);
    std::vector<std::pair<NodeId, NodeId>> edges(tree.edge_list().begin(), tree.edge_list().end());
    std::vector<NodeId> leaf_of(tree.leaf_map().begin(), tree.leaf_map().end());
    return ContractionTree(tree.vertex_count(), std::move(edges), std::move(leaf_of), x, v);
}

ContractionTree unroot(const ContractionTree& tree) {
    if (!tree.is_rooted()) throw std::logic_error("tree is not rooted");
    std::vector<NodeId> leaf_of(tree.leaf_map().begin(), tree.leaf_map().end());
    std::vector<std::pair<NodeId, NodeId>> edges(tree.edge_list().begin(), tree.edge_list().end());
    if (tree.root_label()) return ContractionTree(tree.vertex_count(), std::move(edges), std::move(leaf_of));

    const auto root = *tree.root();
    const auto top = tree.neighbors(root).front().node;
    std::vector<std::size_t> removed{index(root)};
    std::vector<std::pair<NodeId, NodeId>> kept;
    if (tree.is_leaf(top)) {
        // leaf + root only
        kept.clear();
    } else {
        removed.push_back(index(top));
        std::vector<NodeId> others;
        for (auto nb : tree.neighbors(top))
            if (nb.node != root) others.push_back(nb.node);
        bool joined = false;
        for (auto [a, b] : edges) {
            const bool touches_top = a == top || b == top;
            if (!touches_top) {
                kept.emplace_back(a, b);
            } else if (a != root && b != root && !joined) {
                kept.emplace_back(others[0], others[1]);
                joined = true;
            }
        }
    }
    std::sort(removed.begin(), removed.end());
    auto renumber = [&](NodeId x) {
        const auto shift = static_cast<std::size_t>(std::lower_bound(removed.begin(), removed.end(), index(x)) - removed.begin());
        return make_id<NodeId>(index(x) - shift);
    };
    for (auto& [a, b] : kept) {
        a = renumber(a);
        b = renumber(b);
    }
    for (auto& x : leaf_of) x = renumber(x);
    return ContractionTree(tree.vertex_count(), std::move(kept), std::move(leaf_of));
}

ContractionTree root_for(const Network& net, const ContractionTree& tree, TreeEdgeId f) {
    if (net.environment()) return root_at_leaf(tree, *net.environment());
    return root_at(tree, f);
}

// ----------------------------------------------------------------- builders

ContractionTree tree_from_insertions(std::size_t vertex_count, std::span<const std::size_t> choices) {
    if (vertex_count == 0) throw std::invalid_argument("tree needs at least one leaf");
    std::vector<NodeId> leaf_of(vertex_count);
    std::vector<std::pair<NodeId, NodeId>> edges;
    if (vertex_count == 1) {
        leaf_of[0] = NodeId{0};
        return ContractionTree(1, {}, leaf_of);
    }
    if (vertex_count == 2) {
        leaf_of = {NodeId{0}, NodeId{1}};
        return ContractionTree(2, {{NodeId{0}, NodeId{1}}}, leaf_of);
    }
    if (choices.size() + 3 != vertex_count) throw std::invalid_argument("need one insertion choice per leaf beyond the third");
    leaf_of[0] = NodeId{0};
    leaf_of[1] = NodeId{1};
    leaf_of[2] = NodeId{2};
    const NodeId center{3};
    edges = {{NodeId{0}, center}, {NodeId{1}, center}, {NodeId{2}, center}};
    std::size_t next = 4;
    for (std::size_t k = 3; k < vertex_count; ++k) {
        const auto c = choices[k - 3];
        if (c >= edges.size()) throw std::out_of_range("insertion choice out of range");
        const auto mid = make_id<NodeId>(next++);
        const auto leaf = make_id<NodeId>(next++);
        auto [a, b] = edges[c];
        edges[c] = {a, mid};
        edges.emplace_back(mid, b);
        edges.emplace_back(mid, leaf);
        leaf_of[k] = leaf;
    }
    return ContractionTree(vertex_count, std::move(edges), std::move(leaf_of));
}

ContractionTree random_unrooted_tree(std::size_t vertex_count, std::mt19937_64& rng) {
    std::vector<std::size_t> choices;
    for (std::size_t k = 3; k < vertex_count; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, 2 * k - 4);
        choices.push_back(pick(rng));
    }
    return tree_from_insertions(vertex_count, choices);
}

ContractionTree caterpillar(std::span<const VertexId> sequence) {
    const std::size_t n = sequence.size();
    std::vector<char> seen(n, 0);
    for (auto v : sequence) {
        if (index(v) >= n || seen[index(v)]) throw std::invalid_argument("caterpillar needs a permutation of the vertices");
        seen[index(v)] = 1;
    }
    std::vector<NodeId> leaf_of(n);
    for (std::size_t i = 0; i < n; ++i) leaf_of[index(sequence[i])] = make_id<NodeId>(i);
    if (n == 1) return ContractionTree(1, {}, leaf_of);
    if (n == 2) return ContractionTree(2, {{NodeId{0}, NodeId{1}}}, leaf_of);
    // spine nodes n .. 2n-3; spine k holds leaf k+1, ends hold two leaves
    std::vector<std::pair<NodeId, NodeId>> edges;
    auto spine = [&](std::size_t k) { return make_id<NodeId>(n + k); };
    const std::size_t s = n - 2;
    edges.emplace_back(make_id<NodeId>(0), spine(0));
    for (std::size_t k = 0; k < s; ++k) edges.emplace_back(make_id<NodeId>(k + 1), spine(k));
    edges.emplace_back(make_id<NodeId>(n - 1), spine(s - 1));
    for (std::size_t k = 0; k + 1 < s; ++k) edges.emplace_back(spine(k), spine(k + 1));
    return ContractionTree(n, std::move(edges), std::move(leaf_of));
}

}  // namespace tnc
