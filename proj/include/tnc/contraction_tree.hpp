#ifndef TNC_CONTRACTION_TREE_HPP
#define TNC_CONTRACTION_TREE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnc/exact_cost.hpp"
#include "tnc/ids.hpp"
#include "tnc/network.hpp"

namespace tnc {

struct TreeNeighbor {
    NodeId node;
    TreeEdgeId edge;
};

/// Binary tree whose leaves are in bijection with the vertices of a network.
///
/// Unrooted: internal nodes have degree 3 and every vertex owns one leaf.
/// Rooted: an extra degree-1 root node hangs off a full binary tree. The root
/// normally carries no vertex; for networks with open legs the environment
/// vertex is bound to the root instead of a leaf (root_label()).
class ContractionTree {
public:
    /// Validates every structural invariant and throws std::invalid_argument.
    /// leaf_of is indexed by VertexId; when root_label is set, leaf_of at that
    /// vertex must be the root.
    ContractionTree(std::size_t vertex_count, std::vector<std::pair<NodeId, NodeId>> edges,
                    std::vector<NodeId> leaf_of, std::optional<NodeId> root = std::nullopt,
                    std::optional<VertexId> root_label = std::nullopt);

    bool is_rooted() const noexcept { return root_.has_value(); }
    std::optional<NodeId> root() const noexcept { return root_; }
    std::optional<VertexId> root_label() const noexcept { return root_label_; }

    std::size_t vertex_count() const noexcept { return leaf_of_.size(); }
    std::size_t node_count() const noexcept { return adj_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const TreeNeighbor> neighbors(NodeId x) const { return adj_.at(index(x)); }
    std::size_t degree(NodeId x) const { return adj_.at(index(x)).size(); }
    std::pair<NodeId, NodeId> endpoints(TreeEdgeId f) const { return edges_.at(index(f)); }
    std::span<const std::pair<NodeId, NodeId>> edge_list() const noexcept { return edges_; }

    NodeId leaf_of(VertexId v) const { return leaf_of_.at(index(v)); }
    std::span<const NodeId> leaf_map() const noexcept { return leaf_of_; }
    /// Vertex bound to a node (leaves, and the root when root_label is set).
    std::optional<VertexId> label_of(NodeId x) const { return label_.at(index(x)); }
    /// Degree-1 node other than the root.
    bool is_leaf(NodeId x) const;
    bool is_internal(NodeId x) const { return !is_leaf(x) && (!root_ || x != *root_); }
    std::vector<NodeId> internal_nodes() const;

    // Rooted-only accessors; throw std::logic_error on unrooted trees.
    std::optional<NodeId> parent(NodeId x) const;
    /// Tree edge from x towards the root (the edge carrying x's output tensor).
    TreeEdgeId parent_edge(NodeId x) const;
    std::span<const NodeId> children(NodeId x) const;
    /// Vertices whose leaves lie below x (sorted; root_label excluded).
    const std::vector<VertexId>& subtree_vertices(NodeId x) const;
    /// Nodes in post-order (children before parents), root last.
    const std::vector<NodeId>& post_order() const;

    /// Labelled canonical serialisation using vertex indices; two trees are
    /// equal up to relabelling of nodes iff their canonical forms match.
    std::string canonical_form() const;

private:
    void build_rooted_views();
    void require_rooted(const char* what) const;

    std::vector<std::pair<NodeId, NodeId>> edges_;
    std::vector<std::vector<TreeNeighbor>> adj_;
    std::vector<NodeId> leaf_of_;
    std::vector<std::optional<VertexId>> label_;
    std::optional<NodeId> root_;
    std::optional<VertexId> root_label_;

    std::vector<std::optional<NodeId>> parent_;
    std::vector<TreeEdgeId> parent_edge_;
    std::vector<std::vector<NodeId>> children_;
    std::vector<std::vector<VertexId>> below_;
    std::vector<NodeId> post_order_;
};

bool same_labeled_tree(const ContractionTree& a, const ContractionTree& b);

// ------------------------------------------------------------------ routings

/// Minimal subtree of the contraction tree spanning an edge's endpoint leaves.
struct Routing {
    EdgeId edge{};
    std::vector<NodeId> nodes;           // sorted
    std::vector<TreeEdgeId> tree_edges;  // sorted
};

/// One routing per network edge, in edges() order. Throws if the tree's leaf
/// map does not cover exactly the network's vertices or open legs remain.
std::vector<Routing> compute_routings(const Network& net, const ContractionTree& tree);

/// Congestions in log2 form and as exact products of bond dimensions.
struct CongestionMap {
    std::vector<double> node_con;
    std::vector<double> tree_edge_con;
    std::vector<ExactCost> node_cost;
    std::vector<ExactCost> tree_edge_cost;

    ExactCost vertcon_cost;  // max node_cost
    ExactCost edgecon_cost;  // max tree_edge_cost
    double vertcon = 0.0;    // log2 of vertcon_cost
    double edgecon = 0.0;
    NodeId vertcon_node{};
    TreeEdgeId edgecon_edge{};
};

CongestionMap congestion(const Network& net, const ContractionTree& tree);

/// Congestion counting every routed wire with weight one.
struct UnitCongestion {
    std::vector<std::size_t> node;
    std::vector<std::size_t> tree_edge;
    std::size_t vertcon = 0;
    std::size_t edgecon = 0;
};

UnitCongestion unit_congestion(const Network& net, const ContractionTree& tree);

/// Throws unless the tree's leaves biject with the network's vertices.
void check_tree_matches(const Network& net, const ContractionTree& tree);

// ---------------------------------------------------------- orders and trees

/// One pairwise contraction of two previously formed vertex groups.
struct ContractionStep {
    std::vector<VertexId> left;   // sorted; holds the smaller first vertex
    std::vector<VertexId> right;  // sorted

    friend bool operator==(const ContractionStep&, const ContractionStep&) = default;
    friend auto operator<=>(const ContractionStep&, const ContractionStep&) = default;
};

/// Normalised step: sides sorted, side with the smaller minimum first.
ContractionStep make_step(std::vector<VertexId> a, std::vector<VertexId> b);

using ContractionOrder = std::vector<ContractionStep>;

/// Order over a vertex sequence: (v1,v2), (v1v2,v3), ...
ContractionOrder linear_order(std::span<const VertexId> sequence);

/// Rooted tree whose leaves are joined in the order given. The environment
/// vertex (if any) is not contracted; it is bound to the root. Throws
/// std::invalid_argument naming the first invalid step.
ContractionTree tree_from_order(const Network& net, const ContractionOrder& order);

/// Deterministic order of a rooted tree: among the ready internal nodes the
/// one whose subtree has the lexicographically smallest sorted vertex list
/// is contracted first.
ContractionOrder default_order(const ContractionTree& tree);

/// Calls visit for every contraction order consistent with a rooted tree
/// (the linear extensions of its internal nodes). Returns false from visit to stop.
void for_each_order(const ContractionTree& tree, const std::function<bool(const ContractionOrder&)>& visit);

/// All orders of a rooted tree, in the deterministic enumeration order.
std::vector<ContractionOrder> all_orders(const ContractionTree& tree);

/// Distinct orders represented by an unrooted tree: union over all rootings.
std::vector<ContractionOrder> orders_of_unrooted(const ContractionTree& tree);

/// Internal nodes of a rooted tree in the order the steps contract them.
std::vector<NodeId> schedule_from_order(const ContractionTree& tree, const ContractionOrder& order);
ContractionOrder order_from_schedule(const ContractionTree& tree, std::span<const NodeId> schedule);

/// Throws std::invalid_argument naming the first step whose node is not a
/// ready internal node, or when the schedule is incomplete.
void check_schedule(const ContractionTree& tree, std::span<const NodeId> schedule);

// ---------------------------------------------------------------- rooting

/// Splits tree edge f with a new node and hangs a new root off it. The two
/// halves of f keep carrying the same routings.
ContractionTree root_at(const ContractionTree& tree, TreeEdgeId f);

/// Turns the leaf of v into the root, binding v to it (used for environments).
ContractionTree root_at_leaf(const ContractionTree& tree, VertexId v);

/// Inverse of root_at / root_at_leaf.
ContractionTree unroot(const ContractionTree& tree);

/// Root a tree for a network: at the environment leaf when there is one,
/// otherwise at the given edge.
ContractionTree root_for(const Network& net, const ContractionTree& tree, TreeEdgeId f);

// ----------------------------------------------------------------- builders

/// Unrooted tree built by inserting leaves 0..n-1 one at a time; choice[k]
/// picks the tree edge (by id) that leaf k+3 subdivides. Used by the
/// exhaustive planner; each choice sequence yields a distinct labelled tree.
ContractionTree tree_from_insertions(std::size_t vertex_count, std::span<const std::size_t> choices);

/// Uniformly random unrooted tree on vertex_count labelled leaves.
ContractionTree random_unrooted_tree(std::size_t vertex_count, std::mt19937_64& rng);

/// Unrooted caterpillar with leaves in the given vertex order.
ContractionTree caterpillar(std::span<const VertexId> sequence);

}  // namespace tnc

#endif
