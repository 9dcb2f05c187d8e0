#ifndef TNC_DECOMPOSITION_HPP
#define TNC_DECOMPOSITION_HPP

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "tnc/contraction_tree.hpp"
#include "tnc/network.hpp"

namespace tnc {

/// Binary tree whose leaves biject with the edges of a target graph.
/// Nodes are 0..node_count-1; leaf_of is indexed by position in graph.edges.
struct BranchDecomposition {
    std::size_t node_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> tree_edges;
    std::vector<std::size_t> leaf_of;
};

/// Tree whose nodes carry bags of target-graph vertices (sorted).
struct TreeDecomposition {
    std::vector<std::pair<std::size_t, std::size_t>> tree_edges;
    std::vector<std::vector<std::size_t>> bags;

    std::size_t node_count() const noexcept { return bags.size(); }
};

/// Throws std::invalid_argument unless bd is a tree with internal degree 3
/// whose leaves biject with graph's edges.
void validate_branch_decomposition(const BranchDecomposition& bd, const SimpleGraph& graph);

/// Largest number of graph vertices whose edge-spanning subtree contains a
/// single tree edge; 0 when the tree has no edges.
std::size_t branch_width(const BranchDecomposition& bd, const SimpleGraph& graph);

/// Checks the three decomposition clauses (vertex coverage, edge coverage,
/// connectivity) and throws std::invalid_argument naming the one violated.
/// Returns largest bag size minus one (-1 for an empty graph).
int tree_width(const TreeDecomposition& td, const SimpleGraph& graph);

/// Edge counts beyond which the exact solvers refuse (CapExceeded).
inline constexpr std::size_t kExactBranchwidthEdgeCap = 16;
inline constexpr std::size_t kExactTreewidthVertexCap = 20;

struct BranchwidthResult {
    std::size_t width = 0;
    BranchDecomposition bd;
};
/// Optimal branch decomposition by dynamic programming over edge subsets.
BranchwidthResult exact_branchwidth(const SimpleGraph& graph);

struct TreewidthResult {
    int width = -1;
    TreeDecomposition td;
    std::vector<std::size_t> elimination_order;
};
/// Optimal tree decomposition by dynamic programming over elimination prefixes.
TreewidthResult exact_treewidth(const SimpleGraph& graph);

/// Tree decomposition induced by eliminating vertices in the given order.
TreeDecomposition decomposition_from_elimination(const SimpleGraph& graph, const std::vector<std::size_t>& order);

/// Branch decomposition of line_graph(net) built from a tree embedding by
/// grafting two levels of caterpillars in place of each vertex leaf. Line-graph
/// edges of parallel wires go to their smaller common vertex. Rooted trees
/// are unrooted first. Throws on hyperedges and open legs.
BranchDecomposition embedding_to_branch_decomposition(const Network& net, const ContractionTree& tree);

/// Tree embedding of net from a branch decomposition of line_graph(net): each
/// vertex gets a new leaf next to a node shared by all its wires' subtrees,
/// on the side that adds the fewest wires. The original leaves are pruned and
/// degree-2 nodes suppressed. Throws unless bd decomposes line_graph(net).
ContractionTree branch_decomposition_to_embedding(const Network& net, const BranchDecomposition& bd);

struct EmbeddingDecomposition {
    TreeDecomposition td;  // over line_graph(net); one bag per tree node
    int width = -1;
};
/// Bag of a tree node = the wires routed through it. Validated before returning.
EmbeddingDecomposition validate_embedding_as_tree_decomposition(const Network& net, const ContractionTree& tree);

/// Branch decomposition from a tree decomposition: every graph edge becomes
/// a leaf hung off a bag containing it, bag-less branches are pruned, nodes of
/// degree above three are split into caterpillars and degree-2 nodes suppressed.
BranchDecomposition tree_to_branch_decomposition(const TreeDecomposition& td, const SimpleGraph& graph);

struct ImportedTree {
    ContractionTree tree;
    BranchDecomposition bd;     // intermediate decomposition of the line graph
    std::size_t bd_width = 0;
    std::size_t vertcon = 0;    // unit congestion of the result
    std::size_t edgecon = 0;
    std::size_t vertcon_bound = 0;  // max(maxdeg, 3/2 (bd_width + maxdeg/3)); reported, not enforced
};
/// Contraction tree from a tree decomposition of line_graph(net). Validity is
/// guaranteed; the achieved congestion is reported, not optimised.
ImportedTree import_tree_decomposition(const TreeDecomposition& td, const Network& net);

// ------------------------------------------------------------ text formats

/// PACE 2017 format: "s td <bags> <max bag> <vertices>", "b <i> <v>...",
/// then tree edges; all indices 1-based, "c" lines are comments.
void write_td(std::ostream& out, const TreeDecomposition& td, std::size_t vertex_count);
struct ParsedTd {
    TreeDecomposition td;
    std::size_t vertex_count = 0;
};
ParsedTd read_td(std::istream& in);

/// "s bd <nodes> <graph edges>", "l <graph edge> <node>" per leaf, then tree
/// edges; 1-based, "c" lines are comments.
void write_bd(std::ostream& out, const BranchDecomposition& bd);
BranchDecomposition read_bd(std::istream& in);

}  // namespace tnc

#endif
