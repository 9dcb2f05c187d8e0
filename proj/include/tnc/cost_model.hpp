#ifndef TNC_COST_MODEL_HPP
#define TNC_COST_MODEL_HPP

#include <span>
#include <vector>

#include "tnc/contraction_tree.hpp"
#include "tnc/exact_cost.hpp"
#include "tnc/network.hpp"

namespace tnc {

/// Memory model: a contraction step holds every live intermediate, the
/// step's leaf inputs (read just before use) and its freshly allocated
/// output at the same time; the inputs are freed afterwards. Units are
/// tensor entries.
struct StepCost {
    std::size_t step = 0;  // 1-based
    NodeId node{};
    ExactCost time;         // multiply-adds = node_cost(node)
    ExactCost memory;       // entries resident while the step runs
    ExactCost memory_after; // entries resident once inputs are freed
};

struct CostReport {
    ExactCost sequential_time;           // sum of node_cost over all tree nodes
    ExactCost unrooted_sequential_time;  // same sum on the tree with the root removed
    ExactCost peak_memory;
    ExactCost parallel_time;
    ExactCost vertcon_cost;
    ExactCost edgecon_cost;
    double vertcon = 0.0;
    double edgecon = 0.0;
    std::vector<NodeId> schedule;
    std::vector<StepCost> per_step;
    std::vector<NodeId> critical_path;  // leaf first, root last
    bool peak_order_exact = true;       // false when the order came from the greedy fallback
};

/// Sum of node costs; works for rooted and unrooted trees. A single tensor
/// costs its size (the root adds nothing when no contraction happens).
ExactCost sequential_time(const Network& net, const ContractionTree& tree);

struct PeakMemory {
    ExactCost peak;
    std::vector<StepCost> steps;
};

/// Peak memory of a rooted tree contracted in the given schedule (a
/// topological order of the internal nodes). Throws naming the first invalid step.
PeakMemory peak_memory(const Network& net, const ContractionTree& tree, std::span<const NodeId> schedule);
PeakMemory peak_memory(const Network& net, const ContractionTree& tree, const ContractionOrder& order);

struct PeakOrder {
    std::vector<NodeId> schedule;
    ExactCost peak;
    bool exact = true;
};

/// Schedules with more internal nodes than this use the greedy fallback.
inline constexpr std::size_t kExactPeakSearchLimit = 20;

/// Topological order minimising peak memory. Exact search over down-sets of
/// the internal nodes up to kExactPeakSearchLimit nodes; ties go to the
/// lexicographically smallest schedule under the default node ordering.
PeakOrder min_peak_memory_order(const Network& net, const ContractionTree& tree);

struct ParallelTime {
    ExactCost time;
    std::vector<NodeId> critical_path;  // leaf first, root last
};

/// Heaviest leaf-to-root path, weighting every node by its node_cost.
ParallelTime parallel_time(const Network& net, const ContractionTree& tree);

/// Full report for a rooted tree. Without a schedule the min-peak order is used.
CostReport cost_report(const Network& net, const ContractionTree& tree);
CostReport cost_report(const Network& net, const ContractionTree& tree, std::span<const NodeId> schedule);

}  // namespace tnc

#endif
