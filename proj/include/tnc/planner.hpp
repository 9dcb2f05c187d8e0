#ifndef TNC_PLANNER_HPP
#define TNC_PLANNER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tnc/contraction_tree.hpp"
#include "tnc/cost_model.hpp"
#include "tnc/network.hpp"

namespace tnc {

enum class Objective { total_time, vertcon, edgecon, parallel_time, peak_memory };

std::string_view to_string(Objective o);
/// Accepts the names printed by to_string; throws std::invalid_argument otherwise.
Objective parse_objective(std::string_view name);

/// Value a plan is ranked by: the objective's exact cost.
ExactCost objective_value(const CostReport& report, Objective o);

struct Plan {
    Network net;  // the planned network (open legs absorbed)
    ContractionTree tree;  // rooted
    CostReport report;
    ExactCost value;       // objective_value(report, objective)
    bool exact = true;     // false for heuristic fallbacks
    std::uint64_t trees_examined = 0;
};

/// Default leaf cap of the exhaustive planner; overridden by the TNC_BRUTE_CAP
/// environment variable.
inline constexpr std::size_t kDefaultBruteCap = 10;
/// peak_memory needs an order search per rooting, so it gets a lower cap.
inline constexpr std::size_t kDefaultBrutePeakCap = 8;
std::size_t default_brute_cap(Objective o);

struct BruteOptions {
    std::optional<std::size_t> cap;  // leaves (vertices after absorbing open legs)
    unsigned threads = 0;            // 0 = hardware concurrency
};

/// Global optimum over every unrooted tree and every rooting (the environment
/// leaf is always the root when there are open legs). Ties are broken by
/// total time, then by the tree's leaf-insertion code, then by rooting edge,
/// so the result does not depend on thread scheduling. Throws CapExceeded
/// over the cap.
Plan brute_force_plan(const Network& net, Objective objective, const BruteOptions& opts = {});

/// Repeatedly contracts the best adjacent pair. Score: node cost for
/// total_time, vertcon and parallel_time; result size for edgecon and
/// peak_memory. Ties: smaller result, then a seeded random choice.
Plan greedy_plan(const Network& net, Objective objective, std::uint64_t seed = 0);

/// Permutations whose caterpillar trees can be searched exhaustively.
inline constexpr std::size_t kLinearExactLimit = 10;

/// Best caterpillar (linear order). Exhaustive over vertex orderings up to
/// kLinearExactLimit contracted vertices, greedy beyond (exact = false).
Plan linear_plan(const Network& net, Objective objective);

// ------------------------------------------------------------------ slicing

struct SlicePlan {
    std::vector<EdgeId> cut_edges;     // ascending
    std::vector<std::uint64_t> dims;   // per cut edge
    double W = 0.0;                    // sum of cut weights
    Network reduced;                   // net without the cut edges, no tensors
    ExactCost assignments;             // product of cut dims

    /// Calls visit with every index tuple (odometer order, last edge fastest).
    void for_each_assignment(const std::function<void(std::span<const std::uint64_t>)>& visit) const;
};

/// Throws std::invalid_argument when a cut edge is missing, a hyperedge, an
/// open leg or a wire to the environment.
SlicePlan make_slice_plan(const Network& net, std::vector<EdgeId> cut_edges);

/// The k 2-endpoint edges with the highest edge betweenness (ties: heavier
/// edge, then smaller id). Environment wires and hyperedges are never chosen.
std::vector<EdgeId> choose_slice_edges(const Network& net, std::size_t k);

struct SlicedCost {
    ExactCost multiplier;       // number of assignments
    CostReport per_slice;       // cost of one reduced contraction
    ExactCost sequential_time;  // multiplier * per_slice.sequential_time
    ExactCost peak_memory;      // per_slice.peak_memory
    std::size_t counter_entries = 0;  // assignment counter, one index per cut edge
};

SlicedCost sliced_cost(const SlicePlan& plan, const ContractionTree& inner_tree);

}  // namespace tnc

#endif
