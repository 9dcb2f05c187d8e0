#ifndef TNC_EXECUTOR_HPP
#define TNC_EXECUTOR_HPP

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tnc/contraction_tree.hpp"
#include "tnc/exact_cost.hpp"
#include "tnc/network.hpp"
#include "tnc/planner.hpp"
#include "tnc/tensor.hpp"

namespace tnc {

/// Live tensor entries. Every mutation goes through one mutex so parallel
/// runs can share a tracker.
class MemoryTracker {
public:
    void allocate(std::uint64_t key, ExactCost entries);
    void release(std::uint64_t key);
    /// Records temporary buffers (permutation copies) on top of the live set.
    void transient(ExactCost entries);

    ExactCost live() const;
    ExactCost peak() const;                  // inputs + output model
    ExactCost peak_with_transients() const;  // plus permutation copies

private:
    mutable std::mutex mu_;
    std::unordered_map<std::uint64_t, ExactCost> blocks_;
    ExactCost live_{0};
    ExactCost peak_{0};
    ExactCost peak_transient_{0};
};

struct PairStats {
    ExactCost multiply_adds{0};
    ExactCost transient_entries{0};  // sizes of non-trivial permutation copies
};

/// Contracts two tensors over their shared axes. Shared labels listed in keep
/// are not summed but identified (batch axes); they stay in the output.
/// Output axes: batch (in a's order), a's free axes, b's free axes.
/// Implemented as permutation of both inputs followed by batched matrix
/// multiplication; multiply-adds = batch * left * shared * right.
DenseTensor contract_pair(const DenseTensor& a, const DenseTensor& b, std::span<const EdgeId> keep = {},
                          PairStats* stats = nullptr);

struct ExecutedStep {
    NodeId node{};
    ExactCost multiply_adds;
    ExactCost memory;  // tracker reading while inputs and output co-reside
};

struct ExecutionStats {
    std::vector<ExecutedStep> steps;
    ExactCost multiply_adds{0};   // sum over contractions
    ExactCost entries_read{0};    // leaf tensors loaded
    ExactCost output_entries{0};  // final tensor (0 when nothing was contracted)
    ExactCost peak_memory{0};
    ExactCost peak_memory_with_transients{0};

    /// Reads + multiply-adds + output: the measured counterpart of sequential_time.
    ExactCost total_time() const { return entries_read + multiply_adds + output_entries; }
};

struct ExecutionResult {
    DenseTensor value;  // rank 0 for closed networks, else axes sorted by EdgeId
    ExecutionStats stats;
    std::vector<NodeId> schedule;
};

/// Contracts a network with tensors along a rooted tree. Open legs must have
/// been absorbed (the tree is over the absorbed network). Without a schedule
/// the min-peak-memory order is used.
ExecutionResult execute(const Network& net, const ContractionTree& tree,
                        std::optional<std::span<const NodeId>> schedule = std::nullopt);
ExecutionResult execute(const Network& net, const ContractionTree& tree, const ContractionOrder& order);

struct ParallelResult {
    DenseTensor value;
    ExactCost makespan_unlimited;  // event simulation with one worker per ready task
    ExactCost makespan;            // list scheduling on the requested worker count
    ExactCost measured_total;      // sum of all task durations
    unsigned workers = 1;
};

/// Runs independent tree nodes concurrently on a pool of workers. Task
/// durations are the measured costs (leaf reads, multiply-adds, final
/// output); the makespans come from replaying those durations.
ParallelResult execute_parallel(const Network& net, const ContractionTree& tree, unsigned workers);

struct SlicedResult {
    DenseTensor value;
    ExactCost assignments;
    ExecutionStats per_slice;  // last slice's stats (all slices cost the same)
    ExactCost multiply_adds{0};
};

/// Sum over every assignment of the cut indices of the reduced network's
/// value; each assignment fixes the cut axes of the adjacent tensors.
SlicedResult execute_sliced(const Network& net, const SlicePlan& plan, const ContractionTree& inner_tree);

/// Largest total edge-index space naive_oracle accepts.
inline constexpr std::uint64_t kNaiveOracleCap = 10'000'000;

/// Sums the product of all tensor entries over every joint assignment of the
/// edge indices. Open legs (or wires to the environment) become output axes,
/// sorted by EdgeId. Throws CapExceeded beyond kNaiveOracleCap assignments.
DenseTensor naive_oracle(const Network& net);

/// max |a - b| / max |b| over entries (axes must match); infinity on shape mismatch.
double relative_error(const DenseTensor& a, const DenseTensor& b);

/// max |a - b| <= abs_tol + rel_tol * max |b|, with matching axes and extents.
bool approx_equal(const DenseTensor& a, const DenseTensor& b, double rel_tol = 1e-9, double abs_tol = 1e-12);

}  // namespace tnc

#endif
