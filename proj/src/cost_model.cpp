#include "tnc/cost_model.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace tnc {

namespace {

void require_rooted(const ContractionTree& tree, const char* what) {
    if (!tree.is_rooted()) throw std::invalid_argument(std::string(what) + " needs a rooted contraction tree");
}

/// The one non-root leaf of a tree without internal nodes.
NodeId lone_leaf(const ContractionTree& tree) {
    for (std::size_t x = 0; x < tree.node_count(); ++x)
        if (tree.is_leaf(make_id<NodeId>(x))) return make_id<NodeId>(x);
    throw std::logic_error("tree has no leaf");
}

ExactCost sequential_from(const ContractionTree& tree, const CongestionMap& cm) {
    if (tree.internal_nodes().empty() && tree.is_rooted()) return cm.node_cost[index(lone_leaf(tree))];
    ExactCost total(0);
    for (auto c : cm.node_cost) total += c;
    return total;
}

PeakMemory peak_from(const ContractionTree& tree, const CongestionMap& cm, std::span<const NodeId> schedule) {
    check_schedule(tree, schedule);
    PeakMemory pm;
    if (schedule.empty()) {
        pm.peak = cm.node_cost[index(lone_leaf(tree))];
        return pm;
    }
    ExactCost live(0);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto t = schedule[i];
        ExactCost leaf_in(0), internal_in(0);
        for (auto c : tree.children(t)) {
            const auto in = cm.tree_edge_cost[index(tree.parent_edge(c))];
            if (tree.is_leaf(c))
                leaf_in += in;
            else
                internal_in += in;
        }
        const auto out = cm.tree_edge_cost[index(tree.parent_edge(t))];
        StepCost s;
        s.step = i + 1;
        s.node = t;
        s.time = cm.node_cost[index(t)];
        s.memory = live + leaf_in + out;
        live = live - internal_in + out;
        s.memory_after = live;
        pm.peak = std::max(pm.peak, s.memory);
        pm.steps.push_back(s);
    }
    return pm;
}

ParallelTime parallel_from(const ContractionTree& tree, const CongestionMap& cm) {
    ParallelTime pt;
    if (tree.internal_nodes().empty()) {
        const auto leaf = lone_leaf(tree);
        pt.time = cm.node_cost[index(leaf)];
        pt.critical_path = {leaf, *tree.root()};
        return pt;
    }
    std::vector<ExactCost> dist(tree.node_count());
    std::vector<std::optional<NodeId>> via(tree.node_count());
    for (auto x : tree.post_order()) {
        ExactCost best(0);
        for (auto c : tree.children(x)) {
            if (!via[index(x)] || dist[index(c)] > best) {
                best = dist[index(c)];
                via[index(x)] = c;
            }
        }
        dist[index(x)] = best + cm.node_cost[index(x)];
    }
    const auto root = *tree.root();
    pt.time = dist[index(root)];
    for (std::optional<NodeId> x = root; x; x = via[index(*x)]) pt.critical_path.push_back(*x);
    std::reverse(pt.critical_path.begin(), pt.critical_path.end());
    return pt;
}

PeakOrder min_peak_from(const ContractionTree& tree, const CongestionMap& cm) {
    auto nodes = tree.internal_nodes();
    std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
        return tree.subtree_vertices(a) < tree.subtree_vertices(b);
    });
    const std::size_t k = nodes.size();
    PeakOrder result;
    if (k == 0) {
        result.peak = cm.node_cost[index(lone_leaf(tree))];
        return result;
    }
    std::vector<std::size_t> pos(tree.node_count(), SIZE_MAX);
    for (std::size_t i = 0; i < k; ++i) pos[index(nodes[i])] = i;
    std::vector<std::uint64_t> need(k, 0);
    std::vector<std::size_t> parent_pos(k, SIZE_MAX);
    std::vector<ExactCost> leaf_in(k, ExactCost(0)), out(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto t = nodes[i];
        out[i] = cm.tree_edge_cost[index(tree.parent_edge(t))];
        parent_pos[i] = pos[index(*tree.parent(t))];
        for (auto c : tree.children(t)) {
            if (tree.is_leaf(c))
                leaf_in[i] += cm.tree_edge_cost[index(tree.parent_edge(c))];
            else
                need[i] |= std::uint64_t{1} << pos[index(c)];
        }
    }
    auto live_of = [&](std::uint64_t done) {
        ExactCost live(0);
        for (std::size_t i = 0; i < k; ++i) {
            if (!(done >> i & 1)) continue;
            if (parent_pos[i] == SIZE_MAX || !(done >> parent_pos[i] & 1)) live += out[i];
        }
        return live;
    };
    auto ready = [&](std::uint64_t done, std::size_t i) {
        return !(done >> i & 1) && (need[i] & done) == need[i];
    };

    if (k > kExactPeakSearchLimit) {
        result.exact = false;
        std::vector<char> is_done(k, 0);
        for (std::size_t step = 0; step < k; ++step) {
            std::size_t pick = SIZE_MAX;
            for (std::size_t i = 0; i < k; ++i) {
                if (is_done[i]) continue;
                bool ok = true;
                for (auto c : tree.children(nodes[i]))
                    if (tree.is_internal(c) && !is_done[pos[index(c)]]) ok = false;
                if (ok && (pick == SIZE_MAX || out[i] < out[pick])) pick = i;
            }
            is_done[pick] = 1;
            result.schedule.push_back(nodes[pick]);
        }
        result.peak = peak_from(tree, cm, result.schedule).peak;
        return result;
    }

    const std::uint64_t full = (std::uint64_t{1} << k) - 1;
    std::vector<ExactCost> memo(std::size_t{1} << k);
    std::vector<std::uint8_t> choice(std::size_t{1} << k, 0xff);
    std::vector<char> known(std::size_t{1} << k, 0);
    std::function<ExactCost(std::uint64_t)> best = [&](std::uint64_t done) -> ExactCost {
        if (done == full) return ExactCost(0);
        if (known[done]) return memo[done];
        const auto live = live_of(done);
        ExactCost value;
        std::uint8_t pick = 0xff;
        for (std::size_t i = 0; i < k; ++i) {
            if (!ready(done, i)) continue;
            const auto step = live + leaf_in[i] + out[i];
            const auto v = std::max(step, best(done | std::uint64_t{1} << i));
            if (pick == 0xff || v < value) {
                value = v;
                pick = static_cast<std::uint8_t>(i);
            }
        }
        known[done] = 1;
        memo[done] = value;
        choice[done] = pick;
        return value;
    };
    result.peak = best(0);
    for (std::uint64_t done = 0; done != full;) {
        const auto i = choice[done];
        result.schedule.push_back(nodes[i]);
        done |= std::uint64_t{1} << i;
    }
    return result;
}

CostReport report_from(const Network& net, const ContractionTree& tree, const CongestionMap& cm,
                       std::span<const NodeId> schedule, bool exact) {
    CostReport r;
    r.sequential_time = sequential_from(tree, cm);
    if (tree.internal_nodes().empty()) {
        r.unrooted_sequential_time = r.sequential_time;
    } else {
        const auto plain = unroot(tree);
        r.unrooted_sequential_time = sequential_time(net, plain);
    }
    auto pm = peak_from(tree, cm, schedule);
    r.peak_memory = pm.peak;
    r.per_step = std::move(pm.steps);
    r.schedule.assign(schedule.begin(), schedule.end());
    auto pt = parallel_from(tree, cm);
    r.parallel_time = pt.time;
    r.critical_path = std::move(pt.critical_path);
    r.vertcon_cost = cm.vertcon_cost;
    r.edgecon_cost = cm.edgecon_cost;
    r.vertcon = cm.vertcon;
    r.edgecon = cm.edgecon;
    r.peak_order_exact = exact;
    return r;
}

}  // namespace

ExactCost sequential_time(const Network& net, const ContractionTree& tree) {
    return sequential_from(tree, congestion(net, tree));
}

PeakMemory peak_memory(const Network& net, const ContractionTree& tree, std::span<const NodeId> schedule) {
    require_rooted(tree, "peak_memory");
    return peak_from(tree, congestion(net, tree), schedule);
}

PeakMemory peak_memory(const Network& net, const ContractionTree& tree, const ContractionOrder& order) {
    require_rooted(tree, "peak_memory");
    const auto schedule = schedule_from_order(tree, order);
    return peak_from(tree, congestion(net, tree), schedule);
}

PeakOrder min_peak_memory_order(const Network& net, const ContractionTree& tree) {
    require_rooted(tree, "min_peak_memory_order");
    return min_peak_from(tree, congestion(net, tree));
}

ParallelTime parallel_time(const Network& net, const ContractionTree& tree) {
    require_rooted(tree, "parallel_time");
    return parallel_from(tree, congestion(net, tree));
}

CostReport cost_report(const Network& net, const ContractionTree& tree) {
    require_rooted(tree, "cost_report");
    const auto cm = congestion(net, tree);
    const auto best = min_peak_from(tree, cm);
    return report_from(net, tree, cm, best.schedule, best.exact);
}

CostReport cost_report(const Network& net, const ContractionTree& tree, std::span<const NodeId> schedule) {
    require_rooted(tree, "cost_report");
    return report_from(net, tree, congestion(net, tree), schedule, true);
}

}  // namespace tnc
