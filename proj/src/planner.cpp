#include "tnc/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>

#include "tnc/errors.hpp"

namespace tnc {

std::string_view to_string(Objective o) {
    switch (o) {
        case Objective::total_time: return "total_time";
        case Objective::vertcon: return "vertcon";
        case Objective::edgecon: return "edgecon";
        case Objective::parallel_time: return "parallel_time";
        case Objective::peak_memory: return "peak_memory";
    }
    return "?";
}

Objective parse_objective(std::string_view name) {
    for (auto o : {Objective::total_time, Objective::vertcon, Objective::edgecon, Objective::parallel_time,
                   Objective::peak_memory})
        if (to_string(o) == name) return o;
    throw std::invalid_argument("unknown objective '" + std::string(name) +
                                "' (total_time, vertcon, edgecon, parallel_time, peak_memory)");
}

ExactCost objective_value(const CostReport& r, Objective o) {
    switch (o) {
        case Objective::total_time: return r.sequential_time;
        case Objective::vertcon: return r.vertcon_cost;
        case Objective::edgecon: return r.edgecon_cost;
        case Objective::parallel_time: return r.parallel_time;
        case Objective::peak_memory: return r.peak_memory;
    }
    return r.sequential_time;
}

std::size_t default_brute_cap(Objective o) {
    if (const char* env = std::getenv("TNC_BRUTE_CAP")) {
        char* end = nullptr;
        const auto v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return o == Objective::peak_memory ? kDefaultBrutePeakCap : kDefaultBruteCap;
}

namespace {

Plan finish_plan(Network net, ContractionTree tree, Objective o, bool exact, std::uint64_t examined) {
    auto report = cost_report(net, tree);
    const auto value = objective_value(report, o);
    return Plan{std::move(net), std::move(tree), std::move(report), value, exact, examined};
}

/// Costs of vertex subsets, for networks small enough to index subsets by bitmask.
struct SubsetCosts {
    std::size_t n = 0;
    std::uint32_t all = 0;
    std::vector<ExactCost> cross;  // product of dims of edges with endpoints on both sides
    std::vector<ExactCost> node;   // [a << n | b], disjoint a, b: edges touching >= 2 of a, b, rest

    explicit SubsetCosts(const Network& net, bool pair_table = true) : n(net.vertex_count()) {
        all = n >= 32 ? ~0u : (1u << n) - 1;
        std::vector<std::uint32_t> emask;
        std::vector<std::uint64_t> dim;
        for (const auto& e : net.edges()) {
            std::uint32_t m = 0;
            for (auto v : e.endpoints) m |= 1u << index(v);
            emask.push_back(m);
            dim.push_back(e.dim);
        }
        cross.assign(std::size_t{1} << n, ExactCost(1));
        for (std::uint32_t s = 0; s <= all; ++s) {
            ExactCost c(1);
            for (std::size_t i = 0; i < emask.size(); ++i)
                if ((emask[i] & s) && (emask[i] & ~s & all)) c *= ExactCost(dim[i]);
            cross[s] = c;
        }
        if (!pair_table) return;
        node.assign(std::size_t{1} << (2 * n), ExactCost(0));
        for (std::uint32_t a = 1; a <= all; ++a) {
            const std::uint32_t free = all & ~a;
            for (std::uint32_t b = free; b; b = (b - 1) & free) {
                const std::uint32_t rest = all & ~(a | b);
                ExactCost c(1);
                for (std::size_t i = 0; i < emask.size(); ++i) {
                    const int parts = ((emask[i] & a) != 0) + ((emask[i] & b) != 0) + ((emask[i] & rest) != 0);
                    if (parts >= 2) c *= ExactCost(dim[i]);
                }
                node[(std::size_t{a} << n) | b] = c;
            }
        }
    }

    ExactCost node_cost(std::uint32_t a, std::uint32_t b) const { return node[(std::size_t{a} << n) | b]; }
};

// ------------------------------------------------------------ brute force

struct Candidate {
    ExactCost value;
    ExactCost total;
    std::vector<std::size_t> choices;
    std::size_t root_edge = 0;
    bool valid = false;
};

bool better(const Candidate& a, const Candidate& b) {
    if (!b.valid) return a.valid;
    if (!a.valid) return false;
    if (a.value != b.value) return a.value < b.value;
    if (a.total != b.total) return a.total < b.total;
    if (a.choices != b.choices) return a.choices < b.choices;
    return a.root_edge < b.root_edge;
}

class TreeEvaluator {
public:
    TreeEvaluator(const Network& net, const SubsetCosts& sc, Objective o)
        : net_(net), sc_(sc), obj_(o), n_(net.vertex_count()), env_(net.environment()) {}

    /// Evaluates the tree given by insertion edges (node numbering as in
    /// tree_from_insertions) and updates best.
    void evaluate(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges, const std::vector<std::size_t>& choices,
                  Candidate& best) {
        const std::size_t nodes = edges.size() + 1;
        adj_.assign(nodes, {});
        for (std::uint32_t f = 0; f < edges.size(); ++f) {
            adj_[edges[f].first].push_back({edges[f].second, f});
            adj_[edges[f].second].push_back({edges[f].first, f});
        }
        // DFS from node 0 (leaf of vertex 0)
        parent_.assign(nodes, UINT32_MAX);
        pedge_.assign(nodes, UINT32_MAX);
        order_.clear();
        order_.push_back(0);
        for (std::size_t i = 0; i < order_.size(); ++i) {
            const auto x = order_[i];
            for (auto [y, f] : adj_[x]) {
                if (y == parent_[x] && f == pedge_[x]) continue;
                parent_[y] = x;
                pedge_[y] = f;
                order_.push_back(y);
            }
        }
        mask_.assign(nodes, 0);
        for (std::size_t i = nodes; i-- > 0;) {
            const auto x = order_[i];
            const auto v = leaf_vertex(x);
            if (v != UINT32_MAX) mask_[x] |= 1u << v;
            if (parent_[x] != UINT32_MAX) mask_[parent_[x]] |= mask_[x];
        }
        // mask_[x] for x != 0 is the side of pedge_[x] away from node 0
        cost_.assign(nodes, ExactCost(0));
        ExactCost sum(0), vmax(0), emax(0);
        for (std::size_t x = 0; x < nodes; ++x) {
            if (adj_[x].size() == 1) {
                cost_[x] = sc_.cross[1u << leaf_vertex(static_cast<std::uint32_t>(x))];
            } else {
                std::uint32_t parts[2];
                std::size_t k = 0;
                for (auto [y, f] : adj_[x])
                    if (parent_[y] == x && pedge_[y] == f) parts[k++] = mask_[y];
                cost_[x] = sc_.node_cost(parts[0], parts[1]);
            }
            sum += cost_[x];
            vmax = std::max(vmax, cost_[x]);
        }
        ecost_.assign(edges.size(), ExactCost(0));
        for (std::size_t x = 1; x < nodes; ++x) {
            ecost_[pedge_[x]] = sc_.cross[mask_[x]];
            emax = std::max(emax, ecost_[pedge_[x]]);
        }

        Candidate c;
        c.valid = true;
        auto offer = [&](Candidate& r) {
            // enumeration is in ascending insertion-code order, so an equal
            // (value, total) from a later tree never wins
            bool take = !best.valid || r.value < best.value || (r.value == best.value && r.total < best.total);
            if (!take && r.value == best.value && r.total == best.total && r.root_edge < best.root_edge)
                take = best.choices == choices;
            if (take) {
                r.choices = choices;
                best = std::move(r);
            }
        };
        if (obj_ == Objective::vertcon || obj_ == Objective::edgecon || obj_ == Objective::total_time) {
            std::size_t f = 0;
            if (!env_) {
                for (std::size_t g = 1; g < ecost_.size(); ++g)
                    if (ecost_[g] < ecost_[f]) f = g;
                c.total = sum + ecost_[f] + ExactCost(1);
            } else {
                c.total = sum;
            }
            c.root_edge = f;
            c.value = obj_ == Objective::vertcon ? vmax : obj_ == Objective::edgecon ? emax : c.total;
            offer(c);
            return;
        }
        if (obj_ == Objective::parallel_time) {
            compute_paths(nodes);
            if (env_) {
                const auto leaf = leaf_node_of(index(*env_));
                c.value = up_[leaf] + cost_[leaf];
                c.total = sum;
                c.root_edge = 0;
                offer(c);
                return;
            }
            for (std::size_t x = 1; x < nodes; ++x) {
                Candidate r = c;
                r.root_edge = pedge_[x];
                r.value = std::max(down_[x], up_[x]) + ecost_[pedge_[x]] + ExactCost(1);
                r.total = sum + ecost_[pedge_[x]] + ExactCost(1);
                offer(r);
            }
            return;
        }
        // peak memory: exact order search per rooting
        const auto base = tree_from_insertions(n_, choices);
        auto consider = [&](const ContractionTree& rooted, std::size_t f) {
            Candidate r = c;
            r.root_edge = f;
            r.value = min_peak_memory_order(net_, rooted).peak;
            r.total = sequential_time(net_, rooted);
            offer(r);
        };
        if (env_) {
            consider(root_at_leaf(base, *env_), 0);
        } else {
            for (std::size_t f = 0; f < base.edge_count(); ++f) consider(root_at(base, make_id<TreeEdgeId>(f)), f);
        }
    }

private:
    std::uint32_t leaf_vertex(std::uint32_t x) const {
        if (x < 3) return x;
        if (x == 3) return UINT32_MAX;
        return x % 2 == 1 ? (x + 1) / 2 : UINT32_MAX;
    }
    std::uint32_t leaf_node_of(std::size_t v) const {
        if (v < 3) return static_cast<std::uint32_t>(v);
        return static_cast<std::uint32_t>(2 * v - 1);
    }

    /// down_[x]: heaviest path from a leaf below x up to x (rooted at node 0);
    /// up_[x]: heaviest path ending at parent(x) that avoids x's subtree.
    void compute_paths(std::size_t nodes) {
        down_.assign(nodes, ExactCost(0));
        up_.assign(nodes, ExactCost(0));
        for (std::size_t i = nodes; i-- > 0;) {
            const auto x = order_[i];
            ExactCost best(0);
            for (auto [y, f] : adj_[x])
                if (parent_[y] == x && pedge_[y] == f) best = std::max(best, down_[y]);
            down_[x] = best + cost_[x];
        }
        for (auto x : order_) {
            // children of x get up = cost(x) + max(up of x, down of siblings)
            for (auto [y, f] : adj_[x]) {
                if (!(parent_[y] == x && pedge_[y] == f)) continue;
                ExactCost best = parent_[x] == UINT32_MAX ? ExactCost(0) : up_[x];
                for (auto [z, g] : adj_[x])
                    if (z != y && parent_[z] == x && pedge_[z] == g) best = std::max(best, down_[z]);
                up_[y] = best + cost_[x];
            }
        }
    }

    const Network& net_;
    const SubsetCosts& sc_;
    Objective obj_;
    std::size_t n_;
    std::optional<VertexId> env_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adj_;
    std::vector<std::uint32_t> parent_, pedge_, order_, mask_;
    std::vector<ExactCost> cost_, ecost_, down_, up_;
};

void enumerate(std::size_t n, std::size_t k, std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
               std::vector<std::size_t>& choices, TreeEvaluator& eval, Candidate& best) {
    if (k == n) {
        eval.evaluate(edges, choices, best);
        return;
    }
    const auto mid = static_cast<std::uint32_t>(2 * k - 2), leaf = static_cast<std::uint32_t>(2 * k - 1);
    const std::size_t count = edges.size();
    for (std::size_t c = 0; c < count; ++c) {
        const auto saved = edges[c];
        edges[c] = {saved.first, mid};
        edges.emplace_back(mid, saved.second);
        edges.emplace_back(mid, leaf);
        choices.push_back(c);
        enumerate(n, k + 1, edges, choices, eval, best);
        choices.pop_back();
        edges.pop_back();
        edges.pop_back();
        edges[c] = saved;
    }
}

std::uint64_t double_factorial_trees(std::size_t n) {
    std::uint64_t t = 1;
    for (std::size_t k = 3; k < n; ++k) t *= 2 * k - 3;
    return t;
}

}  // namespace

Plan brute_force_plan(const Network& input, Objective objective, const BruteOptions& opts) {
    auto net = absorb_open_legs(input);
    const std::size_t n = net.vertex_count();
    const std::size_t cap = opts.cap.value_or(default_brute_cap(objective));
    if (n == 0) throw std::invalid_argument("empty network");
    if (n > cap)
        throw CapExceeded("exhaustive planning over " + std::to_string(n) + " leaves exceeds the cap of " +
                          std::to_string(cap) + "; use the greedy or linear planner");
    if (n > 11) throw CapExceeded("exhaustive planning is limited to 11 leaves");
    const auto env = net.environment();

    if (n == 1) return finish_plan(net, tree_from_order(net, {}), objective, true, 1);
    if (n == 2) {
        const auto t = tree_from_insertions(2, {});
        auto rooted = env ? root_at_leaf(t, *env) : root_at(t, TreeEdgeId{0});
        return finish_plan(std::move(net), std::move(rooted), objective, true, 1);
    }

    const SubsetCosts sc(net);
    // prefixes of the insertion code distributed over workers
    const std::size_t depth = std::min<std::size_t>(n - 3, 3);
    std::vector<std::vector<std::size_t>> prefixes{{}};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<std::vector<std::size_t>> next;
        const std::size_t options = 2 * (d + 3) - 3;
        for (const auto& p : prefixes)
            for (std::size_t c = 0; c < options; ++c) {
                auto q = p;
                q.push_back(c);
                next.push_back(std::move(q));
            }
        prefixes = std::move(next);
    }
    std::vector<Candidate> results(prefixes.size());
    std::atomic<std::size_t> next_task{0};
    auto worker = [&]() {
        TreeEvaluator eval(net, sc, objective);
        for (;;) {
            const auto i = next_task.fetch_add(1);
            if (i >= prefixes.size()) return;
            std::vector<std::pair<std::uint32_t, std::uint32_t>> edges{{0, 3}, {1, 3}, {2, 3}};
            std::vector<std::size_t> choices;
            for (std::size_t d = 0; d < prefixes[i].size(); ++d) {
                const std::size_t k = d + 3;
                const auto c = prefixes[i][d];
                const auto mid = static_cast<std::uint32_t>(2 * k - 2), leaf = static_cast<std::uint32_t>(2 * k - 1);
                const auto saved = edges[c];
                edges[c] = {saved.first, mid};
                edges.emplace_back(mid, saved.second);
                edges.emplace_back(mid, leaf);
                choices.push_back(c);
            }
            enumerate(n, 3 + prefixes[i].size(), edges, choices, eval, results[i]);
        }
    };
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, prefixes.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Candidate best;
    for (auto& r : results)
        if (better(r, best)) best = std::move(r);

    const auto t = tree_from_insertions(n, best.choices);
    auto rooted = env ? root_at_leaf(t, *env) : root_at(t, make_id<TreeEdgeId>(best.root_edge));
    auto plan = finish_plan(std::move(net), std::move(rooted), objective, true, double_factorial_trees(n));
    if (plan.value != best.value) throw std::logic_error("exhaustive planner: evaluated and reported costs differ");
    return plan;
}

// -------------------------------------------------------------------- greedy

Plan greedy_plan(const Network& input, Objective objective, std::uint64_t seed) {
    auto net = absorb_open_legs(input);
    const auto env = net.environment();
    std::vector<std::vector<VertexId>> groups;
    std::vector<std::size_t> group_of(net.vertex_count(), SIZE_MAX);
    for (std::size_t v = 0; v < net.vertex_count(); ++v) {
        if (env && index(*env) == v) continue;
        group_of[v] = groups.size();
        groups.push_back({make_id<VertexId>(v)});
    }
    std::vector<char> alive(groups.size(), 1);
    std::size_t alive_count = groups.size();
    std::mt19937_64 rng(seed);
    const bool by_cost = objective == Objective::total_time || objective == Objective::vertcon ||
                         objective == Objective::parallel_time;
    ContractionOrder order;

    auto score = [&](std::size_t a, std::size_t b) {
        ExactCost cost(1), size(1);
        for (const auto& e : net.edges()) {
            bool in_a = false, in_b = false, out = false;
            for (auto v : e.endpoints) {
                const auto g = group_of[index(v)];
                if (g == a)
                    in_a = true;
                else if (g == b)
                    in_b = true;
                else
                    out = true;
            }
            if (in_a + in_b + out >= 2) cost *= ExactCost(e.dim);
            if ((in_a || in_b) && out) size *= ExactCost(e.dim);
        }
        return std::pair{by_cost ? cost : size, size};
    };

    while (alive_count > 1) {
        std::set<std::pair<std::size_t, std::size_t>> pairs;
        for (const auto& e : net.edges()) {
            std::vector<std::size_t> gs;
            for (auto v : e.endpoints)
                if (group_of[index(v)] != SIZE_MAX) gs.push_back(group_of[index(v)]);
            std::sort(gs.begin(), gs.end());
            gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
            for (std::size_t i = 0; i < gs.size(); ++i)
                for (std::size_t j = i + 1; j < gs.size(); ++j) pairs.emplace(gs[i], gs[j]);
        }
        if (pairs.empty()) {
            for (std::size_t i = 0; i < groups.size(); ++i)
                for (std::size_t j = i + 1; j < groups.size(); ++j)
                    if (alive[i] && alive[j]) pairs.emplace(i, j);
        }
        std::vector<std::pair<std::size_t, std::size_t>> ties;
        std::pair<ExactCost, ExactCost> best{};
        for (auto [a, b] : pairs) {
            const auto s = score(a, b);
            if (ties.empty() || s < best) {
                best = s;
                ties = {{a, b}};
            } else if (s == best) {
                ties.emplace_back(a, b);
            }
        }
        std::sort(ties.begin(), ties.end(), [&](auto x, auto y) {
            return std::pair{groups[x.first].front(), groups[x.second].front()} <
                   std::pair{groups[y.first].front(), groups[y.second].front()};
        });
        std::size_t pick = 0;
        if (ties.size() > 1) pick = std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng);
        const auto [a, b] = ties[pick];
        order.push_back(make_step(groups[a], groups[b]));
        auto merged = groups[a];
        merged.insert(merged.end(), groups[b].begin(), groups[b].end());
        std::sort(merged.begin(), merged.end());
        alive[a] = alive[b] = 0;
        alive_count -= 1;
        for (auto v : merged) group_of[index(v)] = groups.size();
        groups.push_back(std::move(merged));
        alive.push_back(1);
    }
    auto tree = tree_from_order(net, order);
    return finish_plan(std::move(net), std::move(tree), objective, false, 1);
}

// -------------------------------------------------------------------- linear

namespace {

struct LinearEval {
    ExactCost value, total;
};

/// Costs of the caterpillar for a vertex sequence, folded step by step.
struct LinearState {
    ExactCost sum{0}, vmax{0}, emax{0}, dist{0}, peak{0}, prev_cut{0};
};

LinearEval finish_linear(const LinearState& s, ExactCost final_cut, Objective o) {
    // root node cost equals the final cut (output size; 1 when closed)
    const ExactCost total = s.sum + final_cut;
    ExactCost value;
    switch (o) {
        case Objective::total_time: value = total; break;
        case Objective::vertcon: value = std::max(s.vmax, final_cut); break;
        case Objective::edgecon: value = s.emax; break;
        case Objective::parallel_time: value = s.dist + final_cut; break;
        case Objective::peak_memory: value = s.peak; break;
    }
    return {value, total};
}

}  // namespace

Plan linear_plan(const Network& input, Objective objective) {
    auto net = absorb_open_legs(input);
    const auto env = net.environment();
    std::vector<VertexId> verts;
    for (std::size_t v = 0; v < net.vertex_count(); ++v)
        if (!env || index(*env) != v) verts.push_back(make_id<VertexId>(v));
    const std::size_t m = verts.size();
    if (m <= 1) return finish_plan(net, tree_from_order(net, {}), objective, true, 1);

    std::vector<VertexId> best_seq;
    bool exact = true;
    std::uint64_t examined = 0;
    if (m <= kLinearExactLimit) {
        const SubsetCosts sc(net);
        std::vector<VertexId> seq;
        std::optional<LinearEval> best;
        std::vector<char> used(net.vertex_count(), 0);
        // state after i vertices placed
        std::function<void(std::uint32_t, const LinearState&)> rec = [&](std::uint32_t prefix, const LinearState& st) {
            if (seq.size() == m) {
                ++examined;
                const auto ev = finish_linear(st, sc.cross[prefix], objective);
                if (!best || ev.value < best->value || (ev.value == best->value && ev.total < best->total)) {
                    best = ev;
                    best_seq = seq;
                }
                return;
            }
            for (auto v : verts) {
                if (used[index(v)]) continue;
                const std::uint32_t bit = 1u << index(v);
                const auto leaf = sc.cross[bit];
                LinearState nx = st;
                nx.sum += leaf;
                nx.vmax = std::max(nx.vmax, leaf);
                nx.emax = std::max(nx.emax, leaf);
                if (!seq.empty()) {
                    const auto node = sc.node_cost(prefix, bit);
                    const auto cut = sc.cross[prefix | bit];
                    nx.sum += node;
                    nx.vmax = std::max(nx.vmax, node);
                    nx.emax = std::max(nx.emax, cut);
                    const auto held = seq.size() == 1 ? sc.cross[prefix] : st.prev_cut;
                    nx.peak = std::max(nx.peak, held + leaf + cut);
                    nx.dist = std::max(seq.size() == 1 ? sc.cross[prefix] : st.dist, leaf) + node;
                    nx.prev_cut = cut;
                }
                used[index(v)] = 1;
                seq.push_back(v);
                rec(prefix | bit, nx);
                seq.pop_back();
                used[index(v)] = 0;
            }
        };
        rec(0, LinearState{});
    } else {
        // greedy: extend the prefix by the vertex with the cheapest join, then smallest cut
        exact = false;
        std::vector<char> in(net.vertex_count(), 0);
        auto cut_with = [&](VertexId extra, bool node) {
            ExactCost c(1);
            for (const auto& e : net.edges()) {
                bool pre = false, x = false, out = false;
                for (auto v : e.endpoints) {
                    if (v == extra)
                        x = true;
                    else if (in[index(v)])
                        pre = true;
                    else
                        out = true;
                }
                if (node ? (pre + x + out >= 2) : ((pre || x) && out)) c *= ExactCost(e.dim);
            }
            return c;
        };
        VertexId first = verts[0];
        for (auto v : verts)
            if (weighted_degree(net, v) < weighted_degree(net, first)) first = v;
        in[index(first)] = 1;
        best_seq.push_back(first);
        while (best_seq.size() < m) {
            std::optional<VertexId> pick;
            std::pair<ExactCost, ExactCost> best{};
            for (auto v : verts) {
                if (in[index(v)]) continue;
                const auto s = std::pair{cut_with(v, true), cut_with(v, false)};
                if (!pick || s < best) {
                    best = s;
                    pick = v;
                }
            }
            in[index(*pick)] = 1;
            best_seq.push_back(*pick);
            ++examined;
        }
    }
    auto tree = tree_from_order(net, linear_order(best_seq));
    auto plan = finish_plan(std::move(net), std::move(tree), objective, exact, examined);
    return plan;
}

// ------------------------------------------------------------------- slicing

void SlicePlan::for_each_assignment(const std::function<void(std::span<const std::uint64_t>)>& visit) const {
    std::vector<std::uint64_t> idx(dims.size(), 0);
    for (;;) {
        visit(idx);
        std::size_t k = dims.size();
        while (k > 0) {
            --k;
            if (++idx[k] < dims[k]) break;
            idx[k] = 0;
            if (k == 0) return;
        }
        if (dims.empty()) return;
    }
}

SlicePlan make_slice_plan(const Network& net, std::vector<EdgeId> cut_edges) {
    std::sort(cut_edges.begin(), cut_edges.end());
    cut_edges.erase(std::unique(cut_edges.begin(), cut_edges.end()), cut_edges.end());
    SlicePlan p;
    p.assignments = ExactCost(1);
    for (auto id : cut_edges) {
        if (!net.has_edge(id)) throw std::invalid_argument("cut edge " + std::to_string(index(id)) + " does not exist");
        const auto& e = net.edge(id);
        if (e.is_hyperedge()) throw std::invalid_argument("cannot cut hyperedge " + std::to_string(index(id)));
        if (e.is_open_leg()) throw std::invalid_argument("cannot cut open leg " + std::to_string(index(id)));
        if (net.environment() && e.touches(*net.environment()))
            throw std::invalid_argument("cannot cut output wire " + std::to_string(index(id)));
        p.dims.push_back(e.dim);
        p.W += e.weight;
        p.assignments *= ExactCost(e.dim);
    }
    p.cut_edges = cut_edges;
    p.reduced = remove_edges(net, p.cut_edges);
    return p;
}

std::vector<EdgeId> choose_slice_edges(const Network& net, std::size_t k) {
    const std::size_t n = net.vertex_count();
    const auto env = net.environment();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (neighbour, edge position)
    std::vector<std::size_t> eligible;
    const auto edges = net.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (e.endpoints.size() != 2) continue;
        if (env && e.touches(*env)) continue;
        const auto a = index(e.endpoints[0]), b = index(e.endpoints[1]);
        adj[a].emplace_back(b, i);
        adj[b].emplace_back(a, i);
        eligible.push_back(i);
    }
    // Brandes edge betweenness, unweighted, multi-edges traversed individually
    std::vector<double> score(edges.size(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> preds(n);
        std::vector<double> sigma(n, 0.0), delta(n, 0.0);
        std::vector<long> dist(n, -1);
        std::vector<std::size_t> stack;
        std::queue<std::size_t> q;
        sigma[s] = 1;
        dist[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            stack.push_back(v);
            for (auto [w, ei] : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    q.push(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].emplace_back(v, ei);
                }
            }
        }
        while (!stack.empty()) {
            const auto w = stack.back();
            stack.pop_back();
            for (auto [v, ei] : preds[w]) {
                const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                score[ei] += c;
                delta[v] += c;
            }
        }
    }
    std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
        if (std::abs(score[a] - score[b]) > 1e-9) return score[a] > score[b];
        if (edges[a].dim != edges[b].dim) return edges[a].dim > edges[b].dim;
        return edges[a].id < edges[b].id;
    });
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i < std::min(k, eligible.size()); ++i) out.push_back(edges[eligible[i]].id);
    std::sort(out.begin(), out.end());
    return out;
}

SlicedCost sliced_cost(const SlicePlan& plan, const ContractionTree& inner_tree) {
    SlicedCost c;
    c.multiplier = plan.assignments;
    c.per_slice = cost_report(plan.reduced, inner_tree);
    c.sequential_time = c.multiplier * c.per_slice.sequential_time;
    c.peak_memory = c.per_slice.peak_memory;
    c.counter_entries = plan.cut_edges.size();
    return c;
}

}  // namespace tnc
