// Acceptance run: one PASS/FAIL line per criterion. Every derived quantity is
// recomputed from definitions (tests/oracles.hpp or local helpers) and
// compared with the library.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "tnc/circuit.hpp"
#include "tnc/contraction_tree.hpp"
#include "tnc/cost_model.hpp"
#include "tnc/decomposition.hpp"
#include "tnc/executor.hpp"
#include "tnc/io.hpp"
#include "tnc/planner.hpp"

using namespace tnc;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

VertexId V(std::size_t i) { return make_id<VertexId>(i); }

/// Every unrooted tree on n leaves, via leaf-insertion codes.
void for_each_unrooted(std::size_t n, const std::function<void(const ContractionTree&)>& visit) {
    if (n <= 3) {
        visit(tree_from_insertions(n, {}));
        return;
    }
    std::vector<std::size_t> code(n - 3, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == code.size()) {
            visit(tree_from_insertions(n, code));
            return;
        }
        for (std::size_t c = 0; c < 2 * k + 3; ++c) {
            code[k] = c;
            rec(k + 1);
        }
    };
    rec(0);
}

/// Rooted versions of an unrooted tree for a network.
std::vector<ContractionTree> rootings(const Network& net, const ContractionTree& u) {
    if (u.edge_count() == 0) return {tree_from_order(net, {})};
    if (net.environment()) return {root_at_leaf(u, *net.environment())};
    std::vector<ContractionTree> out;
    for (std::size_t f = 0; f < u.edge_count(); ++f) out.push_back(root_at(u, make_id<TreeEdgeId>(f)));
    return out;
}

ContractionTree random_rooted(const Network& net, std::mt19937_64& rng) {
    const auto u = random_unrooted_tree(net.vertex_count(), rng);
    if (u.edge_count() == 0) return tree_from_order(net, {});
    std::uniform_int_distribution<std::size_t> pick(0, u.edge_count() - 1);
    return root_for(net, u, make_id<TreeEdgeId>(pick(rng)));
}

/// Directed weighted modified cutwidth of a schedule: at each contraction the
/// pending intermediates, the node's leaf inputs and its output co-reside.
ExactCost modified_cutwidth(const ContractionTree& t, std::span<const NodeId> schedule, const std::vector<ExactCost>& w) {
    if (schedule.empty()) {
        ExactCost total{0};
        for (const auto& c : w) total += c;
        return total;
    }
    std::vector<char> done(t.node_count(), 0);
    ExactCost peak{0};
    for (auto x : schedule) {
        ExactCost mem{0};
        for (std::size_t y = 0; y < t.node_count(); ++y) {
            const auto id = make_id<NodeId>(y);
            if (!done[y] || !t.is_internal(id)) continue;
            if (!done[index(*t.parent(id))]) mem += w[index(t.parent_edge(id))];
        }
        for (auto c : t.children(x))
            if (t.is_leaf(c)) mem += w[index(t.parent_edge(c))];
        mem += w[index(t.parent_edge(x))];
        peak = std::max(peak, mem);
        done[index(x)] = 1;
    }
    return peak;
}

// ------------------------------------------------------------ criteria 1-3

struct SuiteResult {
    Outcome c1, c2, c3;
};

SuiteResult oracle_suite() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::size_t pairs = 0, trees = 0, bad_value = 0, bad_time = 0, bad_space = 0, degenerate = 0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        oracle::RandomNetOptions o;
        o.min_vertices = 1;
        o.max_vertices = 5;
        o.max_dim = 3;
        o.hyperedges = i % 3 == 0;
        o.open_legs = i % 4 == 1;
        const auto net = absorb_open_legs(oracle::random_network(rng, o));
        const auto expect = naive_oracle(net);
        for_each_unrooted(net.vertex_count(), [&](const ContractionTree& u) {
            for (const auto& t : rootings(net, u)) {
                ++trees;
                const auto brute = oracle::brute_congestion(net, t);
                ExactCost internal_sum{0}, all_sum{0};
                for (std::size_t x = 0; x < t.node_count(); ++x) {
                    all_sum += brute.node_cost[x];
                    if (t.is_internal(make_id<NodeId>(x))) internal_sum += brute.node_cost[x];
                }
                // A lone tensor is read and is already the result: the root adds nothing.
                if (t.internal_nodes().empty()) {
                    ++degenerate;
                    all_sum = all_sum - brute.node_cost[index(*t.root())];
                }
                for_each_order(t, [&](const ContractionOrder& order) {
                    ++pairs;
                    const auto r = execute(net, t, order);
                    const double err = relative_error(r.value, expect);
                    worst = std::max(worst, err);
                    if (!(err < 1e-9)) ++bad_value;
                    if (r.stats.multiply_adds != internal_sum || r.stats.total_time() != all_sum) ++bad_time;
                    const auto schedule = schedule_from_order(t, order);
                    if (r.stats.peak_memory != modified_cutwidth(t, schedule, brute.tree_edge_cost)) ++bad_space;
                    return true;
                });
            }
        });
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    SuiteResult s;
    s.c1.pass = bad_value == 0 && secs < 60.0;
    s.c1.detail = fmt("200 networks, %zu rooted trees, %zu (tree, order) pairs, %zu over 1e-9, max relative error %.2e, %.1f s",
                      trees, pairs, bad_value, worst, secs);
    s.c2.pass = bad_time == 0;
    s.c2.detail = fmt("%zu pairs; multiply-adds = sum of internal node costs and reads + multiply-adds + output = sum over all "
                      "nodes (%zu single-tensor trees without a root term); %zu mismatches",
                      pairs, degenerate, bad_time);
    s.c3.pass = bad_space == 0;
    s.c3.detail = fmt("%zu pairs; tracker peak = modified cutwidth over brute-force tree edge costs; %zu mismatches", pairs,
                      bad_space);
    return s;
}

// --------------------------------------------------------------- criterion 4

Outcome parallel_makespan() {
    std::mt19937_64 rng(4404);
    std::size_t bad = 0, bad_model = 0, degenerate = 0;
    for (int i = 0; i < 100; ++i) {
        oracle::RandomNetOptions o;
        o.min_vertices = 1;
        o.max_vertices = 7;
        o.hyperedges = i % 5 == 0;
        o.open_legs = i % 3 == 0;
        const auto net = absorb_open_legs(oracle::random_network(rng, o));
        const auto t = random_rooted(net, rng);
        const auto brute = oracle::brute_congestion(net, t);
        std::function<ExactCost(NodeId)> heaviest = [&](NodeId x) {
            ExactCost best{0};
            for (auto c : t.children(x)) best = std::max(best, heaviest(c));
            return brute.node_cost[index(x)] + best;
        };
        const auto root = *t.root();
        auto expect = heaviest(t.children(root).front());
        if (t.internal_nodes().empty()) ++degenerate;  // a lone tensor: the root adds nothing
        else expect += brute.node_cost[index(root)];
        const auto r = execute_parallel(net, t, 2);
        if (r.makespan_unlimited != expect) ++bad;
        if (parallel_time(net, t).time != expect) ++bad_model;
    }
    return {bad == 0 && bad_model == 0,
            fmt("100 random rooted trees (%zu single-tensor); unlimited-worker makespan vs heaviest leaf-to-root path: %zu "
                "mismatches (cost model: %zu)",
                degenerate, bad, bad_model)};
}

// --------------------------------------------------------------- criterion 5

/// One representative per isomorphism class of graphs on n vertices.
std::vector<SimpleGraph> graph_classes(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    std::vector<std::vector<std::size_t>> pair_index(n, std::vector<std::size_t>(n));
    for (std::size_t k = 0; k < pairs.size(); ++k)
        pair_index[pairs[k].first][pairs[k].second] = pair_index[pairs[k].second][pairs[k].first] = k;

    std::set<std::uint32_t> seen;
    std::vector<SimpleGraph> out;
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
        std::uint32_t canon = mask;
        for (const auto& q : perms) {
            std::uint32_t m = 0;
            for (std::size_t k = 0; k < pairs.size(); ++k)
                if (mask >> k & 1) m |= 1u << pair_index[q[pairs[k].first]][q[pairs[k].second]];
            canon = std::min(canon, m);
        }
        if (!seen.insert(canon).second) continue;
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (canon >> k & 1) edges.push_back(pairs[k]);
        out.push_back(SimpleGraph::from_edges(n, edges));
    }
    return out;
}

Outcome congestion_inequality() {
    std::size_t graphs = 0, bad = 0, tight = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
        for (const auto& g : graph_classes(n)) {
            ++graphs;
            const auto net = network_from_graph(g, 2);
            const auto e = unit_congestion(net, brute_force_plan(net, Objective::edgecon).tree).edgecon;
            const auto v = unit_congestion(net, brute_force_plan(net, Objective::vertcon).tree).vertcon;
            if (!(e <= v && 2 * v <= 3 * e + 1)) ++bad;
            if (2 * v >= 3 * e && e > 0) ++tight;
        }
    }
    return {bad == 0, fmt("%zu graphs (all isomorphism classes on 1..6 vertices); %zu violations; %zu meet the upper bound",
                          graphs, bad, tight)};
}

// --------------------------------------------------------------- criterion 6

/// Branch-decomposition width straight from the definition.
std::size_t width_by_cuts(const BranchDecomposition& bd, const SimpleGraph& g) {
    std::vector<std::vector<std::size_t>> adj(bd.node_count);
    for (auto [a, b] : bd.tree_edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::size_t width = 0;
    for (auto [a, b] : bd.tree_edges) {
        std::vector<char> side(bd.node_count, 0);
        std::vector<std::size_t> stack{a};
        side[a] = 1;
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            for (auto y : adj[x])
                if (!side[y] && !(x == a && y == b)) side[y] = 1, stack.push_back(y);
        }
        std::vector<int> mask(g.vertex_count, 0);
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            const int bit = side[bd.leaf_of[e]] ? 1 : 2;
            mask[g.edges[e].first] |= bit;
            mask[g.edges[e].second] |= bit;
        }
        width = std::max<std::size_t>(width, std::count(mask.begin(), mask.end(), 3));
    }
    return width;
}

std::size_t brute_edgecon_count(const Network& net, const ContractionTree& t) {
    const auto b = oracle::brute_congestion(net, t);
    return b.tree_edge_count.empty() ? 0 : *std::max_element(b.tree_edge_count.begin(), b.tree_edge_count.end());
}

BranchDecomposition random_bd(std::size_t m, std::mt19937_64& rng) {
    const auto u = random_unrooted_tree(m, rng);
    BranchDecomposition bd;
    bd.node_count = u.node_count();
    for (auto [a, b] : u.edge_list()) bd.tree_edges.emplace_back(index(a), index(b));
    for (std::size_t i = 0; i < m; ++i) bd.leaf_of.push_back(index(u.leaf_of(V(i))));
    return bd;
}

Outcome decomposition_bridge() {
    std::mt19937_64 rng(606);
    std::size_t eq_bad = 0, eq_bad_min_deg2 = 0, eq_above = 0, bound_checks = 0, bound_bad = 0, bound_bad_unattainable = 0;
    std::size_t bound_bad_maxdeg_le2 = 0;
    std::string first_eq, first_bound;
    for (int i = 0; i < 100; ++i) {
        SimpleGraph g;
        do {
            const auto n = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
            std::vector<std::pair<std::size_t, std::size_t>> edges;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a + 1; b < n; ++b)
                    if (std::bernoulli_distribution(0.5)(rng)) edges.emplace_back(a, b);
            g = SimpleGraph::from_edges(n, edges);
        } while (g.edges.empty());
        const auto net = network_from_graph(g, 2);
        const auto lg = line_graph(net);
        const auto tree = random_unrooted_tree(net.vertex_count(), rng);

        const auto bd = embedding_to_branch_decomposition(net, tree);
        const auto w = width_by_cuts(bd, lg);
        const auto ec = brute_edgecon_count(net, tree);
        if (w != ec) {
            ++eq_bad;
            if (w > ec) ++eq_above;
            std::size_t min_deg = SIZE_MAX;
            for (std::size_t v = 0; v < g.vertex_count; ++v) min_deg = std::min(min_deg, g.degree(v));
            if (min_deg >= 2) ++eq_bad_min_deg2;
            if (first_eq.empty()) first_eq = fmt("graph %zu: width %zu vs edgecon %zu", static_cast<std::size_t>(i), w, ec);
        }

        std::vector<BranchDecomposition> inputs{bd};
        if (lg.edges.size() >= 2) inputs.push_back(random_bd(lg.edges.size(), rng));
        for (const auto& in : inputs) {
            ++bound_checks;
            const auto width = width_by_cuts(in, lg);
            const auto emb = branch_decomposition_to_embedding(net, in);
            const auto got = brute_edgecon_count(net, emb);
            const auto bound = width + g.max_degree() / 3;
            if (got > bound) {
                ++bound_bad;
                if (g.max_degree() <= 2) ++bound_bad_maxdeg_le2;
                const auto best = unit_congestion(net, brute_force_plan(net, Objective::edgecon).tree).edgecon;
                if (best > bound) ++bound_bad_unattainable;
                if (first_bound.empty())
                    first_bound = fmt("graph %zu: edgecon %zu > width %zu + %zu (optimum %zu)", static_cast<std::size_t>(i),
                                      got, width, g.max_degree() / 3, best);
            }
        }
    }

    // Star: edgecon*(S_6) by brute force; L(S_6) is K_6.
    std::vector<std::pair<std::size_t, std::size_t>> star_edges;
    for (std::size_t l = 1; l <= 6; ++l) star_edges.emplace_back(0, l);
    const auto star = network_from_graph(SimpleGraph::from_edges(7, star_edges), 2);
    const auto star_ec = unit_congestion(star, brute_force_plan(star, Objective::edgecon).tree).edgecon;
    const auto ls6 = line_graph(star);
    std::vector<std::pair<std::size_t, std::size_t>> k6_edges;
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t b = a + 1; b < 6; ++b) k6_edges.emplace_back(a, b);
    const auto k6 = SimpleGraph::from_edges(6, k6_edges);
    const bool is_k6 = ls6.vertex_count == 6 && ls6.edges == k6.edges;
    const auto bw_ls6 = exact_branchwidth(ls6).width;
    const auto bw_k6 = exact_branchwidth(k6).width;
    const bool star_ok = star_ec == 6 && is_k6 && bw_ls6 == 4 && bw_k6 == 4 && (2 * 6 + 2) / 3 == 4;

    Outcome o;
    o.pass = eq_bad == 0 && bound_bad == 0 && star_ok;
    o.detail = fmt("width = edgecon: %zu of 100 differ (%zu above, %zu with min degree >= 2)%s%s; "
                   "edgecon <= width + maxdeg/3: %zu of %zu violate (%zu with maxdeg <= 2, %zu where the brute-force optimum "
                   "also exceeds the bound)%s%s; "
                   "star: edgecon*(S_6) = %zu, L(S_6) = K_6 %s, bw(L(S_6)) = %zu, bw(K_6) = %zu",
                   eq_bad, eq_above, eq_bad_min_deg2, first_eq.empty() ? "" : ", first ", first_eq.c_str(), bound_bad,
                   bound_checks, bound_bad_maxdeg_le2, bound_bad_unattainable, first_bound.empty() ? "" : ", first ",
                   first_bound.c_str(), star_ec, is_k6 ? "yes" : "no", bw_ls6, bw_k6);
    return o;
}

// --------------------------------------------------------------- criterion 7

Outcome schroedinger() {
    std::mt19937_64 rng(77);
    std::size_t bad_node = 0, bad_time = 0, bad_spine = 0, bad_amp = 0, gates_checked = 0, spine_checked = 0;
    for (int i = 0; i < 100; ++i) {
        const auto n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto m = std::uniform_int_distribution<std::size_t>(0, 6)(rng);
        const auto c = random_circuit(n, m, rng, std::min<std::size_t>(2, n));
        const auto x = std::uniform_int_distribution<std::uint64_t>(0, (1u << n) - 1)(rng);
        const auto y = std::uniform_int_distribution<std::uint64_t>(0, (1u << n) - 1)(rng);
        const auto plan = schroedinger_plan(c, x, y);
        const auto& net = plan.circuit.net;
        const auto& t = plan.tree;
        const auto brute = oracle::brute_congestion(net, t);

        std::size_t lmax = 0;
        for (std::size_t g = 0; g < m; ++g) {
            ++gates_checked;
            const auto l = c.gates[g].locality();
            lmax = std::max(lmax, l);
            const auto node = *t.parent(t.leaf_of(plan.circuit.gate_vertex[g]));
            if (brute.node_count[index(node)] != n + l || brute.node_cost[index(node)] != ExactCost::pow2(unsigned(n + l)))
                ++bad_node;
        }
        // leaf reads, the final contraction against y and the scalar output
        ExactCost io = ExactCost::pow2(unsigned(n)) + ExactCost(1);
        for (std::size_t v = 0; v < net.vertex_count(); ++v) io += brute.node_cost[index(t.leaf_of(V(v)))];
        ExactCost total{0};
        for (const auto& nc : brute.node_cost) total += nc;
        const auto bound = ExactCost(m) * ExactCost::pow2(unsigned(n + lmax)) + io;
        if (!(total <= bound) || sequential_time(net, t) != total) ++bad_time;

        for (std::size_t f = 0; f < t.edge_count(); ++f) {
            const auto [a, b] = t.endpoints(make_id<TreeEdgeId>(f));
            if (!t.is_internal(a) || !t.is_internal(b)) continue;
            ++spine_checked;
            if (brute.tree_edge_count[f] != n) ++bad_spine;
        }
        const auto amp = execute(net, t).value.data()[0];
        if (std::abs(amp - oracle::statevector_amplitude(c, x, y)) > 1e-9) ++bad_amp;
    }
    return {bad_node == 0 && bad_time == 0 && bad_spine == 0 && bad_amp == 0,
            fmt("100 circuits (n <= 4, m <= 6); %zu gate nodes with congestion != n + l: %zu; time bound failures: %zu; "
                "%zu spine edges with congestion != n: %zu; amplitude mismatches vs state vector: %zu",
                gates_checked, bad_node, bad_time, spine_checked, bad_spine, bad_amp)};
}

// --------------------------------------------------------------- criterion 8

Outcome slicing() {
    std::mt19937_64 rng(88);
    std::size_t bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 100;) {
        oracle::RandomNetOptions o;
        o.min_vertices = 2;
        o.max_vertices = 6;
        o.open_legs = i % 3 == 0;
        o.hyperedges = i % 4 == 0;
        const auto net = absorb_open_legs(oracle::random_network(rng, o));
        std::vector<EdgeId> eligible;
        for (const auto& e : net.edges())
            if (e.endpoints.size() == 2 && !(net.environment() && e.touches(*net.environment()))) eligible.push_back(e.id);
        if (eligible.empty()) continue;
        ++i;
        std::shuffle(eligible.begin(), eligible.end(), rng);
        const auto k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, eligible.size()))(rng);
        const auto plan = make_slice_plan(net, {eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(k)});
        const auto sliced = execute_sliced(net, plan, random_rooted(plan.reduced, rng));
        const auto whole = execute(net, random_rooted(net, rng));
        const double err = relative_error(sliced.value, whole.value);
        worst = std::max(worst, err);
        if (!(err < 1e-9)) ++bad;
    }

    std::mt19937_64 crng(8);
    const Circuit c{2, {Gate{{0, 1}, random_unitary(4, crng)}, Gate{{1, 0}, random_unitary(4, crng)}}};
    const auto fn = feynman_network(c, 1, 2);
    std::vector<EdgeId> all;
    ExactCost dims_product{1};
    for (const auto& e : fn.net.edges()) {
        all.push_back(e.id);
        dims_product *= ExactCost(e.dim);
    }
    const auto plan = make_slice_plan(fn.net, all);
    const auto r = execute_sliced(fn.net, plan, random_rooted(plan.reduced, crng));
    const double amp_err = std::abs(r.value.data()[0] - oracle::statevector_amplitude(c, 1, 2));
    const bool cut_ok = plan.reduced.edge_count() == 0 && plan.assignments == dims_product && plan.assignments == ExactCost(16) &&
                        r.assignments == ExactCost(16) && amp_err < 1e-9;
    return {bad == 0 && cut_ok,
            fmt("100 instances, max relative error %.2e, %zu over 1e-9; full cut of two 2-local gates: %s assignments "
                "(product of cut dims %s), amplitude error %.2e",
                worst, bad, r.assignments.to_string().c_str(), dims_product.to_string().c_str(), amp_err)};
}

// --------------------------------------------------------------- criterion 9

Outcome round_trips() {
    std::mt19937_64 rng(99);
    std::size_t order_bad = 0, orders = 0, root_bad = 0, file_bad = 0, files = 0;
    for (int i = 0; i < 100; ++i) {
        oracle::RandomNetOptions o;
        o.min_vertices = 1;
        o.max_vertices = 7;
        o.open_legs = i % 3 == 0;
        o.hyperedges = i % 4 == 0;
        const auto raw = oracle::random_network(rng, o);
        const auto net = absorb_open_legs(raw);
        const auto u = random_unrooted_tree(net.vertex_count(), rng);
        const auto t = random_rooted(net, rng);

        for_each_order(t, [&](const ContractionOrder& order) {
            ++orders;
            if (!same_labeled_tree(tree_from_order(net, order), t)) ++order_bad;
            return orders < 400000;
        });

        if (const auto env = net.environment()) {
            if (!same_labeled_tree(root_at_leaf(unroot(t), *env), t)) ++root_bad;
            if (!same_labeled_tree(unroot(root_at_leaf(u, *env)), u)) ++root_bad;
        } else if (u.edge_count() > 0) {
            const auto bare = unroot(t);
            std::size_t matches = 0;
            for (std::size_t f = 0; f < bare.edge_count(); ++f)
                matches += same_labeled_tree(root_at(bare, make_id<TreeEdgeId>(f)), t);
            if (matches != 1) ++root_bad;
            for (std::size_t f = 0; f < u.edge_count(); ++f)
                if (!same_labeled_tree(unroot(root_at(u, make_id<TreeEdgeId>(f))), u)) ++root_bad;
        }

        const auto check = [&](const std::string& first, const std::string& second) {
            ++files;
            if (first != second) ++file_bad;
        };
        {
            std::ostringstream a, b;
            write_network(a, raw);
            std::istringstream in(a.str());
            write_network(b, read_network(in));
            check(a.str(), b.str());
        }
        for (const auto* tree : {&t, &u}) {
            const auto text = format_tree(net, *tree);
            check(text, format_tree(net, parse_tree(text, net).as_written()));
        }
        {
            const auto text = format_order(net, default_order(t));
            std::istringstream in(text);
            check(text, format_order(net, parse_order(in, net)));
        }
        if (!net.has_hyperedges() && net.edge_count() > 0) {
            const auto graph = line_graph(net);
            std::ostringstream a, b;
            write_td(a, validate_embedding_as_tree_decomposition(net, u).td, graph.vertex_count);
            std::istringstream in(a.str());
            const auto td = read_td(in);
            write_td(b, td.td, td.vertex_count);
            check(a.str(), b.str());

            std::ostringstream c, d;
            write_bd(c, embedding_to_branch_decomposition(net, u));
            std::istringstream in2(c.str());
            write_bd(d, read_bd(in2));
            check(c.str(), d.str());
        }
    }
    return {order_bad == 0 && root_bad == 0 && file_bad == 0,
            fmt("100 random trees; %zu orders, %zu not rebuilding the tree; rooting round trips failing: %zu; %zu file "
                "re-parses (network, tree, order, td, bd), %zu not byte-stable",
                orders, order_bad, root_bad, files, file_bad)};
}

// -------------------------------------------------------------- criterion 10

Outcome handshake() {
    std::mt19937_64 rng(1010);
    std::size_t nodes = 0, bad = 0, disagree = 0;
    for (int i = 0; i < 100; ++i) {
        oracle::RandomNetOptions o;
        o.min_vertices = 2;
        o.max_vertices = 7;
        o.open_legs = i % 3 == 0;
        const auto net = absorb_open_legs(oracle::random_network(rng, o));
        const auto check = [&](const ContractionTree& t) {
            const auto c = congestion(net, t);
            const auto brute = oracle::brute_congestion(net, t);
            if (c.node_cost != brute.node_cost || c.tree_edge_cost != brute.tree_edge_cost) ++disagree;
            for (std::size_t x = 0; x < t.node_count(); ++x) {
                const auto id = make_id<NodeId>(x);
                if (t.degree(id) != 3) continue;
                ++nodes;
                ExactCost prod{1};
                for (auto nb : t.neighbors(id)) prod *= c.tree_edge_cost[index(nb.edge)];
                if (c.node_cost[x] * c.node_cost[x] != prod) ++bad;
            }
        };
        check(random_unrooted_tree(net.vertex_count(), rng));
        check(random_rooted(net, rng));
    }
    return {bad == 0 && disagree == 0,
            fmt("100 networks without hyperedges, unrooted and rooted trees; %zu degree-3 nodes, %zu violations; library "
                "vs brute-force congestion disagreements: %zu",
                nodes, bad, disagree)};
}

}  // namespace

int main() {
    int failures = 0;
    const auto report = [&](int id, const char* name, const std::function<Outcome()>& run) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ' ' << name << ": " << o.detail << std::endl;
    };

    SuiteResult suite;
    bool suite_ran = false;
    const auto get_suite = [&] {
        if (!suite_ran) suite = oracle_suite(), suite_ran = true;
        return suite;
    };
    report(1, "oracle equivalence", [&] { return get_suite().c1; });
    report(2, "time formula", [&] { return get_suite().c2; });
    report(3, "space formula", [&] { return get_suite().c3; });
    report(4, "parallel time formula", parallel_makespan);
    report(5, "edgecon* <= vertcon* <= ceil(1.5 edgecon*)", congestion_inequality);
    report(6, "line-graph decompositions", decomposition_bridge);
    report(7, "Schroedinger plan", schroedinger);
    report(8, "slicing", slicing);
    report(9, "round trips", round_trips);
    report(10, "handshake identity", handshake);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
