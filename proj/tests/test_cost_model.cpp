#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tnc/circuit.hpp"
#include "tnc/cost_model.hpp"

using namespace tnc;

namespace {

VertexId V(std::size_t i) { return make_id<VertexId>(i); }

Network triangle() {
    Network net;
    for (auto n : {"a", "b", "c"}) net.add_vertex(n);
    net.add_edge({V(0), V(1)}, 2);
    net.add_edge({V(1), V(2)}, 4);
    net.add_edge({V(0), V(2)}, 8);
    return net;
}

Network pair(std::uint64_t d) {
    Network net;
    net.add_vertex("a");
    net.add_vertex("b");
    net.add_edge({V(0), V(1)}, d);
    return net;
}

std::vector<VertexId> seq(std::size_t n) {
    std::vector<VertexId> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(V(i));
    return s;
}

/// Heaviest leaf-to-root path, from the containment oracle's node costs.
ExactCost path_oracle(const Network& net, const ContractionTree& t) {
    auto b = oracle::brute_congestion(net, t);
    ExactCost best(0);
    for (std::size_t x = 0; x < t.node_count(); ++x) {
        auto id = make_id<NodeId>(x);
        if (t.degree(id) != 1 || id == *t.root()) continue;
        ExactCost s(0);
        for (std::optional<NodeId> y = id; y; y = t.parent(*y)) s += b.node_cost[index(*y)];
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

TEST_CASE("sequential time examples") {
    for (std::uint64_t d : {2u, 3u, 7u}) {
        auto net = pair(d);
        // the unrooted two-leaf tree has no join node
        auto u = caterpillar(seq(2));
        CHECK(sequential_time(net, u) == ExactCost(2 * d));
        auto r = tree_from_order(net, {make_step({V(0)}, {V(1)})});
        CHECK(sequential_time(net, r) == ExactCost(3 * d + 1));
    }
    auto tri = triangle();
    CHECK(sequential_time(tri, caterpillar(seq(3))) == ExactCost(120));
    // rooting adds the split node (cost of the split edge) and the scalar root
    auto r = tree_from_order(tri, linear_order(seq(3)));
    CHECK(sequential_time(tri, r) == ExactCost(120 + 32 + 1));
    CHECK(cost_report(tri, r).unrooted_sequential_time == ExactCost(120));

    Network one;
    one.add_vertex("x");
    one.add_edge({V(0)}, 5);
    auto single = absorb_open_legs(one);
    auto t = tree_from_order(single, {});
    CHECK(sequential_time(single, t) == ExactCost(5));
    auto rep = cost_report(single, t);
    CHECK(rep.peak_memory == ExactCost(5));
    CHECK(rep.parallel_time == ExactCost(5));
}

TEST_CASE("peak memory examples") {
    for (std::uint64_t d : {2u, 5u}) {
        auto net = pair(d);
        auto t = tree_from_order(net, {make_step({V(0)}, {V(1)})});
        CHECK(peak_memory(net, t, default_order(t)).peak == ExactCost(2 * d + 1));
    }
    Network p3;
    for (auto n : {"a", "b", "c"}) p3.add_vertex(n);
    p3.add_edge({V(0), V(1)}, 2);
    p3.add_edge({V(1), V(2)}, 2);
    auto t = tree_from_order(p3, linear_order(seq(3)));
    auto pm = peak_memory(p3, t, linear_order(seq(3)));
    CHECK(pm.peak == ExactCost(8));
    REQUIRE(pm.steps.size() == 2);
    CHECK(pm.steps[0].memory == ExactCost(8));
    CHECK(pm.steps[1].memory == ExactCost(5));
    CHECK(pm.steps[1].memory_after == ExactCost(1));

    // invalid schedule: parent before child
    auto good = schedule_from_order(t, linear_order(seq(3)));
    std::reverse(good.begin(), good.end());
    CHECK_THROWS_WITH(peak_memory(p3, t, good), doctest::Contains("step 1"));
}

TEST_CASE("min peak order") {
    SUBCASE("caterpillar has one order") {
        auto net = triangle();
        auto t = tree_from_order(net, linear_order(seq(3)));
        auto po = min_peak_memory_order(net, t);
        CHECK(order_from_schedule(t, po.schedule) == linear_order(seq(3)));
        CHECK(po.exact);
    }
    SUBCASE("big pair and small pair") {
        // a,b share a dim-16 bond and each has a dim-1-ish bond to the other pair
        Network net;
        for (auto n : {"a", "b", "c", "d"}) net.add_vertex(n);
        net.add_edge({V(0), V(1)}, 16);
        net.add_edge({V(2), V(3)}, 2);
        net.add_edge({V(1), V(2)}, 1);
        ContractionOrder o{make_step({V(0)}, {V(1)}), make_step({V(2)}, {V(3)}),
                           make_step({V(0), V(1)}, {V(2), V(3)})};
        auto t = tree_from_order(net, o);
        auto po = min_peak_memory_order(net, t);
        ExactCost best(0);
        bool first = true;
        for (const auto& ord : all_orders(t)) {
            auto p = oracle::simulate_peak(net, ord);
            if (first || p < best) best = p;
            first = false;
        }
        CHECK(po.peak == best);
        CHECK(oracle::simulate_peak(net, order_from_schedule(t, po.schedule)) == best);
    }
    SUBCASE("symmetric subtrees tie; smaller key first") {
        auto net = network_from_graph(SimpleGraph::from_edges(4, {{0, 1}, {2, 3}, {1, 2}}));
        ContractionOrder o{make_step({V(2)}, {V(3)}), make_step({V(0)}, {V(1)}),
                           make_step({V(0), V(1)}, {V(2), V(3)})};
        auto t = tree_from_order(net, o);
        auto po = min_peak_memory_order(net, t);
        CHECK(order_from_schedule(t, po.schedule).front() == make_step({V(0)}, {V(1)}));
    }
}

TEST_CASE("min peak order matches the order oracle on random trees") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 80; ++trial) {
        oracle::RandomNetOptions o;
        o.max_vertices = 7;
        o.max_dim = 4;
        o.open_legs = trial % 3 == 0;
        o.hyperedges = trial % 4 == 0;
        o.tensors = false;
        auto net = absorb_open_legs(oracle::random_network(rng, o));
        auto u = random_unrooted_tree(net.vertex_count(), rng);
        auto t = root_for(net, u, make_id<TreeEdgeId>(trial % u.edge_count()));
        ExactCost best(0);
        bool first = true;
        for (const auto& ord : all_orders(t)) {
            auto p = oracle::simulate_peak(net, ord);
            CHECK(peak_memory(net, t, ord).peak == p);
            if (first || p < best) best = p;
            first = false;
        }
        auto po = min_peak_memory_order(net, t);
        CHECK(po.peak == best);
        CHECK(po.exact);
    }
}

TEST_CASE("parallel time") {
    auto tri = triangle();
    auto u = caterpillar(seq(3));
    ExactCost best(0);
    bool first = true;
    for (std::size_t f = 0; f < u.edge_count(); ++f) {
        auto r = root_at(u, make_id<TreeEdgeId>(f));
        auto pt = parallel_time(tri, r);
        CHECK(pt.time == path_oracle(tri, r));
        if (first || pt.time < best) best = pt.time;
        first = false;
    }
    // a -> center -> (split of the dim-8 side) -> root: the best rooting
    CHECK(best == ExactCost(105));

    SUBCASE("n = 2") {
        auto net = pair(3);
        auto r = tree_from_order(net, {make_step({V(0)}, {V(1)})});
        auto pt = parallel_time(net, r);
        CHECK(pt.time == ExactCost(3 + 3 + 1));
        CHECK(pt.critical_path.size() == 3);
    }
    SUBCASE("balanced ring") {
        auto ring = network_from_graph(SimpleGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));
        ContractionOrder o{make_step({V(0)}, {V(1)}), make_step({V(2)}, {V(3)}),
                           make_step({V(0), V(1)}, {V(2), V(3)})};
        auto r = tree_from_order(ring, o);
        CHECK(parallel_time(ring, r).time < sequential_time(ring, r));
        CHECK(parallel_time(ring, r).time == path_oracle(ring, r));
    }
}

TEST_CASE("cost report invariants on random trees") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 120; ++trial) {
        oracle::RandomNetOptions o;
        o.max_vertices = 8;
        o.max_dim = 4;
        o.open_legs = trial % 2 == 0;
        o.hyperedges = trial % 3 == 0;
        o.tensors = false;
        auto net = absorb_open_legs(oracle::random_network(rng, o));
        auto u = random_unrooted_tree(net.vertex_count(), rng);
        auto t = root_for(net, u, make_id<TreeEdgeId>(trial % u.edge_count()));
        auto rep = cost_report(net, t);
        auto b = oracle::brute_congestion(net, t);
        ExactCost seq_sum(0), edge_sum(0);
        for (auto c : b.node_cost) seq_sum += c;
        for (auto c : b.tree_edge_cost) edge_sum += c;
        CHECK(rep.sequential_time == seq_sum);
        CHECK(rep.parallel_time <= rep.sequential_time);
        CHECK(rep.parallel_time == path_oracle(net, t));
        const ExactCost two_n(2 * net.vertex_count());
        CHECK(rep.sequential_time <= two_n * rep.vertcon_cost);
        CHECK(rep.peak_memory <= edge_sum);
        CHECK(edge_sum <= two_n * rep.edgecon_cost);
        CHECK(rep.peak_memory == oracle::simulate_peak(net, order_from_schedule(t, rep.schedule)));
        CHECK(rep.per_step.size() == rep.schedule.size());
        CHECK(rep.critical_path.back() == *t.root());
    }
}

TEST_CASE("schroedinger plans") {
    SUBCASE("one 2-local gate on two qubits") {
        Circuit c{2, {Gate{{0, 1}, {}}}};
        auto p = schroedinger_plan(c);
        REQUIRE(p.gate_node_congestion.size() == 1);
        CHECK(p.gate_node_congestion[0] == doctest::Approx(4.0));
        auto cm = congestion(p.circuit.net, p.tree);
        CHECK(cm.node_cost[index(p.tree.leaf_of(p.circuit.gate_vertex[0]))] == ExactCost(16));
    }
    SUBCASE("three 1-local gates on three qubits") {
        Circuit c{3, {Gate{{0}, {}}, Gate{{1}, {}}, Gate{{2}, {}}}};
        auto p = schroedinger_plan(c);
        for (double g : p.gate_node_congestion) CHECK(g == doctest::Approx(4.0));
        REQUIRE_FALSE(p.spine_edge_congestion.empty());
        for (double e : p.spine_edge_congestion) CHECK(e == doctest::Approx(3.0));
    }
    SUBCASE("total time bound") {
        std::mt19937_64 rng(5);
        auto c = random_circuit(4, 6, rng);
        auto p = schroedinger_plan(c);
        ExactCost bound(0);
        for (const auto& g : c.gates) bound += ExactCost::pow2(static_cast<unsigned>(c.qubits + g.locality()));
        ExactCost gate_nodes(0);
        auto cm = congestion(p.circuit.net, p.tree);
        for (std::size_t x = 0; x < p.tree.node_count(); ++x) {
            auto id = make_id<NodeId>(x);
            if (p.tree.is_internal(id) && p.tree.children(id).size() == 2) {
                for (auto ch : p.tree.children(id)) {
                    auto l = p.tree.label_of(ch);
                    if (l && std::find(p.circuit.gate_vertex.begin(), p.circuit.gate_vertex.end(), *l) !=
                                 p.circuit.gate_vertex.end())
                        gate_nodes += cm.node_cost[x];
                }
            }
        }
        CHECK(gate_nodes == bound);
    }
    SUBCASE("empty circuit") {
        Circuit c{3, {}};
        auto p = schroedinger_plan(c);
        CHECK(p.circuit.net.vertex_count() == 2);
        CHECK(p.report.sequential_time == ExactCost(8 + 8 + 8 + 1));
    }
    SUBCASE("bad qubit") {
        Circuit c{2, {Gate{{2}, {}}}};
        CHECK_THROWS(schroedinger_plan(c));
    }
}
