#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tnc/exact_cost.hpp"
#include "tnc/network.hpp"

using namespace tnc;

namespace {

VertexId V(std::size_t i) { return make_id<VertexId>(i); }

Network triangle() {
    Network net;
    net.add_vertex("a");
    net.add_vertex("b");
    net.add_vertex("c");
    net.add_edge({V(0), V(1)}, 2);
    net.add_edge({V(1), V(2)}, 4);
    net.add_edge({V(0), V(2)}, 8);
    return net;
}

}  // namespace

TEST_CASE("exact cost arithmetic") {
    ExactCost a(1ull << 40);
    CHECK((a * a).to_string() == "1208925819614629174706176");
    CHECK(ExactCost::parse("1208925819614629174706176") == a * a);
    CHECK((a * a).log2() == doctest::Approx(80.0));
    CHECK_THROWS_AS(ExactCost::pow2(127) * ExactCost(2), std::overflow_error);
    CHECK_THROWS_AS(ExactCost(1) - ExactCost(2), std::underflow_error);
    CHECK(ExactCost(12) / ExactCost(4) == ExactCost(3));
    CHECK_THROWS(ExactCost(12) / ExactCost(5));
}

TEST_CASE("weighted degree") {
    Network net;
    net.add_vertex("lonely");
    CHECK(weighted_degree(net, V(0)) == 0.0);

    Network path;
    for (auto n : {"a", "b", "c"}) path.add_vertex(n);
    path.add_edge({V(0), V(1)}, 2);
    path.add_edge({V(1), V(2)}, 4);
    CHECK(weighted_degree(path, V(1)) == doctest::Approx(3.0));

    Network hyper;
    for (auto n : {"a", "b", "c"}) hyper.add_vertex(n);
    hyper.add_edge({V(0), V(1), V(2)}, 8);
    CHECK(weighted_degree(hyper, V(0)) == doctest::Approx(3.0));
    CHECK_THROWS(weighted_degree(hyper, V(7)));
}

TEST_CASE("edge invariants") {
    Network net;
    net.add_vertex("a");
    net.add_vertex("b");
    CHECK_THROWS(net.add_edge({V(0), V(0)}, 2));
    CHECK_THROWS(net.add_edge({V(0), V(1)}, 0));
    CHECK_THROWS(net.add_edge({V(0), V(5)}, 2));
    CHECK_THROWS(net.add_vertex("a"));
    const auto e = net.add_edge({V(0), V(1)}, 3);
    CHECK(net.edge(e).weight == doctest::Approx(std::log2(3.0)));
}

TEST_CASE("contract_symbolic") {
    SUBCASE("two vertices collapse to an isolated vertex") {
        Network net;
        net.add_vertex("a");
        net.add_vertex("b");
        net.add_edge({V(0), V(1)}, 5);
        auto m = contract_symbolic(net, V(0), V(1));
        CHECK(m.vertex_count() == 1);
        CHECK(m.edge_count() == 0);
    }
    SUBCASE("triangle: parallel edges merge into the product dimension") {
        auto m = contract_symbolic(triangle(), V(0), V(1));
        REQUIRE(m.vertex_count() == 2);
        REQUIRE(m.edge_count() == 1);
        CHECK(m.edges()[0].dim == 32);
        CHECK(m.edges()[0].merged_from.size() == 2);
        // fresh id, not a reused one
        CHECK(index(m.edges()[0].id) == 3);
    }
    SUBCASE("non-adjacent vertices") {
        Network net;
        for (auto n : {"a", "b", "c"}) net.add_vertex(n);
        net.add_edge({V(0), V(1)}, 2);
        net.add_edge({V(1), V(2)}, 2);
        auto m = contract_symbolic(net, V(0), V(2));
        CHECK(m.vertex_count() == 2);
        REQUIRE(m.edge_count() == 1);
        CHECK(m.edges()[0].dim == 4);
    }
    SUBCASE("errors") {
        CHECK_THROWS(contract_symbolic(triangle(), V(0), V(0)));
        CHECK_THROWS(contract_symbolic(triangle(), V(0), V(9)));
    }
    SUBCASE("hyperedge keeps one occurrence of the merged vertex") {
        Network net;
        for (auto n : {"a", "b", "c"}) net.add_vertex(n);
        net.add_edge({V(0), V(1), V(2)}, 2);
        auto m = contract_symbolic(net, V(0), V(1));
        REQUIRE(m.edge_count() == 1);
        CHECK(m.edges()[0].endpoints.size() == 2);
        auto m2 = contract_symbolic(m, V(0), V(1));
        CHECK(m2.edge_count() == 0);
    }
}

TEST_CASE("contract_symbolic conserves weight to third vertices") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        oracle::RandomNetOptions o;
        o.min_vertices = 3;
        o.max_vertices = 6;
        o.tensors = false;
        auto net = oracle::random_network(rng, o);
        const auto n = net.vertex_count();
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        auto u = pick(rng), v = pick(rng);
        if (u == v) continue;
        auto m = contract_symbolic(net, V(u), V(v));
        CHECK(m.vertex_count() == n - 1);
        // weight from {u,v} to every other w, before and after
        for (std::size_t w = 0; w < n; ++w) {
            if (w == u || w == v) continue;
            double before = 0;
            for (const auto& e : net.edges())
                if (e.touches(V(w)) && (e.touches(V(u)) || e.touches(V(v)))) before += e.weight;
            const auto w2 = *m.find_vertex(net.name(V(w)));
            const auto merged = make_id<VertexId>(m.vertex_count() - 1);
            double after = 0;
            for (const auto& e : m.edges())
                if (e.touches(w2) && e.touches(merged)) after += e.weight;
            CHECK(after == doctest::Approx(before));
        }
    }
}

TEST_CASE("full symbolic contraction removes every edge") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        oracle::RandomNetOptions o;
        o.tensors = false;
        auto net = oracle::random_network(rng, o);
        while (net.vertex_count() > 1) net = contract_symbolic(net, V(0), V(1));
        CHECK(net.edge_count() == 0);
    }
}

TEST_CASE("line graph") {
    Network path;
    for (auto n : {"a", "b", "c"}) path.add_vertex(n);
    path.add_edge({V(0), V(1)}, 2);
    path.add_edge({V(1), V(2)}, 2);
    auto l = line_graph(path);
    CHECK(l.vertex_count == 2);
    CHECK(l.edges.size() == 1);

    auto lt = line_graph(triangle());
    CHECK(lt.vertex_count == 3);
    CHECK(lt.edges.size() == 3);

    for (std::size_t k : {4u, 6u}) {
        Network star;
        star.add_vertex("c");
        for (std::size_t i = 0; i < k; ++i) {
            star.add_vertex("l" + std::to_string(i));
            star.add_edge({V(0), V(i + 1)}, 2);
        }
        auto ls = line_graph(star);
        CHECK(ls.vertex_count == k);
        CHECK(ls.edges.size() == k * (k - 1) / 2);
    }
}

TEST_CASE("absorb_open_legs") {
    auto closed = triangle();
    auto same = absorb_open_legs(closed);
    CHECK(same.vertex_count() == 3);
    CHECK_FALSE(same.environment());

    Network single;
    single.add_vertex("t");
    single.add_edge({V(0)}, 2);
    single.add_edge({V(0)}, 3);
    auto s = absorb_open_legs(single);
    CHECK(s.vertex_count() == 2);
    CHECK(s.edge_count() == 2);
    CHECK(s.has_parallel_edges());
    CHECK(s.environment());

    Network chain;
    chain.add_vertex("A");
    chain.add_vertex("B");
    chain.add_edge({V(0)}, 2);
    chain.add_edge({V(0), V(1)}, 4);
    chain.add_edge({V(1)}, 8);
    auto c = absorb_open_legs(chain);
    REQUIRE(c.environment());
    CHECK(weighted_degree(c, *c.environment()) == doctest::Approx(4.0));
    CHECK(c.name(*c.environment()) == "_env");

    auto twice = absorb_open_legs(c);
    CHECK(twice.vertex_count() == c.vertex_count());
    CHECK(twice.edge_count() == c.edge_count());
}

TEST_CASE("network tensors must match incident edges") {
    Network net;
    net.add_vertex("a");
    net.add_vertex("b");
    const auto e = net.add_edge({V(0), V(1)}, 3);
    CHECK_THROWS(net.set_tensor(V(0), DenseTensor::zeros({e}, {2})));
    CHECK_THROWS(net.set_tensor(V(0), DenseTensor::scalar(1.0)));
    net.set_tensor(V(0), DenseTensor::zeros({e}, {3}));
    CHECK(net.tensor(V(0)) != nullptr);
    CHECK_FALSE(net.has_tensors());
}

TEST_CASE("dense tensor permutation and slicing") {
    std::mt19937_64 rng(3);
    auto t = oracle::random_tensor({EdgeId{4}, EdgeId{1}, EdgeId{7}}, {2, 3, 4}, rng);
    auto c = t.canonical();
    CHECK(c.axes()[0] == EdgeId{1});
    for (std::uint64_t i = 0; i < 2; ++i)
        for (std::uint64_t j = 0; j < 3; ++j)
            for (std::uint64_t k = 0; k < 4; ++k) {
                const std::uint64_t a[] = {i, j, k}, b[] = {j, i, k};
                CHECK(t.at(a) == c.at(b));
            }
    auto s = t.sliced(EdgeId{1}, 2);
    CHECK(s.rank() == 2);
    const std::uint64_t full[] = {1, 2, 3}, part[] = {1, 3};
    CHECK(s.at(part) == t.at(full));
    CHECK_THROWS(DenseTensor({EdgeId{1}, EdgeId{1}}, {2, 2}, std::vector<Scalar>(4)));
    CHECK_THROWS(DenseTensor({EdgeId{1}}, {2}, std::vector<Scalar>(3)));
}
