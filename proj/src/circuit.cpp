#include "tnc/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tnc {

void Circuit::validate() const {
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto& g = gates[i];
        const std::string where = "gate " + std::to_string(i + 1) + ": ";
        if (g.qubits.empty()) throw std::invalid_argument(where + "acts on no qubits");
        for (std::size_t a = 0; a < g.qubits.size(); ++a) {
            if (g.qubits[a] >= qubits)
                throw std::invalid_argument(where + "qubit " + std::to_string(g.qubits[a]) + " out of range");
            for (std::size_t b = 0; b < a; ++b)
                if (g.qubits[a] == g.qubits[b]) throw std::invalid_argument(where + "repeated qubit");
        }
        const std::size_t dim = std::size_t{1} << g.qubits.size();
        if (!g.matrix.empty() && g.matrix.size() != dim * dim)
            throw std::invalid_argument(where + "matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
}

std::vector<Scalar> random_unitary(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Scalar> m(dim * dim);
    for (auto& z : m) z = {gauss(rng), gauss(rng)};
    // Gram-Schmidt over columns
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t p = 0; p < c; ++p) {
            Scalar dot = 0;
            for (std::size_t r = 0; r < dim; ++r) dot += std::conj(m[r * dim + p]) * m[r * dim + c];
            for (std::size_t r = 0; r < dim; ++r) m[r * dim + c] -= dot * m[r * dim + p];
        }
        double norm = 0;
        for (std::size_t r = 0; r < dim; ++r) norm += std::norm(m[r * dim + c]);
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < dim; ++r) m[r * dim + c] /= norm;
    }
    return m;
}

Circuit random_circuit(std::size_t qubits, std::size_t gates, std::mt19937_64& rng, std::size_t max_locality) {
    if (qubits == 0) throw std::invalid_argument("circuit needs at least one qubit");
    Circuit c;
    c.qubits = qubits;
    const std::size_t top = std::min(max_locality, qubits);
    std::uniform_int_distribution<std::size_t> pick_l(1, top);
    for (std::size_t i = 0; i < gates; ++i) {
        std::vector<std::size_t> all(qubits);
        for (std::size_t q = 0; q < qubits; ++q) all[q] = q;
        std::shuffle(all.begin(), all.end(), rng);
        Gate g;
        g.qubits.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(pick_l(rng)));
        g.matrix = random_unitary(std::size_t{1} << g.qubits.size(), rng);
        c.gates.push_back(std::move(g));
    }
    return c;
}

namespace {

std::uint64_t bit_of(std::uint64_t label, std::size_t q, std::size_t n) { return (label >> (n - 1 - q)) & 1; }

/// Wire edges of a circuit: for every gate and qubit, the edge facing x and
/// the edge facing y; plus the last edge of every qubit.
struct Wiring {
    std::vector<std::vector<EdgeId>> out_edge;  // [gate][k], faces x
    std::vector<std::vector<EdgeId>> in_edge;   // [gate][k], faces y
    std::vector<std::optional<EdgeId>> first;   // first edge of each qubit (touches x side)
    std::vector<std::optional<EdgeId>> last;    // last edge of each qubit (touches y side)
};

/// Adds the wires; source(q) is the x-side vertex of qubit q (nullopt when absorbed),
/// sink(q) the y-side vertex.
template <class Source, class Sink>
Wiring wire(Network& net, const Circuit& c, const std::vector<VertexId>& gate_vertex, Source source, Sink sink) {
    const std::size_t n = c.qubits;
    Wiring w;
    w.out_edge.resize(c.gates.size());
    w.in_edge.resize(c.gates.size());
    w.first.assign(n, std::nullopt);
    w.last.assign(n, std::nullopt);
    std::vector<std::optional<VertexId>> frontier(n);
    std::vector<std::pair<std::size_t, std::size_t>> pending(n, {SIZE_MAX, 0});  // gate, slot waiting for in edge
    for (std::size_t q = 0; q < n; ++q) frontier[q] = source(q);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        w.out_edge[i].resize(g.qubits.size());
        w.in_edge[i].resize(g.qubits.size());
        for (std::size_t k = 0; k < g.qubits.size(); ++k) {
            const auto q = g.qubits[k];
            if (frontier[q]) {
                const auto e = net.add_edge({*frontier[q], gate_vertex[i]}, 2);
                w.out_edge[i][k] = e;
                if (pending[q].first != SIZE_MAX) w.in_edge[pending[q].first][pending[q].second] = e;
                if (!w.first[q]) w.first[q] = e;
            } else {
                w.out_edge[i][k] = make_id<EdgeId>(0x80000000u + q);  // absorbed x side
            }
            frontier[q] = gate_vertex[i];
            pending[q] = {i, k};
        }
    }
    for (std::size_t q = 0; q < n; ++q) {
        const auto y = sink(q);
        if (!frontier[q]) continue;  // absorbed x meeting y directly: no wire
        const auto e = net.add_edge({*frontier[q], y}, 2);
        if (pending[q].first != SIZE_MAX) w.in_edge[pending[q].first][pending[q].second] = e;
        if (!w.first[q]) w.first[q] = e;
        w.last[q] = e;
    }
    return w;
}

DenseTensor gate_tensor(const Gate& g, const std::vector<EdgeId>& out, const std::vector<EdgeId>& in) {
    std::vector<EdgeId> axes(out);
    axes.insert(axes.end(), in.begin(), in.end());
    std::vector<std::uint64_t> ext(axes.size(), 2);
    if (g.matrix.empty()) throw std::invalid_argument("gate has no matrix");
    return DenseTensor(std::move(axes), std::move(ext), g.matrix);
}

DenseTensor basis_tensor(const std::vector<EdgeId>& axes, const std::vector<std::uint64_t>& bits) {
    auto t = DenseTensor::zeros(axes, std::vector<std::uint64_t>(axes.size(), 2));
    std::size_t flat = 0;
    for (auto b : bits) flat = flat * 2 + b;
    t.mutable_data()[flat] = 1.0;
    return t;
}

}  // namespace

CircuitNetwork schroedinger_network(const Circuit& c, std::uint64_t x, std::uint64_t y, bool with_tensors) {
    c.validate();
    const std::size_t n = c.qubits;
    CircuitNetwork cn;
    const auto vx = cn.net.add_vertex("x");
    for (std::size_t i = 0; i < c.gates.size(); ++i) cn.gate_vertex.push_back(cn.net.add_vertex("g" + std::to_string(i + 1)));
    const auto vy = cn.net.add_vertex("y");
    cn.inputs = {vx};
    cn.outputs = {vy};
    const auto w = wire(cn.net, c, cn.gate_vertex, [&](std::size_t) { return std::optional<VertexId>(vx); },
                        [&](std::size_t) { return vy; });
    if (!with_tensors) return cn;
    std::vector<EdgeId> xa, ya;
    std::vector<std::uint64_t> xb, yb;
    for (std::size_t q = 0; q < n; ++q) {
        xa.push_back(*w.first[q]);
        xb.push_back(bit_of(x, q, n));
        ya.push_back(*w.last[q]);
        yb.push_back(bit_of(y, q, n));
    }
    cn.net.set_tensor(vx, basis_tensor(xa, xb));
    cn.net.set_tensor(vy, basis_tensor(ya, yb));
    for (std::size_t i = 0; i < c.gates.size(); ++i)
        cn.net.set_tensor(cn.gate_vertex[i], gate_tensor(c.gates[i], w.out_edge[i], w.in_edge[i]));
    return cn;
}

CircuitNetwork feynman_network(const Circuit& c, std::uint64_t x, std::uint64_t y) {
    c.validate();
    const std::size_t n = c.qubits;
    CircuitNetwork cn;
    for (std::size_t i = 0; i < c.gates.size(); ++i) cn.gate_vertex.push_back(cn.net.add_vertex("g" + std::to_string(i + 1)));
    for (std::size_t q = 0; q < n; ++q) cn.outputs.push_back(cn.net.add_vertex("y" + std::to_string(q)));
    const auto w = wire(cn.net, c, cn.gate_vertex, [](std::size_t) { return std::optional<VertexId>(); },
                        [&](std::size_t q) { return cn.outputs[q]; });
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        auto t = gate_tensor(c.gates[i], w.out_edge[i], w.in_edge[i]);
        for (std::size_t k = 0; k < c.gates[i].qubits.size(); ++k) {
            const auto q = c.gates[i].qubits[k];
            if (index(w.out_edge[i][k]) >= 0x80000000u) t = t.sliced(w.out_edge[i][k], bit_of(x, q, n));
        }
        cn.net.set_tensor(cn.gate_vertex[i], std::move(t));
    }
    for (std::size_t q = 0; q < n; ++q) {
        if (w.last[q]) {
            cn.net.set_tensor(cn.outputs[q], basis_tensor({*w.last[q]}, {bit_of(y, q, n)}));
        } else {
            const double same = bit_of(x, q, n) == bit_of(y, q, n) ? 1.0 : 0.0;
            cn.net.set_tensor(cn.outputs[q], DenseTensor::scalar(same));
        }
    }
    return cn;
}

SchroedingerPlan schroedinger_plan(const Circuit& c, std::uint64_t x, std::uint64_t y) {
    const bool tensors = std::all_of(c.gates.begin(), c.gates.end(), [](const Gate& g) { return !g.matrix.empty(); });
    auto cn = schroedinger_network(c, x, y, tensors);
    std::vector<VertexId> sequence;
    sequence.push_back(cn.inputs[0]);
    sequence.insert(sequence.end(), cn.gate_vertex.begin(), cn.gate_vertex.end());
    sequence.push_back(cn.outputs[0]);
    auto tree = tree_from_order(cn.net, linear_order(sequence));
    auto report = cost_report(cn.net, tree);
    const auto cm = congestion(cn.net, tree);

    std::vector<double> gate_con;
    const double n = static_cast<double>(c.qubits);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto node = *tree.parent(tree.leaf_of(cn.gate_vertex[i]));
        const auto expected = ExactCost::pow2(static_cast<unsigned>(c.qubits + c.gates[i].locality()));
        if (cm.node_cost[index(node)] != expected)
            throw std::logic_error("gate " + std::to_string(i + 1) + " contraction has congestion " +
                                   std::to_string(cm.node_con[index(node)]) + ", expected " +
                                   std::to_string(n + static_cast<double>(c.gates[i].locality())));
        gate_con.push_back(cm.node_con[index(node)]);
    }
    std::vector<double> spine;
    for (std::size_t f = 0; f < tree.edge_count(); ++f) {
        auto [a, b] = tree.endpoints(make_id<TreeEdgeId>(f));
        if (tree.is_internal(a) && tree.is_internal(b)) spine.push_back(cm.tree_edge_con[f]);
    }
    return {std::move(cn), std::move(tree), std::move(report), std::move(gate_con), std::move(spine)};
}

}  // namespace tnc
