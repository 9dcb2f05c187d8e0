#ifndef TNC_CIRCUIT_HPP
#define TNC_CIRCUIT_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "tnc/contraction_tree.hpp"
#include "tnc/cost_model.hpp"
#include "tnc/network.hpp"
#include "tnc/tensor.hpp"

namespace tnc {

/// Gate on l distinct qubits. matrix is 2^l x 2^l row-major with the first
/// listed qubit as the most significant bit; empty for plan-only circuits.
struct Gate {
    std::vector<std::size_t> qubits;
    std::vector<Scalar> matrix;

    std::size_t locality() const noexcept { return qubits.size(); }
};

struct Circuit {
    std::size_t qubits = 0;
    std::vector<Gate> gates;

    /// Throws std::invalid_argument on out-of-range or repeated qubits and
    /// on matrices of the wrong size.
    void validate() const;
};

/// Haar-ish random unitary (Gram-Schmidt on a complex Gaussian matrix).
std::vector<Scalar> random_unitary(std::size_t dim, std::mt19937_64& rng);

/// m gates, each on 1..max_locality random distinct qubits, random unitaries.
Circuit random_circuit(std::size_t qubits, std::size_t gates, std::mt19937_64& rng, std::size_t max_locality = 2);

/// Network for the amplitude <x| G_1 ... G_m |y>. Qubit q of a basis label is
/// bit (n-1-q). Every wire segment is one dim-2 edge; gate tensors hold
/// <out|G|in> where out faces x.
struct CircuitNetwork {
    Network net;
    std::vector<VertexId> gate_vertex;  // per gate
    std::vector<VertexId> inputs;       // x (one vertex) or nothing when absorbed
    std::vector<VertexId> outputs;      // y (one vertex) or one per qubit
};

/// x, G_1..G_m, y as separate vertices.
CircuitNetwork schroedinger_network(const Circuit& c, std::uint64_t x, std::uint64_t y, bool with_tensors = true);

/// x absorbed into the first gate touching each qubit and y split into one
/// rank-1 vertex per qubit, so cutting every remaining wire leaves a network
/// without edges.
CircuitNetwork feynman_network(const Circuit& c, std::uint64_t x, std::uint64_t y);

struct SchroedingerPlan {
    CircuitNetwork circuit;
    ContractionTree tree;
    CostReport report;
    std::vector<double> gate_node_congestion;   // per gate, log2
    std::vector<double> spine_edge_congestion;  // internal spine edges, log2
};

/// Linear order (x, G_1, ..., G_m, y). Throws std::logic_error if a gate's
/// contraction node does not have congestion n + l_i.
SchroedingerPlan schroedinger_plan(const Circuit& c, std::uint64_t x = 0, std::uint64_t y = 0);

}  // namespace tnc

#endif
