#ifndef TNC_IDS_HPP
#define TNC_IDS_HPP

#include <cstddef>
#include <cstdint>
#include <type_traits>

namespace tnc {

// Strongly typed handles. Vertex ids are dense per network, edge ids are
// stable across symbolic contraction, node/tree-edge ids index a tree.
enum class VertexId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};
enum class NodeId : std::uint32_t {};
enum class TreeEdgeId : std::uint32_t {};

template <class Id>
constexpr std::size_t index(Id id) noexcept {
    return static_cast<std::size_t>(static_cast<std::underlying_type_t<Id>>(id));
}

template <class Id>
constexpr Id make_id(std::size_t i) noexcept {
    return static_cast<Id>(static_cast<std::underlying_type_t<Id>>(i));
}

}  // namespace tnc

#endif
