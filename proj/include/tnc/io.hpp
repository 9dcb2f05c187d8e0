#ifndef TNC_IO_HPP
#define TNC_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tnc/contraction_tree.hpp"
#include "tnc/network.hpp"

namespace tnc {

/// Malformed input file. Messages start with "line N: " when a line is known.
class ParseError : public std::invalid_argument {
public:
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

// ------------------------------------------------------------ network files
//
//   tn v1
//   v <name>
//   e <dim> <name>...          one name = open leg
//   t <name> inline <value>... value = re or re,im; row-major over the
//                              vertex's edges in file order
//   t <name> file <path>       sidecar, relative to the network file
//
// '#' starts a comment. Names may not contain whitespace, '(', ')' or ','.

/// Throws ParseError. base_dir resolves sidecar paths.
Network read_network(std::istream& in, const std::filesystem::path& base_dir = {});
Network read_network_file(const std::filesystem::path& path);

/// Writes every tensor inline.
void write_network(std::ostream& out, const Network& net);

/// Writes the network to path. Tensors with more than inline_limit entries go
/// to sidecar files named <stem>.<vertex>.bin next to it.
void write_network_file(const std::filesystem::path& path, const Network& net, std::size_t inline_limit = 256);

/// Sidecar layout, little-endian: u64 rank, rank x u64 extents, then
/// re/im float64 pairs in row-major order.
void write_tensor_binary(std::ostream& out, const DenseTensor& t);
/// Axes of the result are the given labels; the stored extents must match.
DenseTensor read_tensor_binary(std::istream& in, std::vector<EdgeId> axes, std::span<const std::uint64_t> extents);

// --------------------------------------------------------------- tree files

struct ParsedTree {
    ContractionTree rooted;   // the hierarchy as written, root above the top split
    bool rooted_form = false; // text was wrapped in root(...)

    /// The tree in the form the file declares.
    ContractionTree as_written() const;
};

/// Parses "((a,b),c)" or "root(((a,b),c))" over the non-environment vertices
/// of net (open legs must already be absorbed). Errors name the offending leaf.
ParsedTree parse_tree(std::string_view text, const Network& net);

/// Rooted trees print as root(...), children ordered by their smallest vertex
/// id. Unrooted trees are rooted at the environment leaf, or else next to the
/// leaf of vertex 0, and printed without the wrapper.
std::string format_tree(const Network& net, const ContractionTree& tree);

/// One step per line: two comma-separated vertex groups separated by
/// whitespace, e.g. "a,b c".
ContractionOrder parse_order(std::istream& in, const Network& net);
std::string format_order(const Network& net, const ContractionOrder& order);

// ------------------------------------------------------- random instances

enum class RandomKind { grid, ring, star, erdos };
RandomKind parse_random_kind(std::string_view name);

struct RandomNetworkParams {
    RandomKind kind = RandomKind::grid;
    std::size_t n = 3;           // grid side / ring length / star leaves / vertex count
    std::size_t cols = 0;        // grid columns; 0 means n
    std::uint64_t dim = 2;
    double p = 0.5;              // erdos edge probability
    std::uint64_t seed = 0;
    bool tensors = true;         // seeded complex Gaussian entries
};

/// Deterministic in its parameters. Grid vertices are named r<i>c<j>, star centre
/// "hub" and leaves l<i>, others v<i>. Throws std::invalid_argument on bad sizes.
Network random_network(const RandomNetworkParams& params);

/// Attaches complex Gaussian tensors to every non-environment vertex.
void fill_random_tensors(Network& net, std::mt19937_64& rng);

}  // namespace tnc

#endif
