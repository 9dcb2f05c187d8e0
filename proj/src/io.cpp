#include "tnc/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace tnc {

namespace {

bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    return std::none_of(name.begin(), name.end(), [](char c) {
        return c == '(' || c == ')' || c == ',' || c == '#' || std::isspace(static_cast<unsigned char>(c));
    });
}

std::string at_line(std::size_t line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream ss{std::string(line)};
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError("bad number '" + std::string(s) + "'");
    return v;
}

std::string format_double(double x) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

Scalar parse_scalar(std::string_view tok) {
    const auto comma = tok.find(',');
    if (comma == std::string_view::npos) return {parse_double(tok), 0.0};
    return {parse_double(tok.substr(0, comma)), parse_double(tok.substr(comma + 1))};
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ParseError("tensor file truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

struct PendingTensor {
    VertexId vertex;
    std::size_t line;
    bool inline_data;
    std::vector<std::string> tokens;  // values, or the path
};

std::vector<std::uint64_t> incident_extents(const Network& net, VertexId v) {
    std::vector<std::uint64_t> ext;
    for (auto id : net.incident(v)) ext.push_back(net.edge(id).dim);
    return ext;
}

}  // namespace

// ------------------------------------------------------------ tensors (binary)

void write_tensor_binary(std::ostream& out, const DenseTensor& t) {
    put_u64(out, t.rank());
    for (auto e : t.extents()) put_u64(out, e);
    for (auto z : t.data()) {
        put_u64(out, std::bit_cast<std::uint64_t>(z.real()));
        put_u64(out, std::bit_cast<std::uint64_t>(z.imag()));
    }
}

DenseTensor read_tensor_binary(std::istream& in, std::vector<EdgeId> axes, std::span<const std::uint64_t> extents) {
    const auto rank = get_u64(in);
    if (rank != extents.size())
        throw ParseError("tensor file has rank " + std::to_string(rank) + ", expected " + std::to_string(extents.size()));
    std::vector<std::uint64_t> ext;
    for (std::size_t k = 0; k < rank; ++k) {
        ext.push_back(get_u64(in));
        if (ext.back() != extents[k])
            throw ParseError("tensor file axis " + std::to_string(k) + " has extent " + std::to_string(ext.back()) +
                             ", expected " + std::to_string(extents[k]));
    }
    std::vector<Scalar> data(element_count(ext));
    for (auto& z : data) {
        const auto re = std::bit_cast<double>(get_u64(in));
        const auto im = std::bit_cast<double>(get_u64(in));
        z = {re, im};
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError("tensor file has trailing bytes");
    return DenseTensor(std::move(axes), std::move(ext), std::move(data));
}

// ------------------------------------------------------------- network files

Network read_network(std::istream& in, const std::filesystem::path& base_dir) {
    Network net;
    std::vector<PendingTensor> pending;
    std::vector<bool> has_tensor_line;
    bool header = false;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto tok = split_ws(strip_comment(raw));
        if (tok.empty()) continue;
        try {
            if (!header) {
                if (tok.size() != 2 || tok[0] != "tn") throw ParseError("expected header 'tn v1'");
                if (tok[1] != "v1") throw ParseError("unsupported version '" + tok[1] + "'");
                header = true;
                continue;
            }
            const auto lookup = [&](const std::string& name) {
                const auto v = net.find_vertex(name);
                if (!v) throw ParseError("unknown vertex '" + name + "'");
                return *v;
            };
            if (tok[0] == "v") {
                if (tok.size() != 2) throw ParseError("expected 'v <name>'");
                if (!valid_name(tok[1])) throw ParseError("invalid vertex name '" + tok[1] + "'");
                if (net.find_vertex(tok[1])) throw ParseError("duplicate vertex '" + tok[1] + "'");
                net.add_vertex(tok[1]);
                has_tensor_line.push_back(false);
            } else if (tok[0] == "e") {
                if (tok.size() < 3) throw ParseError("expected 'e <dim> <name>...'");
                const auto dim = parse_u64(tok[1], "dimension");
                if (dim == 0) throw ParseError("dimension must be at least 1");
                std::vector<VertexId> ends;
                for (std::size_t i = 2; i < tok.size(); ++i) ends.push_back(lookup(tok[i]));
                net.add_edge(std::move(ends), dim);
            } else if (tok[0] == "t") {
                if (tok.size() < 3) throw ParseError("expected 't <name> inline|file ...'");
                const auto v = lookup(tok[1]);
                if (has_tensor_line[index(v)]) throw ParseError("second tensor for vertex '" + tok[1] + "'");
                has_tensor_line[index(v)] = true;
                if (tok[2] == "inline") {
                    pending.push_back({v, lineno, true, {tok.begin() + 3, tok.end()}});
                } else if (tok[2] == "file") {
                    if (tok.size() != 4) throw ParseError("expected 't <name> file <path>'");
                    pending.push_back({v, lineno, false, {tok[3]}});
                } else {
                    throw ParseError("unknown tensor source '" + tok[2] + "'");
                }
            } else {
                throw ParseError("unknown directive '" + tok[0] + "'");
            }
        } catch (const ParseError& e) {
            throw ParseError(at_line(lineno, e.what()));
        } catch (const std::invalid_argument& e) {
            throw ParseError(at_line(lineno, e.what()));
        }
    }
    if (!header) throw ParseError("missing header 'tn v1'");

    for (auto& p : pending) {
        try {
            auto axes = std::vector<EdgeId>(net.incident(p.vertex).begin(), net.incident(p.vertex).end());
            const auto ext = incident_extents(net, p.vertex);
            if (p.inline_data) {
                const auto count = element_count(ext);
                if (p.tokens.size() != count)
                    throw ParseError("vertex '" + net.name(p.vertex) + "' needs " + std::to_string(count) + " values, got " +
                                     std::to_string(p.tokens.size()));
                std::vector<Scalar> data;
                data.reserve(count);
                for (const auto& t : p.tokens) data.push_back(parse_scalar(t));
                net.set_tensor(p.vertex, DenseTensor(std::move(axes), ext, std::move(data)));
            } else {
                const auto path = base_dir / p.tokens[0];
                std::ifstream f(path, std::ios::binary);
                if (!f) throw ParseError("cannot open tensor file '" + path.string() + "'");
                net.set_tensor(p.vertex, read_tensor_binary(f, std::move(axes), ext));
            }
        } catch (const std::invalid_argument& e) {
            throw ParseError(at_line(p.line, e.what()));
        }
    }
    return net;
}

Network read_network_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open network file '" + path.string() + "'");
    return read_network(f, path.parent_path());
}

namespace {

void write_network_impl(std::ostream& out, const Network& net, const std::filesystem::path* file, std::size_t inline_limit) {
    const auto env = net.environment();
    out << "tn v1\n";
    for (std::size_t i = 0; i < net.vertex_count(); ++i) {
        const auto v = make_id<VertexId>(i);
        if (env == v) continue;
        if (!valid_name(net.name(v))) throw std::invalid_argument("vertex name '" + net.name(v) + "' cannot be written");
        out << "v " << net.name(v) << '\n';
    }
    for (const auto& e : net.edges()) {
        out << "e " << e.dim;
        for (auto v : e.endpoints)
            if (env != v) out << ' ' << net.name(v);
        out << '\n';
    }
    for (std::size_t i = 0; i < net.vertex_count(); ++i) {
        const auto v = make_id<VertexId>(i);
        const auto* t = net.tensor(v);
        if (!t || env == v) continue;
        const auto c = t->canonical();
        if (file && c.size() > inline_limit) {
            const auto name = file->stem().string() + "." + net.name(v) + ".bin";
            std::ofstream side(file->parent_path() / name, std::ios::binary);
            if (!side) throw std::runtime_error("cannot write tensor file '" + name + "'");
            write_tensor_binary(side, c);
            out << "t " << net.name(v) << " file " << name << '\n';
            continue;
        }
        out << "t " << net.name(v) << " inline";
        for (auto z : c.data()) out << ' ' << format_double(z.real()) << ',' << format_double(z.imag());
        out << '\n';
    }
}

}  // namespace

void write_network(std::ostream& out, const Network& net) { write_network_impl(out, net, nullptr, 0); }

void write_network_file(const std::filesystem::path& path, const Network& net, std::size_t inline_limit) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_network_impl(f, net, &path, inline_limit);
}

// ---------------------------------------------------------------- tree files

namespace {

class TreeParser {
public:
    TreeParser(std::string_view text, const Network& net) : text_(text), net_(net), seen_(net.vertex_count(), false) {}

    ParsedTree run() {
        skip_ws();
        bool rooted = false;
        if (text_.substr(pos_).starts_with("root")) {
            auto save = pos_;
            pos_ += 4;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                rooted = true;
                ++pos_;
            } else {
                pos_ = save;
            }
        }
        node();
        if (rooted) expect(')');
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected text after the tree");
        const auto env = net_.environment();
        for (std::size_t v = 0; v < net_.vertex_count(); ++v)
            if (!seen_[v] && env != make_id<VertexId>(v))
                throw ParseError("vertex '" + net_.name(make_id<VertexId>(v)) + "' has no leaf in the tree");
        return ParsedTree{tree_from_order(net_, order_), rooted};
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("tree text at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::vector<VertexId> node() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            auto left = node();
            expect(',');
            auto right = node();
            expect(')');
            order_.push_back(make_step(left, right));
            left.insert(left.end(), right.begin(), right.end());
            return left;
        }
        const auto start = pos_;
        while (pos_ < text_.size() && valid_name(text_.substr(pos_, 1))) ++pos_;
        if (start == pos_) fail("expected a leaf name or '('");
        const std::string name(text_.substr(start, pos_ - start));
        const auto v = net_.find_vertex(name);
        if (!v) throw ParseError("unknown leaf '" + name + "'");
        if (net_.environment() == v) throw ParseError("leaf '" + name + "' is the environment vertex");
        if (seen_[index(*v)]) throw ParseError("leaf '" + name + "' appears more than once");
        seen_[index(*v)] = true;
        return {*v};
    }

    std::string_view text_;
    const Network& net_;
    std::vector<bool> seen_;
    std::size_t pos_ = 0;
    ContractionOrder order_;
};

// Returns the text of the subtree at x together with its smallest vertex.
std::pair<std::string, std::size_t> format_subtree(const Network& net, const ContractionTree& tree, NodeId x) {
    const auto kids = tree.children(x);
    if (kids.empty()) {
        const auto v = tree.label_of(x);
        return {net.name(*v), index(*v)};
    }
    auto a = format_subtree(net, tree, kids[0]);
    auto b = format_subtree(net, tree, kids[1]);
    if (b.second < a.second) std::swap(a, b);
    return {"(" + a.first + "," + b.first + ")", a.second};
}

std::string format_rooted_body(const Network& net, const ContractionTree& tree) {
    return format_subtree(net, tree, tree.children(*tree.root()).front()).first;
}

}  // namespace

ContractionTree ParsedTree::as_written() const { return rooted_form ? rooted : unroot(rooted); }

ParsedTree parse_tree(std::string_view text, const Network& net) {
    if (net.has_open_legs()) throw std::invalid_argument("absorb open legs before reading a tree");
    return TreeParser(text, net).run();
}

std::string format_tree(const Network& net, const ContractionTree& tree) {
    check_tree_matches(net, tree);
    if (tree.is_rooted()) return "root(" + format_rooted_body(net, tree) + ")";
    if (tree.edge_count() == 0) return net.name(*tree.label_of(make_id<NodeId>(0)));
    if (const auto env = net.environment()) return format_rooted_body(net, root_at_leaf(tree, *env));
    const auto leaf = tree.leaf_of(make_id<VertexId>(0));
    return format_rooted_body(net, root_at(tree, tree.neighbors(leaf).front().edge));
}

ContractionOrder parse_order(std::istream& in, const Network& net) {
    ContractionOrder order;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto tok = split_ws(strip_comment(raw));
        if (tok.empty()) continue;
        if (tok.size() != 2) throw ParseError(at_line(lineno, "expected two vertex groups"));
        std::vector<VertexId> sides[2];
        for (int s = 0; s < 2; ++s) {
            std::istringstream ss(tok[s]);
            std::string name;
            while (std::getline(ss, name, ',')) {
                const auto v = net.find_vertex(name);
                if (!v) throw ParseError(at_line(lineno, "unknown vertex '" + name + "'"));
                sides[s].push_back(*v);
            }
        }
        order.push_back(make_step(sides[0], sides[1]));
    }
    return order;
}

std::string format_order(const Network& net, const ContractionOrder& order) {
    std::string out;
    for (const auto& step : order) {
        for (int s = 0; s < 2; ++s) {
            const auto& side = s == 0 ? step.left : step.right;
            for (std::size_t i = 0; i < side.size(); ++i) out += (i ? "," : "") + net.name(side[i]);
            out += s == 0 ? ' ' : '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------- random instances

RandomKind parse_random_kind(std::string_view name) {
    static const std::map<std::string_view, RandomKind> kinds{
        {"grid", RandomKind::grid}, {"ring", RandomKind::ring}, {"star", RandomKind::star}, {"erdos", RandomKind::erdos}};
    const auto it = kinds.find(name);
    if (it == kinds.end()) throw std::invalid_argument("unknown kind '" + std::string(name) + "' (grid, ring, star, erdos)");
    return it->second;
}

void fill_random_tensors(Network& net, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    for (std::size_t i = 0; i < net.vertex_count(); ++i) {
        const auto v = make_id<VertexId>(i);
        if (net.environment() == v) continue;
        std::vector<EdgeId> axes(net.incident(v).begin(), net.incident(v).end());
        auto ext = incident_extents(net, v);
        std::vector<Scalar> data(element_count(ext));
        for (auto& z : data) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z = {re, im};
        }
        net.set_tensor(v, DenseTensor(std::move(axes), std::move(ext), std::move(data)));
    }
}

Network random_network(const RandomNetworkParams& params) {
    if (params.dim == 0) throw std::invalid_argument("dim must be at least 1");
    if (params.n == 0) throw std::invalid_argument("n must be at least 1");
    std::mt19937_64 rng(params.seed);
    Network net;
    switch (params.kind) {
    case RandomKind::grid: {
        const auto rows = params.n;
        const auto cols = params.cols ? params.cols : params.n;
        auto at = [&](std::size_t r, std::size_t c) { return make_id<VertexId>(r * cols + c); };
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) net.add_vertex("r" + std::to_string(r) + "c" + std::to_string(c));
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                if (c + 1 < cols) net.add_edge({at(r, c), at(r, c + 1)}, params.dim);
                if (r + 1 < rows) net.add_edge({at(r, c), at(r + 1, c)}, params.dim);
            }
        break;
    }
    case RandomKind::ring:
        if (params.n < 3) throw std::invalid_argument("ring needs n >= 3");
        for (std::size_t i = 0; i < params.n; ++i) net.add_vertex("v" + std::to_string(i));
        for (std::size_t i = 0; i < params.n; ++i)
            net.add_edge({make_id<VertexId>(i), make_id<VertexId>((i + 1) % params.n)}, params.dim);
        break;
    case RandomKind::star: {
        const auto hub = net.add_vertex("hub");
        for (std::size_t i = 0; i < params.n; ++i) net.add_edge({hub, net.add_vertex("l" + std::to_string(i))}, params.dim);
        break;
    }
    case RandomKind::erdos: {
        if (!(params.p >= 0.0 && params.p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
        for (std::size_t i = 0; i < params.n; ++i) net.add_vertex("v" + std::to_string(i));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (std::size_t i = 0; i < params.n; ++i)
            for (std::size_t j = i + 1; j < params.n; ++j)
                if (coin(rng) < params.p) net.add_edge({make_id<VertexId>(i), make_id<VertexId>(j)}, params.dim);
        break;
    }
    }
    if (params.tensors) fill_random_tensors(net, rng);
    return net;
}

}  // namespace tnc
