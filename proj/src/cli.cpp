#include "tnc/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tnc/circuit.hpp"
#include "tnc/cost_model.hpp"
#include "tnc/decomposition.hpp"
#include "tnc/errors.hpp"
#include "tnc/executor.hpp"
#include "tnc/io.hpp"
#include "tnc/planner.hpp"

namespace tnc {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt_double(double x) {
    if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

std::string scalar_text(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number_float()) return fmt_double(j.get<double>());
    if (j.is_null()) return "null";
    if (j.is_array()) {
        std::string s;
        for (const auto& x : j) s += (s.empty() ? "" : ",") + scalar_text(x);
        return s;
    }
    return j.dump();
}

// Flat "key = value" lines; nested objects become dotted keys.
void print_flat(std::ostream& out, const Json& doc, const std::string& prefix = "") {
    for (const auto& [key, val] : doc.items()) {
        const auto name = prefix.empty() ? key : prefix + "." + key;
        if (val.is_object()) {
            print_flat(out, val, name);
        } else if (val.is_array()) {
            out << name << " =";
            for (const auto& x : val) out << ' ' << scalar_text(x);
            out << '\n';
        } else {
            out << name << " = " << scalar_text(val) << '\n';
        }
    }
}

void put_cost(Json& doc, const std::string& key, ExactCost c) {
    doc[key] = c.to_string();
    doc[key + "_log2"] = c.log2();
}

Json report_json(const CostReport& r) {
    Json j;
    put_cost(j, "sequential_time", r.sequential_time);
    put_cost(j, "unrooted_sequential_time", r.unrooted_sequential_time);
    put_cost(j, "peak_memory", r.peak_memory);
    put_cost(j, "parallel_time", r.parallel_time);
    j["vertcon"] = r.vertcon;
    j["vertcon_cost"] = r.vertcon_cost.to_string();
    j["edgecon"] = r.edgecon;
    j["edgecon_cost"] = r.edgecon_cost.to_string();
    j["peak_order_exact"] = r.peak_order_exact;
    return j;
}

Json tensor_json(const DenseTensor& t) {
    Json j;
    Json axes = Json::array();
    for (auto a : t.axes()) axes.push_back(index(a));
    j["axes"] = axes;
    j["extents"] = Json(std::vector<std::uint64_t>(t.extents().begin(), t.extents().end()));
    Json data = Json::array();
    for (auto z : t.data()) data.push_back(Json::array({z.real(), z.imag()}));
    j["entries"] = data;
    return j;
}

// One "a,b|c" string per step.
Json order_json(const Network& net, const ContractionOrder& order) {
    Json j = Json::array();
    std::istringstream lines(format_order(net, order));
    std::string line;
    while (std::getline(lines, line)) {
        line[line.find(' ')] = '|';
        j.push_back(line);
    }
    return j;
}

Json stats_json(const ExecutionStats& s) {
    Json j;
    j["multiply_adds"] = s.multiply_adds.to_string();
    j["entries_read"] = s.entries_read.to_string();
    j["output_entries"] = s.output_entries.to_string();
    j["total_time"] = s.total_time().to_string();
    j["peak_memory"] = s.peak_memory.to_string();
    j["peak_memory_with_transients"] = s.peak_memory_with_transients.to_string();
    return j;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + path + "'");
    f << text;
}

Network load_network(const std::string& path) { return absorb_open_legs(read_network_file(path)); }

ParsedTree load_tree(const std::string& path, const Network& net) { return parse_tree(read_text(path), net); }

std::vector<EdgeId> parse_edge_list(const std::string& text) {
    std::vector<EdgeId> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size()) throw ParseError("bad edge id '" + tok + "'");
        out.push_back(make_id<EdgeId>(v));
    }
    if (out.empty()) throw ParseError("--sliced needs at least one edge id");
    return out;
}

// Common state of one invocation.
struct Context {
    std::ostream& out;
    std::ostream& err;
    bool json = false;
    Json doc;

    // File-producing commands: text goes to out_path, or to stdout with the
    // summary on stderr.
    void emit_file(const std::string& text, const std::string& out_path) {
        if (json) {
            if (out_path.empty()) doc["output"] = text;
            else write_text(out_path, text);
            return;
        }
        if (out_path.empty()) {
            out << text;
            print_flat(err, doc);
        } else {
            write_text(out_path, text);
            print_flat(out, doc);
        }
        doc = Json::object();
    }

    void finish(const std::string& command) {
        if (json) {
            Json full;
            full["format"] = "tnc";
            full["version"] = kOutputVersion;
            full["command"] = command;
            for (auto& [k, v] : doc.items()) full[k] = v;
            out << full.dump(2) << '\n';
        } else {
            print_flat(out, doc);
        }
    }
};

// ------------------------------------------------------------------ commands

struct PlanArgs {
    std::string network;
    std::string objective = "total_time";
    std::string method = "brute";
    std::uint64_t seed = 0;
    std::size_t cap = 0;
    unsigned threads = 0;
    std::string out_path;
};

void cmd_plan(Context& ctx, const PlanArgs& a) {
    const auto net = read_network_file(a.network);
    const auto objective = parse_objective(a.objective);
    Plan plan = [&] {
        if (a.method == "brute") {
            BruteOptions opts;
            if (a.cap) opts.cap = a.cap;
            opts.threads = a.threads;
            return brute_force_plan(net, objective, opts);
        }
        if (a.method == "greedy") return greedy_plan(net, objective, a.seed);
        if (a.method == "linear") return linear_plan(net, objective);
        throw std::invalid_argument("unknown method '" + a.method + "' (brute, greedy, linear)");
    }();
    const auto text = format_tree(plan.net, plan.tree);
    if (!a.out_path.empty()) write_text(a.out_path, text + "\n");
    ctx.doc["tree"] = text;
    ctx.doc["method"] = a.method;
    ctx.doc["objective"] = std::string(to_string(objective));
    ctx.doc["objective_value"] = plan.value.to_string();
    ctx.doc["exact"] = plan.exact;
    ctx.doc["trees_examined"] = plan.trees_examined;
    ctx.doc["report"] = report_json(plan.report);
    ctx.doc["schedule"] = order_json(plan.net, order_from_schedule(plan.tree, plan.report.schedule));
}

struct CostArgs {
    std::string network;
    std::string tree;
    std::string order;
};

void cmd_cost(Context& ctx, const CostArgs& a) {
    const auto net = load_network(a.network);
    const auto parsed = load_tree(a.tree, net);
    const auto& tree = parsed.rooted;
    CostReport report;
    if (!a.order.empty()) {
        std::ifstream f(a.order);
        if (!f) throw ParseError("cannot open '" + a.order + "'");
        const auto schedule = schedule_from_order(tree, parse_order(f, net));
        report = cost_report(net, tree, schedule);
    } else {
        report = cost_report(net, tree);
    }
    const auto unit = unit_congestion(net, tree);
    ctx.doc["tree_form"] = parsed.rooted_form ? "rooted" : "unrooted";
    ctx.doc["report"] = report_json(report);
    ctx.doc["unit_vertcon"] = unit.vertcon;
    ctx.doc["unit_edgecon"] = unit.edgecon;
    ctx.doc["schedule"] = order_json(net, order_from_schedule(tree, report.schedule));
}

struct ConvertArgs {
    std::string from;
    std::string to;
    std::string network;
    std::string input;
    std::string out_path;
};

void cmd_convert(Context& ctx, const ConvertArgs& a) {
    for (const auto* f : {&a.from, &a.to})
        if (*f != "tree" && *f != "td" && *f != "bd") throw std::invalid_argument("unknown format '" + *f + "' (tree, td, bd)");
    if (a.from == "bd" && a.to == "td") throw std::invalid_argument("unsupported conversion bd -> td");

    const auto net = load_network(a.network);
    if (net.has_hyperedges()) throw std::invalid_argument("conversions need a network without hyperedges");
    const auto graph = line_graph(net);
    const auto input = read_text(a.input);
    std::istringstream in(input);

    const auto read_td_checked = [&] {
        auto parsed = read_td(in);
        if (parsed.vertex_count != graph.vertex_count)
            throw std::invalid_argument("tree decomposition has " + std::to_string(parsed.vertex_count) +
                                        " vertices, the line graph has " + std::to_string(graph.vertex_count));
        return parsed.td;
    };
    const auto td_text = [&](const TreeDecomposition& td) {
        std::ostringstream s;
        write_td(s, td, graph.vertex_count);
        std::istringstream back(s.str());
        const auto again = read_td(back);
        (void)tree_width(again.td, graph);
        return s.str();
    };
    const auto bd_text = [&](const BranchDecomposition& bd) {
        std::ostringstream s;
        write_bd(s, bd);
        std::istringstream back(s.str());
        validate_branch_decomposition(read_bd(back), graph);
        return s.str();
    };
    const auto tree_text = [&](const ContractionTree& tree) {
        auto text = format_tree(net, tree);
        if (!same_labeled_tree(parse_tree(text, net).as_written(), tree))
            throw std::logic_error("tree text does not re-parse to the same tree");
        return text + "\n";
    };

    std::string output;
    if (a.from == a.to) {
        if (a.from == "tree") {
            const auto tree = parse_tree(input, net).as_written();
            const auto unit = unit_congestion(net, tree);
            ctx.doc["vertcon"] = unit.vertcon;
            ctx.doc["edgecon"] = unit.edgecon;
        } else if (a.from == "td") {
            ctx.doc["width"] = tree_width(read_td_checked(), graph);
        } else {
            const auto bd = read_bd(in);
            validate_branch_decomposition(bd, graph);
            ctx.doc["width"] = branch_width(bd, graph);
        }
        output = input;
    } else if (a.from == "tree") {
        const auto tree = parse_tree(input, net).as_written();
        const auto unit = unit_congestion(net, tree);
        if (a.to == "bd") {
            const auto bd = embedding_to_branch_decomposition(net, tree);
            ctx.doc["width"] = branch_width(bd, graph);
            ctx.doc["edgecon"] = unit.edgecon;
            output = bd_text(bd);
        } else {
            const auto e = validate_embedding_as_tree_decomposition(net, tree);
            ctx.doc["width"] = e.width;
            ctx.doc["vertcon"] = unit.vertcon;
            output = td_text(e.td);
        }
    } else if (a.from == "bd") {
        const auto bd = read_bd(in);
        const auto width = branch_width(bd, graph);
        const auto tree = branch_decomposition_to_embedding(net, bd);
        const auto unit = unit_congestion(net, tree);
        const auto bound = width + net.max_degree() / 3;
        ctx.doc["width"] = width;
        ctx.doc["edgecon"] = unit.edgecon;
        ctx.doc["vertcon"] = unit.vertcon;
        ctx.doc["bound"] = bound;
        ctx.doc["bound_holds"] = unit.edgecon <= bound;
        output = tree_text(tree);
    } else {
        const auto td = read_td_checked();
        ctx.doc["td_width"] = tree_width(td, graph);
        if (a.to == "bd") {
            const auto bd = tree_to_branch_decomposition(td, graph);
            ctx.doc["width"] = branch_width(bd, graph);
            output = bd_text(bd);
        } else {
            const auto imported = import_tree_decomposition(td, net);
            ctx.doc["bd_width"] = imported.bd_width;
            ctx.doc["vertcon"] = imported.vertcon;
            ctx.doc["edgecon"] = imported.edgecon;
            ctx.doc["vertcon_bound"] = imported.vertcon_bound;
            output = tree_text(imported.tree);
        }
    }
    ctx.emit_file(output, a.out_path);
}

struct ContractArgs {
    std::string network;
    std::string tree;
    std::string order;
    std::string sliced;
    unsigned parallel = 0;
    bool oracle = false;
};

void cmd_contract(Context& ctx, const ContractArgs& a) {
    const auto net = load_network(a.network);
    if (!net.has_tensors()) throw std::invalid_argument("network has no tensors to contract");
    if (!a.sliced.empty() && a.parallel) throw std::invalid_argument("--sliced and --parallel cannot be combined");

    const auto tree_for = [&](const Network& target) {
        if (!a.tree.empty()) return load_tree(a.tree, target).rooted;
        return greedy_plan(target, Objective::total_time).tree;
    };

    DenseTensor value;
    if (!a.sliced.empty()) {
        const auto plan = make_slice_plan(net, parse_edge_list(a.sliced));
        const auto inner = tree_for(plan.reduced);
        const auto r = execute_sliced(net, plan, inner);
        value = r.value;
        ctx.doc["mode"] = "sliced";
        ctx.doc["assignments"] = r.assignments.to_string();
        ctx.doc["multiply_adds"] = r.multiply_adds.to_string();
        ctx.doc["per_slice"] = stats_json(r.per_slice);
    } else if (a.parallel) {
        const auto tree = tree_for(net);
        const auto r = execute_parallel(net, tree, a.parallel);
        value = r.value;
        ctx.doc["mode"] = "parallel";
        ctx.doc["workers"] = r.workers;
        ctx.doc["makespan"] = r.makespan.to_string();
        ctx.doc["makespan_unlimited"] = r.makespan_unlimited.to_string();
        ctx.doc["measured_total"] = r.measured_total.to_string();
        ctx.doc["model_parallel_time"] = parallel_time(net, tree).time.to_string();
    } else {
        const auto tree = tree_for(net);
        ExecutionResult r;
        if (!a.order.empty()) {
            std::ifstream f(a.order);
            if (!f) throw ParseError("cannot open '" + a.order + "'");
            r = execute(net, tree, parse_order(f, net));
        } else {
            r = execute(net, tree);
        }
        value = r.value;
        ctx.doc["mode"] = "sequential";
        ctx.doc["measured"] = stats_json(r.stats);
        ctx.doc["model"] = report_json(cost_report(net, tree, r.schedule));
    }
    ctx.doc["value"] = tensor_json(value);
    if (a.oracle) ctx.doc["oracle_relative_error"] = relative_error(value, naive_oracle(net));
}

struct ValidateArgs {
    std::string network;
    std::string tree;
};

void cmd_validate(Context& ctx, const ValidateArgs& a) {
    const auto raw = read_network_file(a.network);
    raw.validate();
    std::size_t open = 0;
    for (const auto& e : raw.edges()) open += e.is_open_leg();
    ctx.doc["vertices"] = raw.vertex_count();
    ctx.doc["edges"] = raw.edge_count();
    ctx.doc["open_legs"] = open;
    ctx.doc["hyperedges"] = raw.has_hyperedges();
    ctx.doc["tensors"] = raw.has_tensors();
    if (!a.tree.empty()) {
        const auto net = absorb_open_legs(raw);
        const auto parsed = load_tree(a.tree, net);
        const auto c = congestion(net, parsed.rooted);
        ctx.doc["tree_form"] = parsed.rooted_form ? "rooted" : "unrooted";
        ctx.doc["vertcon"] = c.vertcon;
        ctx.doc["edgecon"] = c.edgecon;
    }
    ctx.doc["status"] = "ok";
}

struct RandomArgs {
    std::string kind = "grid";
    std::size_t n = 3;
    std::size_t cols = 0;
    std::uint64_t dim = 2;
    double p = 0.5;
    std::uint64_t seed = 0;
    bool no_tensors = false;
    std::string out_path;
};

void cmd_random(Context& ctx, const RandomArgs& a) {
    RandomNetworkParams params;
    params.kind = parse_random_kind(a.kind);
    params.n = a.n;
    params.cols = a.cols;
    params.dim = a.dim;
    params.p = a.p;
    params.seed = a.seed;
    params.tensors = !a.no_tensors;
    const auto net = random_network(params);
    std::ostringstream s;
    write_network(s, net);
    ctx.doc["vertices"] = net.vertex_count();
    ctx.doc["edges"] = net.edge_count();
    ctx.emit_file(s.str(), a.out_path);
}

struct SchroedingerArgs {
    std::size_t qubits = 2;
    std::size_t gates = 2;
    std::size_t locality = 2;
    std::uint64_t seed = 0;
    std::uint64_t x = 0;
    std::uint64_t y = 0;
};

void cmd_schroedinger(Context& ctx, const SchroedingerArgs& a) {
    if (a.qubits == 0 || a.qubits > 20) throw std::invalid_argument("--qubits must lie in 1..20");
    if (a.locality == 0 || a.locality > a.qubits) throw std::invalid_argument("--locality must lie in 1..qubits");
    const std::uint64_t basis = std::uint64_t{1} << a.qubits;
    if (a.x >= basis || a.y >= basis) throw std::invalid_argument("basis labels must be below 2^qubits");
    std::mt19937_64 rng(a.seed);
    const auto circuit = random_circuit(a.qubits, a.gates, rng, a.locality);
    const auto plan = schroedinger_plan(circuit, a.x, a.y);
    const auto r = execute(plan.circuit.net, plan.tree);
    const auto amp = r.value.data()[0];
    ctx.doc["amplitude"] = Json::array({amp.real(), amp.imag()});
    ctx.doc["probability"] = std::norm(amp);
    ctx.doc["tree"] = format_tree(plan.circuit.net, plan.tree);
    ctx.doc["gate_node_congestion"] = plan.gate_node_congestion;
    ctx.doc["spine_edge_congestion"] = plan.spine_edge_congestion;
    ctx.doc["report"] = report_json(plan.report);
    ctx.doc["measured"] = stats_json(r.stats);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tensor network contraction planner and executor", "tnc"};
    app.require_subcommand(1);
    Context ctx{out, err, false, Json::object()};
    app.add_flag("--json", ctx.json, "Print one JSON document instead of key = value lines");

    PlanArgs plan;
    auto* plan_cmd = app.add_subcommand("plan", "Search for a contraction tree");
    plan_cmd->add_option("network", plan.network, "Network file")->required();
    plan_cmd->add_option("--objective", plan.objective, "total_time, vertcon, edgecon, parallel_time, peak_memory");
    plan_cmd->add_option("--method", plan.method, "brute, greedy or linear");
    plan_cmd->add_option("--seed", plan.seed, "Greedy tie-break seed");
    plan_cmd->add_option("--cap", plan.cap, "Leaf cap of the exhaustive search");
    plan_cmd->add_option("--threads", plan.threads, "Worker threads of the exhaustive search");
    plan_cmd->add_option("--out", plan.out_path, "Write the tree file here");

    CostArgs cost;
    auto* cost_cmd = app.add_subcommand("cost", "Cost report of a tree");
    cost_cmd->add_option("network", cost.network, "Network file")->required();
    cost_cmd->add_option("tree", cost.tree, "Tree file")->required();
    cost_cmd->add_option("--order", cost.order, "Order file (default: min peak memory)");

    ConvertArgs conv;
    auto* conv_cmd = app.add_subcommand("convert", "Convert between trees and decompositions of the line graph");
    conv_cmd->add_option("--from", conv.from, "tree, td or bd")->required();
    conv_cmd->add_option("--to", conv.to, "tree, td or bd")->required();
    conv_cmd->add_option("network", conv.network, "Network file")->required();
    conv_cmd->add_option("input", conv.input, "Input file")->required();
    conv_cmd->add_option("--out", conv.out_path, "Output file (default: stdout)");

    ContractArgs contract;
    auto* contract_cmd = app.add_subcommand("contract", "Contract a network with tensors");
    contract_cmd->add_option("network", contract.network, "Network file")->required();
    contract_cmd->add_option("tree", contract.tree, "Tree file (default: greedy plan)");
    contract_cmd->add_option("--order", contract.order, "Order file");
    contract_cmd->add_option("--sliced", contract.sliced, "Comma-separated edge ids to slice");
    contract_cmd->add_option("--parallel", contract.parallel, "Worker count");
    contract_cmd->add_flag("--oracle", contract.oracle, "Also run the naive oracle");

    ValidateArgs validate;
    auto* validate_cmd = app.add_subcommand("validate", "Check a network file and optionally a tree");
    validate_cmd->add_option("network", validate.network, "Network file")->required();
    validate_cmd->add_option("tree", validate.tree, "Tree file");

    RandomArgs random;
    auto* random_cmd = app.add_subcommand("random", "Generate a network");
    random_cmd->add_option("--kind", random.kind, "grid, ring, star or erdos");
    random_cmd->add_option("--n", random.n, "Size");
    random_cmd->add_option("--cols", random.cols, "Grid columns (default: n)");
    random_cmd->add_option("--dim", random.dim, "Bond dimension");
    random_cmd->add_option("--p", random.p, "Edge probability (erdos)");
    random_cmd->add_option("--seed", random.seed, "Seed");
    random_cmd->add_flag("--no-tensors", random.no_tensors, "Structure only");
    random_cmd->add_option("--out", random.out_path, "Output file (default: stdout)");

    SchroedingerArgs sch;
    auto* sch_cmd = app.add_subcommand("schroedinger", "Amplitude of a random circuit along the Schroedinger plan");
    sch_cmd->add_option("--qubits", sch.qubits, "Qubit count");
    sch_cmd->add_option("--gates", sch.gates, "Gate count");
    sch_cmd->add_option("--locality", sch.locality, "Largest gate locality");
    sch_cmd->add_option("--seed", sch.seed, "Seed");
    sch_cmd->add_option("--x", sch.x, "Output basis state");
    sch_cmd->add_option("--y", sch.y, "Input basis state");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        std::string command;
        if (plan_cmd->parsed()) cmd_plan(ctx, plan), command = "plan";
        else if (cost_cmd->parsed()) cmd_cost(ctx, cost), command = "cost";
        else if (conv_cmd->parsed()) cmd_convert(ctx, conv), command = "convert";
        else if (contract_cmd->parsed()) cmd_contract(ctx, contract), command = "contract";
        else if (validate_cmd->parsed()) cmd_validate(ctx, validate), command = "validate";
        else if (random_cmd->parsed()) cmd_random(ctx, random), command = "random";
        else cmd_schroedinger(ctx, sch), command = "schroedinger";
        if (ctx.json || !ctx.doc.empty()) ctx.finish(command);
        return kExitOk;
    } catch (const CapExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitCap;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace tnc
