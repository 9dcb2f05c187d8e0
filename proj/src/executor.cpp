#include "tnc/executor.hpp"

#include <algorithm>
#include <condition_variable>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <thread>

#include "tnc/cost_model.hpp"
#include "tnc/errors.hpp"

namespace tnc {

// ----------------------------------------------------------------- tracker

void MemoryTracker::allocate(std::uint64_t key, ExactCost entries) {
    std::lock_guard lock(mu_);
    if (!blocks_.emplace(key, entries).second) throw std::logic_error("tracker: block allocated twice");
    live_ += entries;
    peak_ = std::max(peak_, live_);
    peak_transient_ = std::max(peak_transient_, live_);
}

void MemoryTracker::release(std::uint64_t key) {
    std::lock_guard lock(mu_);
    auto it = blocks_.find(key);
    if (it == blocks_.end()) throw std::logic_error("tracker: releasing an unknown block");
    live_ = live_ - it->second;
    blocks_.erase(it);
}

void MemoryTracker::transient(ExactCost entries) {
    std::lock_guard lock(mu_);
    peak_transient_ = std::max(peak_transient_, live_ + entries);
}

ExactCost MemoryTracker::live() const {
    std::lock_guard lock(mu_);
    return live_;
}

ExactCost MemoryTracker::peak() const {
    std::lock_guard lock(mu_);
    return peak_;
}

ExactCost MemoryTracker::peak_with_transients() const {
    std::lock_guard lock(mu_);
    return peak_transient_;
}

// ------------------------------------------------------------ pairwise step

DenseTensor contract_pair(const DenseTensor& a, const DenseTensor& b, std::span<const EdgeId> keep, PairStats* stats) {
    std::vector<std::size_t> batch_a, free_a, sum_a, batch_b, sum_b, free_b;
    for (std::size_t i = 0; i < a.rank(); ++i) {
        const auto label = a.axes()[i];
        const auto j = b.axis_position(label);
        if (j == b.rank()) {
            free_a.push_back(i);
            continue;
        }
        if (a.extents()[i] != b.extents()[j])
            throw std::invalid_argument("contract_pair: extent mismatch on axis " + std::to_string(index(label)));
        if (std::find(keep.begin(), keep.end(), label) != keep.end()) {
            batch_a.push_back(i);
            batch_b.push_back(j);
        } else {
            sum_a.push_back(i);
            sum_b.push_back(j);
        }
    }
    for (std::size_t j = 0; j < b.rank(); ++j)
        if (!a.has_axis(b.axes()[j])) free_b.push_back(j);

    auto extent_of = [](const DenseTensor& t, const std::vector<std::size_t>& pos) {
        std::size_t n = 1;
        for (auto p : pos) n *= t.extents()[p];
        return n;
    };
    const std::size_t nb = extent_of(a, batch_a), nl = extent_of(a, free_a), nm = extent_of(a, sum_a),
                      nr = extent_of(b, free_b);

    std::vector<std::size_t> perm_a(batch_a);
    perm_a.insert(perm_a.end(), free_a.begin(), free_a.end());
    perm_a.insert(perm_a.end(), sum_a.begin(), sum_a.end());
    std::vector<std::size_t> perm_b(batch_b);
    perm_b.insert(perm_b.end(), sum_b.begin(), sum_b.end());
    perm_b.insert(perm_b.end(), free_b.begin(), free_b.end());
    auto is_identity = [](const std::vector<std::size_t>& p) {
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] != i) return false;
        return true;
    };
    const auto pa = a.permuted(perm_a);
    const auto pb = b.permuted(perm_b);

    std::vector<EdgeId> axes;
    std::vector<std::uint64_t> ext;
    for (auto p : batch_a) {
        axes.push_back(a.axes()[p]);
        ext.push_back(a.extents()[p]);
    }
    for (auto p : free_a) {
        axes.push_back(a.axes()[p]);
        ext.push_back(a.extents()[p]);
    }
    for (auto p : free_b) {
        axes.push_back(b.axes()[p]);
        ext.push_back(b.extents()[p]);
    }
    std::vector<Scalar> out(nb * nl * nr, Scalar{0.0, 0.0});
    const auto da = pa.data();
    const auto db = pb.data();
    for (std::size_t t = 0; t < nb; ++t) {
        const Scalar* A = da.data() + t * nl * nm;
        const Scalar* B = db.data() + t * nm * nr;
        Scalar* C = out.data() + t * nl * nr;
        for (std::size_t i = 0; i < nl; ++i)
            for (std::size_t k = 0; k < nm; ++k) {
                const Scalar aik = A[i * nm + k];
                const Scalar* brow = B + k * nr;
                Scalar* crow = C + i * nr;
                for (std::size_t j = 0; j < nr; ++j) crow[j] += aik * brow[j];
            }
    }
    if (stats) {
        stats->multiply_adds = ExactCost(nb) * ExactCost(nl) * ExactCost(nm) * ExactCost(nr);
        stats->transient_entries = ExactCost(0);
        if (!is_identity(perm_a)) stats->transient_entries += ExactCost(a.size());
        if (!is_identity(perm_b)) stats->transient_entries += ExactCost(b.size());
    }
    return DenseTensor(std::move(axes), std::move(ext), std::move(out));
}

// ---------------------------------------------------------------- execute

namespace {

void check_inputs(const Network& net, const ContractionTree& tree) {
    if (!tree.is_rooted()) throw std::invalid_argument("execution needs a rooted contraction tree");
    check_tree_matches(net, tree);
    for (std::size_t v = 0; v < net.vertex_count(); ++v) {
        const auto id = make_id<VertexId>(v);
        if (net.environment() == id) continue;
        if (!net.tensor(id)) throw std::invalid_argument("vertex '" + net.name(id) + "' has no tensor");
    }
}

/// Shared labels that must survive the contraction at t: hyperedges with an
/// endpoint outside t's subtree.
std::vector<EdgeId> batch_labels(const Network& net, const ContractionTree& tree, NodeId t, const DenseTensor& a,
                                 const DenseTensor& b) {
    const auto& below = tree.subtree_vertices(t);
    std::vector<EdgeId> keep;
    for (auto label : a.axes()) {
        if (!b.has_axis(label)) continue;
        for (auto v : net.edge(label).endpoints)
            if (!std::binary_search(below.begin(), below.end(), v)) {
                keep.push_back(label);
                break;
            }
    }
    return keep;
}

/// Internal node contraction shared by the sequential and parallel runners.
DenseTensor contract_node(const Network& net, const ContractionTree& tree, NodeId t, const DenseTensor& a,
                          const DenseTensor& b, PairStats& ps) {
    const auto keep = batch_labels(net, tree, t, a, b);
    return contract_pair(a, b, keep, &ps);
}

NodeId top_node(const ContractionTree& tree) { return tree.neighbors(*tree.root()).front().node; }

}  // namespace

ExecutionResult execute(const Network& net, const ContractionTree& tree, std::optional<std::span<const NodeId>> schedule) {
    check_inputs(net, tree);
    ExecutionResult res;
    if (schedule) {
        res.schedule.assign(schedule->begin(), schedule->end());
    } else {
        res.schedule = min_peak_memory_order(net, tree).schedule;
    }
    check_schedule(tree, res.schedule);

    MemoryTracker tracker;
    std::vector<std::optional<DenseTensor>> held(tree.node_count());
    auto load = [&](NodeId c) -> const DenseTensor& {
        if (!held[index(c)]) {
            if (!tree.is_leaf(c)) throw std::logic_error("intermediate tensor missing");
            held[index(c)] = *net.tensor(*tree.label_of(c));
            tracker.allocate(index(c), ExactCost(held[index(c)]->size()));
            res.stats.entries_read += ExactCost(held[index(c)]->size());
        }
        return *held[index(c)];
    };

    if (res.schedule.empty()) {
        const auto leaf = top_node(tree);
        res.value = load(leaf).canonical();
    } else {
        for (auto t : res.schedule) {
            const auto ch = tree.children(t);
            const auto& a = load(ch[0]);
            const auto& b = load(ch[1]);
            PairStats ps;
            auto out = contract_node(net, tree, t, a, b, ps);
            tracker.allocate(index(t), ExactCost(out.size()));
            tracker.transient(ps.transient_entries);
            res.stats.steps.push_back({t, ps.multiply_adds, tracker.live()});
            res.stats.multiply_adds += ps.multiply_adds;
            for (auto c : ch) {
                tracker.release(index(c));
                held[index(c)].reset();
            }
            held[index(t)] = std::move(out);
        }
        res.value = held[index(top_node(tree))]->canonical();
        res.stats.output_entries = ExactCost(res.value.size());
    }
    res.stats.peak_memory = tracker.peak();
    res.stats.peak_memory_with_transients = tracker.peak_with_transients();
    return res;
}

ExecutionResult execute(const Network& net, const ContractionTree& tree, const ContractionOrder& order) {
    check_inputs(net, tree);
    const auto schedule = schedule_from_order(tree, order);
    return execute(net, tree, std::span<const NodeId>(schedule));
}

// ---------------------------------------------------------------- parallel

namespace {

/// Replays task durations: unlimited workers when workers == 0, otherwise
/// list scheduling by longest remaining path (ties: smaller node id).
ExactCost simulate(const ContractionTree& tree, const std::vector<ExactCost>& duration, unsigned workers) {
    const std::size_t n = tree.node_count();
    // longest path from a node to the end of the root task
    std::vector<ExactCost> tail(n);
    {
        std::vector<NodeId> top_down(tree.post_order().rbegin(), tree.post_order().rend());
        for (auto x : top_down) {
            const auto p = tree.parent(x);
            tail[index(x)] = duration[index(x)] + (p ? tail[index(*p)] : ExactCost(0));
        }
    }
    std::vector<std::size_t> waiting(n, 0);
    for (std::size_t x = 0; x < n; ++x) waiting[x] = tree.children(make_id<NodeId>(x)).size();
    auto prio = [&](NodeId a, NodeId b) {
        if (tail[index(a)] != tail[index(b)]) return tail[index(a)] < tail[index(b)];
        return index(a) > index(b);
    };
    std::priority_queue<NodeId, std::vector<NodeId>, decltype(prio)> ready(prio);
    for (std::size_t x = 0; x < n; ++x)
        if (waiting[x] == 0) ready.push(make_id<NodeId>(x));
    using Running = std::pair<ExactCost, NodeId>;  // finish time, node
    auto later = [](const Running& a, const Running& b) {
        if (a.first != b.first) return a.first > b.first;
        return index(a.second) > index(b.second);
    };
    std::priority_queue<Running, std::vector<Running>, decltype(later)> running(later);
    ExactCost now(0), makespan(0);
    std::size_t done = 0;
    while (done < n) {
        while (!ready.empty() && (workers == 0 || running.size() < workers)) {
            const auto x = ready.top();
            ready.pop();
            running.emplace(now + duration[index(x)], x);
        }
        const auto [finish, x] = running.top();
        running.pop();
        now = finish;
        makespan = std::max(makespan, finish);
        ++done;
        if (const auto p = tree.parent(x))
            if (--waiting[index(*p)] == 0) ready.push(*p);
    }
    return makespan;
}

}  // namespace

ParallelResult execute_parallel(const Network& net, const ContractionTree& tree, unsigned workers) {
    check_inputs(net, tree);
    if (workers == 0) throw std::invalid_argument("execute_parallel needs at least one worker");
    const std::size_t n = tree.node_count();
    const auto root = *tree.root();
    std::vector<std::optional<DenseTensor>> held(n);
    std::vector<ExactCost> duration(n, ExactCost(0));
    std::vector<std::size_t> waiting(n, 0);
    MemoryTracker tracker;

    std::mutex mu;
    std::condition_variable cv;
    std::queue<NodeId> queue;
    std::size_t remaining = 0;
    std::exception_ptr failure;
    for (std::size_t x = 0; x < n; ++x) {
        const auto id = make_id<NodeId>(x);
        if (id == root) continue;
        waiting[x] = tree.children(id).size();
        ++remaining;
        if (waiting[x] == 0) queue.push(id);
    }

    auto run_task = [&](NodeId x) {
        if (tree.is_leaf(x)) {
            DenseTensor t = *net.tensor(*tree.label_of(x));
            tracker.allocate(index(x), ExactCost(t.size()));
            duration[index(x)] = ExactCost(t.size());
            held[index(x)] = std::move(t);
            return;
        }
        const auto ch = tree.children(x);
        PairStats ps;
        auto out = contract_node(net, tree, x, *held[index(ch[0])], *held[index(ch[1])], ps);
        tracker.allocate(index(x), ExactCost(out.size()));
        tracker.transient(ps.transient_entries);
        duration[index(x)] = ps.multiply_adds;
        for (auto c : ch) {
            tracker.release(index(c));
            held[index(c)].reset();
        }
        held[index(x)] = std::move(out);
    };

    auto worker = [&]() {
        for (;;) {
            NodeId x;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return !queue.empty() || remaining == 0 || failure; });
                if (remaining == 0 || failure) return;
                x = queue.front();
                queue.pop();
            }
            try {
                run_task(x);
            } catch (...) {
                std::lock_guard lock(mu);
                failure = std::current_exception();
                cv.notify_all();
                return;
            }
            {
                std::lock_guard lock(mu);
                --remaining;
                const auto p = *tree.parent(x);
                if (p != root && --waiting[index(p)] == 0) queue.push(p);
                cv.notify_all();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    ParallelResult r;
    const auto top = top_node(tree);
    r.value = held[index(top)]->canonical();
    duration[index(root)] = tree.internal_nodes().empty() ? ExactCost(0) : ExactCost(r.value.size());
    r.workers = workers;
    r.makespan_unlimited = simulate(tree, duration, 0);
    r.makespan = simulate(tree, duration, workers);
    r.measured_total = std::accumulate(duration.begin(), duration.end(), ExactCost(0));
    return r;
}

// ------------------------------------------------------------------ sliced

SlicedResult execute_sliced(const Network& net, const SlicePlan& plan, const ContractionTree& inner_tree) {
    for (std::size_t v = 0; v < net.vertex_count(); ++v) {
        const auto id = make_id<VertexId>(v);
        if (net.environment() != id && !net.tensor(id)) throw std::invalid_argument("vertex '" + net.name(id) + "' has no tensor");
    }
    const auto schedule = min_peak_memory_order(plan.reduced, inner_tree).schedule;
    SlicedResult r;
    r.assignments = plan.assignments;
    bool first = true;
    plan.for_each_assignment([&](std::span<const std::uint64_t> idx) {
        Network slice = plan.reduced;
        for (std::size_t v = 0; v < net.vertex_count(); ++v) {
            const auto id = make_id<VertexId>(v);
            const auto* t = net.tensor(id);
            if (!t) continue;
            DenseTensor s = *t;
            for (std::size_t j = 0; j < plan.cut_edges.size(); ++j)
                if (s.has_axis(plan.cut_edges[j])) s = s.sliced(plan.cut_edges[j], idx[j]);
            slice.set_tensor(id, std::move(s));
        }
        auto res = execute(slice, inner_tree, std::span<const NodeId>(schedule));
        if (first) {
            r.value = std::move(res.value);
            first = false;
        } else {
            auto acc = r.value.mutable_data();
            const auto add = res.value.data();
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += add[i];
        }
        r.multiply_adds += res.stats.multiply_adds;
        r.per_slice = std::move(res.stats);
    });
    return r;
}

// ------------------------------------------------------------------ oracle

DenseTensor naive_oracle(const Network& net) {
    const auto edges = net.edges();
    const auto env = net.environment();
    std::uint64_t space = 1;
    for (const auto& e : edges) {
        if (space > kNaiveOracleCap / e.dim)
            throw CapExceeded("naive oracle: index space exceeds " + std::to_string(kNaiveOracleCap));
        space *= e.dim;
    }
    std::vector<std::size_t> out_pos;  // positions in edges() of output axes
    std::vector<EdgeId> out_axes;
    std::vector<std::uint64_t> out_ext;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].is_open_leg() || (env && edges[i].touches(*env))) {
            out_pos.push_back(i);
            out_axes.push_back(edges[i].id);
            out_ext.push_back(edges[i].dim);
        }
    }
    struct Factor {
        const DenseTensor* t;
        std::vector<std::size_t> pos;     // edge position per axis
        std::vector<std::size_t> stride;  // row-major stride per axis
    };
    std::vector<Factor> factors;
    for (std::size_t v = 0; v < net.vertex_count(); ++v) {
        const auto id = make_id<VertexId>(v);
        if (env == id) continue;
        const auto* t = net.tensor(id);
        if (!t) throw std::invalid_argument("vertex '" + net.name(id) + "' has no tensor");
        Factor f{t, {}, std::vector<std::size_t>(t->rank(), 1)};
        for (auto label : t->axes()) f.pos.push_back(net.edge_position(label));
        for (std::size_t k = t->rank(); k-- > 1;) f.stride[k - 1] = f.stride[k] * t->extents()[k];
        factors.push_back(std::move(f));
    }
    auto result = DenseTensor::zeros(out_axes, out_ext);
    auto acc = result.mutable_data();
    std::vector<std::uint64_t> idx(edges.size(), 0);
    for (std::uint64_t it = 0; it < space; ++it) {
        Scalar prod{1.0, 0.0};
        for (const auto& f : factors) {
            std::size_t flat = 0;
            for (std::size_t k = 0; k < f.pos.size(); ++k) flat += idx[f.pos[k]] * f.stride[k];
            prod *= f.t->data()[flat];
        }
        std::size_t o = 0;
        for (std::size_t k = 0; k < out_pos.size(); ++k) o = o * out_ext[k] + idx[out_pos[k]];
        acc[o] += prod;
        for (std::size_t k = edges.size(); k-- > 0;) {
            if (++idx[k] < edges[k].dim) break;
            idx[k] = 0;
        }
    }
    return result;
}

namespace {

bool same_shape(const DenseTensor& a, const DenseTensor& b) {
    return std::equal(a.axes().begin(), a.axes().end(), b.axes().begin(), b.axes().end()) &&
           std::equal(a.extents().begin(), a.extents().end(), b.extents().begin(), b.extents().end());
}

}  // namespace

double relative_error(const DenseTensor& a, const DenseTensor& b) {
    if (!same_shape(a, b)) return std::numeric_limits<double>::infinity();
    double diff = 0, scale = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a.data()[i] - b.data()[i]));
        scale = std::max(scale, std::abs(b.data()[i]));
    }
    if (scale == 0) return diff == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / scale;
}

bool approx_equal(const DenseTensor& a, const DenseTensor& b, double rel_tol, double abs_tol) {
    if (!same_shape(a, b)) return false;
    double diff = 0, scale = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a.data()[i] - b.data()[i]));
        scale = std::max(scale, std::abs(b.data()[i]));
    }
    return diff <= abs_tol + rel_tol * scale;
}

}  // namespace tnc
