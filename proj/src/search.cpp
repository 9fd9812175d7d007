#include "apf/search.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

#include "apf/errors.hpp"
#include "apf/random.hpp"

namespace apf {

SearchTrace::SearchTrace(int h, int w)
    : height(h),
      width(w),
      closed(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0),
      parents(closed.size(), kNoParent),
      messages(closed.size(), kUnset),
      costs(closed.size(), kUnset),
      probabilities(closed.size(), 0.0) {}

std::optional<NodeId> SearchTrace::parent(NodeId n) const {
    const auto p = parents[index(n)];
    if (p == kNoParent) return std::nullopt;
    return node(static_cast<std::size_t>(p));
}

std::size_t SearchTrace::closed_count() const noexcept {
    return static_cast<std::size_t>(std::count(closed.begin(), closed.end(), std::uint8_t{1}));
}

std::vector<NodeId> SearchTrace::closed_nodes() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < closed.size(); ++i)
        if (closed[i]) out.push_back(node(i));
    return out;
}

std::vector<std::uint8_t> SearchTrace::visited_mask() const {
    auto mask = closed;
    if (reached_target) mask[*reached_target] = 1;
    return mask;
}

Path backtrack(const SearchTrace& trace, NodeId source, NodeId target) {
    Path path;
    NodeId cur = target;
    path.nodes.push_back(cur);
    const std::size_t limit = trace.cell_count();
    while (cur != source) {
        const auto p = trace.parent(cur);
        if (!p) throw InternalError("broken parent chain at (" + std::to_string(cur.row) + "," +
                                    std::to_string(cur.col) + ")");
        cur = *p;
        path.nodes.push_back(cur);
        if (path.nodes.size() > limit) throw InternalError("cyclic parent chain");
    }
    std::reverse(path.nodes.begin(), path.nodes.end());
    return path;
}

namespace {

using Entry = std::pair<double, std::size_t>;
using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

// Open set with O(1) insert/erase and stable iteration for softmax sums.
class OpenSet {
public:
    explicit OpenSet(std::size_t cells) : pos_(cells, kAbsent) {}

    [[nodiscard]] bool contains(std::size_t i) const noexcept { return pos_[i] != kAbsent; }
    [[nodiscard]] bool empty() const noexcept { return items_.empty(); }
    [[nodiscard]] const std::vector<std::size_t>& items() const noexcept { return items_; }

    void insert(std::size_t i) {
        if (contains(i)) return;
        pos_[i] = items_.size();
        items_.push_back(i);
    }
    void erase(std::size_t i) {
        const std::size_t at = pos_[i];
        if (at == kAbsent) return;
        const std::size_t last = items_.back();
        items_[at] = last;
        pos_[last] = at;
        items_.pop_back();
        pos_[i] = kAbsent;
    }
    [[nodiscard]] std::vector<std::size_t> sorted() const {
        auto out = items_;
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    std::vector<std::size_t> items_;
    std::vector<std::size_t> pos_;
};

void require_finite(double c, const GridMap& map, std::size_t k) {
    if (!std::isfinite(c)) {
        const NodeId n = map.node(k);
        throw DataError("non-finite cost at (" + std::to_string(n.row) + "," + std::to_string(n.col) + ")");
    }
}

// Strategy for picking the next node of the angular search.
struct ArgminSelector {
    bool record;
};

struct TopKSelector {
    std::size_t k;
    Rng rng;
};

template <typename Selector>
SearchOutcome angular_search(const ProblemInstance& instance, const PafParams& params, double sigma,
                             Selector selector, const MessageObserver& observer) {
    validate_instance(instance);
    params.validate();
    const GridMap& map = instance.map;
    const HeuristicField field(map, instance.target, sigma);
    const std::size_t s = map.index(instance.source);
    const std::size_t t = map.index(instance.target);
    const double theta_s = map.cost(s);

    SearchOutcome out;
    SearchTrace& tr = out.trace;
    tr = SearchTrace(map.height(), map.width());
    OpenSet open(map.cell_count());
    MinHeap heap;

    auto& m = tr.messages;
    auto& c = tr.costs;
    m[s] = 0.0;
    c[s] = params.lambda * (map.cost(s) + field[s]);
    open.insert(s);

    std::size_t i = s;
    std::vector<std::size_t> nbrs;
    nbrs.reserve(8);
    bool reached = false;
    tr.probabilities[s] = 1.0;

    while (true) {
        neighbor_indices(map, i, nbrs);
        tr.closed[i] = 1;
        tr.expansion_order.push_back(i);
        ++tr.expansions;
        open.erase(i);
        for (std::size_t k : nbrs)
            if (!tr.closed[k]) open.insert(k);

        const NodeId ni = map.node(i);
        const std::int64_t pi = tr.parents[i];
        for (std::size_t k : nbrs) {
            if (tr.closed[k]) continue;
            const NodeId nk = map.node(k);
            double candidate;
            if (adjacent8(nk, instance.source)) {
                candidate = theta_s;
            } else {
                double h = 0.0;
                if (pi != kNoParent) {
                    if (const auto angle = turn_angle(map.node(static_cast<std::size_t>(pi)), ni, nk))
                        h = paf(*angle, params.alpha);
                }
                candidate = map.cost(i) + m[i] + params.kappa * h;
            }
            if (candidate < m[k]) {
                if (observer) observer(nk, m[k], candidate);
                m[k] = candidate;
                tr.parents[k] = static_cast<std::int64_t>(i);
            }
            const double ck = params.lambda * (map.cost(k) + field[k]) + (1.0 - params.lambda) * m[k];
            require_finite(ck, map, k);
            if (ck != c[k]) {
                c[k] = ck;
                if constexpr (std::is_same_v<Selector, ArgminSelector>) heap.emplace(ck, k);
            }
            if (k == t) {
                reached = true;
                break;
            }
        }
        if (reached || open.empty()) break;

        if constexpr (std::is_same_v<Selector, ArgminSelector>) {
            while (tr.closed[heap.top().second] || heap.top().first != c[heap.top().second]) heap.pop();
            const std::size_t next = heap.top().second;
            heap.pop();
            if (selector.record) {
                const double cmin = c[next];
                double z = 0.0;
                for (std::size_t o : open.items()) z += std::exp(-(c[o] - cmin));
                tr.probabilities[next] = 1.0 / z;
            }
            i = next;
        } else {
            // k cheapest open nodes by (cost, flat index).
            const auto& items = open.items();
            std::vector<Entry> top;
            top.reserve(selector.k + 1);
            for (std::size_t o : items) {
                const Entry e{c[o], o};
                if (top.size() < selector.k) {
                    top.insert(std::upper_bound(top.begin(), top.end(), e), e);
                } else if (e < top.back()) {
                    top.pop_back();
                    top.insert(std::upper_bound(top.begin(), top.end(), e), e);
                }
            }
            const double cmin = top.front().first;
            std::vector<double> weights(top.size());
            double z = 0.0;
            for (std::size_t j = 0; j < top.size(); ++j) {
                weights[j] = std::exp(-(top[j].first - cmin));
                z += weights[j];
            }
            std::size_t pick = 0;
            if (top.size() > 1) {
                const double u = unit_double(selector.rng) * z;
                double acc = 0.0;
                pick = top.size() - 1;
                for (std::size_t j = 0; j < top.size(); ++j) {
                    acc += weights[j];
                    if (u < acc) {
                        pick = j;
                        break;
                    }
                }
            }
            i = top[pick].second;
            tr.probabilities[i] = weights[pick] / z;
        }
    }

    tr.open_final = open.sorted();
    if (reached) {
        out.terminated_by = Termination::target_reached;
        tr.reached_target = t;
        out.path = backtrack(tr, instance.source, instance.target);
    }
    return out;
}

// Shared driver for the g/f engines (A*, Dijkstra, Theta*).
// `relax(trace, i, k)` returns the candidate g-value of k and its parent.
template <typename Relax>
SearchOutcome best_first(const GridMap& map, NodeId source, NodeId target, const std::vector<double>& h,
                         Relax&& relax, bool allow_reopen) {
    const std::size_t s = map.index(source);
    const std::size_t t = map.index(target);
    SearchOutcome out;
    SearchTrace& tr = out.trace;
    tr = SearchTrace(map.height(), map.width());
    auto& g = tr.messages;
    auto& f = tr.costs;
    std::vector<std::uint8_t> in_open(map.cell_count(), 0);
    MinHeap heap;
    g[s] = 0.0;
    f[s] = h[s];
    heap.emplace(f[s], s);
    in_open[s] = 1;
    std::vector<std::size_t> nbrs;
    nbrs.reserve(8);
    bool reached = false;

    while (!heap.empty()) {
        const auto [fi, i] = heap.top();
        heap.pop();
        if (!in_open[i] || fi != f[i]) continue;
        in_open[i] = 0;
        tr.closed[i] = 1;
        tr.expansion_order.push_back(i);
        ++tr.expansions;
        if (i == t) {
            reached = true;
            break;
        }
        neighbor_indices(map, i, nbrs);
        for (std::size_t k : nbrs) {
            if (tr.closed[k] && !allow_reopen) continue;
            const auto [candidate, parent] = relax(tr, i, k);
            if (candidate < g[k]) {
                if (tr.closed[k]) {
                    tr.closed[k] = 0;
                    ++tr.reopenings;
                }
                g[k] = candidate;
                f[k] = candidate + h[k];
                require_finite(f[k], map, k);
                tr.parents[k] = static_cast<std::int64_t>(parent);
                heap.emplace(f[k], k);
                in_open[k] = 1;
            }
        }
    }
    for (std::size_t k = 0; k < in_open.size(); ++k)
        if (in_open[k]) tr.open_final.push_back(k);
    if (reached) {
        out.terminated_by = Termination::target_reached;
        tr.reached_target = t;
        out.path = backtrack(tr, source, target);
    }
    return out;
}

using Relaxed = std::pair<double, std::size_t>;

}  // namespace

SearchOutcome daa_star(const ProblemInstance& instance, const PafParams& params, double sigma,
                       const SearchOptions& options) {
    return angular_search(instance, params, sigma, ArgminSelector{options.record_probabilities},
                          options.on_message);
}

SearchOutcome random_walk_search(const ProblemInstance& instance, const PafParams& params, double sigma, int k,
                                 std::uint64_t seed) {
    if (k < 1) throw ContractError("random walk top-k must be >= 1");
    PafParams flat = params;
    flat.kappa = 0.0;
    return angular_search(instance, flat, sigma, TopKSelector{static_cast<std::size_t>(k), Rng(seed)}, {});
}

SearchOutcome classic_astar(const ProblemInstance& instance, double sigma) {
    validate_instance(instance);
    const GridMap& map = instance.map;
    const HeuristicField field(map, instance.target, sigma);
    return best_first(
        map, instance.source, instance.target, field.values(),
        [](const SearchTrace& tr, std::size_t i, std::size_t) { return Relaxed{tr.messages[i] + 1.0, i}; }, true);
}

SearchOutcome dijkstra(const ProblemInstance& instance) {
    validate_instance(instance);
    const GridMap& map = instance.map;
    const std::vector<double> zero(map.cell_count(), 0.0);
    return best_first(
        map, instance.source, instance.target, zero,
        [&map](const SearchTrace& tr, std::size_t i, std::size_t k) {
            return Relaxed{tr.messages[i] + map.cost(k), i};
        },
        false);
}

ThetaStarOutcome theta_star(const ProblemInstance& instance, double sigma) {
    validate_instance(instance);
    const GridMap& map = instance.map;
    const HeuristicField field(map, instance.target, sigma);
    auto relax = [&map](const SearchTrace& tr, std::size_t i, std::size_t k) {
        const NodeId nk = map.node(k);
        const std::int64_t pi = tr.parents[i];
        if (pi != kNoParent) {
            const auto p = static_cast<std::size_t>(pi);
            if (has_line_of_sight(map, map.node(p), nk)) return Relaxed{tr.messages[p] + euclidean(map.node(p), nk), p};
        }
        return Relaxed{tr.messages[i] + euclidean(map.node(i), nk), i};
    };
    ThetaStarOutcome result;
    result.outcome = best_first(map, instance.source, instance.target, field.values(), relax, false);
    if (!result.outcome.path) return result;

    result.waypoints = *result.outcome.path;
    const auto& wp = result.waypoints.nodes;
    Path raster;
    raster.nodes.push_back(wp.front());
    for (std::size_t j = 1; j < wp.size(); ++j) {
        result.length += euclidean(wp[j - 1], wp[j]);
        const auto segment = line_of_sight(map, wp[j - 1], wp[j]);
        raster.nodes.insert(raster.nodes.end(), segment.cells.begin() + 1, segment.cells.end());
    }
    // Consecutive segments can overlap behind a sharp joint; splice out the loop.
    std::vector<std::int64_t> seen(map.cell_count(), -1);
    Path simple;
    for (const NodeId n : raster.nodes) {
        const std::size_t flat = map.index(n);
        if (seen[flat] >= 0) {
            const auto keep = static_cast<std::size_t>(seen[flat]) + 1;
            for (std::size_t q = keep; q < simple.nodes.size(); ++q) seen[map.index(simple.nodes[q])] = -1;
            simple.nodes.resize(keep);
            continue;
        }
        seen[flat] = static_cast<std::int64_t>(simple.nodes.size());
        simple.nodes.push_back(n);
    }
    result.outcome.path = std::move(simple);
    return result;
}

SearchOutcome focal_search(const GridMap& ppm, NodeId source, NodeId target, double w, double sigma) {
    if (!(w >= 1.0) || !std::isfinite(w)) throw ContractError("focal weight must be finite and >= 1");
    validate_instance(ProblemInstance{ppm, source, target, std::nullopt});
    for (std::size_t i = 0; i < ppm.cell_count(); ++i) {
        if (!ppm.passable(i)) continue;
        const double p = ppm.cost(i);
        if (!(p >= 0.0 && p <= 1.0)) {
            const NodeId n = ppm.node(i);
            throw DataError("probability outside [0,1] at (" + std::to_string(n.row) + "," + std::to_string(n.col) +
                            ")");
        }
    }
    const HeuristicField field(ppm, target, sigma);
    const std::size_t s = ppm.index(source);
    const std::size_t t = ppm.index(target);

    SearchOutcome out;
    SearchTrace& tr = out.trace;
    tr = SearchTrace(ppm.height(), ppm.width());
    auto& g = tr.messages;
    auto& f = tr.costs;
    OpenSet open(ppm.cell_count());
    g[s] = 0.0;
    f[s] = field[s];
    open.insert(s);
    std::vector<std::size_t> nbrs;
    nbrs.reserve(8);
    bool reached = false;

    while (!open.empty()) {
        double fmin = kUnset;
        for (std::size_t o : open.items()) fmin = std::min(fmin, f[o]);
        const double bound = w * fmin;
        std::size_t best = 0;
        bool have = false;
        for (std::size_t o : open.items()) {
            if (f[o] > bound) continue;
            if (!have) {
                best = o;
                have = true;
                continue;
            }
            // Highest probability, then lowest f, then lowest flat index.
            const auto key = [&](std::size_t n) { return std::tuple{-ppm.cost(n), f[n], n}; };
            if (key(o) < key(best)) best = o;
        }
        const std::size_t i = best;
        open.erase(i);
        tr.closed[i] = 1;
        tr.expansion_order.push_back(i);
        ++tr.expansions;
        if (i == t) {
            reached = true;
            break;
        }
        neighbor_indices(ppm, i, nbrs);
        for (std::size_t k : nbrs) {
            const double candidate = g[i] + 1.0;
            if (candidate < g[k]) {
                if (tr.closed[k]) {
                    tr.closed[k] = 0;
                    ++tr.reopenings;
                }
                g[k] = candidate;
                f[k] = candidate + field[k];
                tr.parents[k] = static_cast<std::int64_t>(i);
                open.insert(k);
            }
        }
    }
    tr.open_final = open.sorted();
    if (reached) {
        out.terminated_by = Termination::target_reached;
        tr.reached_target = t;
        out.path = backtrack(tr, source, target);
    }
    return out;
}

}  // namespace apf
