#include "apf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "apf/errors.hpp"

namespace apf::metrics {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) throw ContractError("prediction/reference count mismatch: " + std::to_string(a) + " vs " +
                                    std::to_string(b));
}

std::vector<NodeId> sorted_nodes(const Path& p) {
    auto v = p.nodes;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::size_t node_symdiff(const Path& a, const Path& b) {
    const auto x = sorted_nodes(a);
    const auto y = sorted_nodes(b);
    std::vector<NodeId> out;
    std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    return out.size();
}

double directed_sq(const Path& from, const Path& to) {
    double total = 0.0;
    for (const NodeId x : from.nodes) {
        double best = std::numeric_limits<double>::infinity();
        for (const NodeId y : to.nodes) {
            const double dr = x.row - y.row;
            const double dc = x.col - y.col;
            best = std::min(best, dr * dr + dc * dc);
        }
        total += best;
    }
    return total;
}

}  // namespace

std::size_t PathMask::popcount() const noexcept {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

PathMask mask_of(const Path& path, int height, int width) {
    PathMask m{height, width, std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, 0)};
    for (const NodeId n : path.nodes) {
        if (n.row < 0 || n.col < 0 || n.row >= height || n.col >= width)
            throw ContractError("path node out of mask bounds");
        m.bits[static_cast<std::size_t>(n.row) * width + n.col] = 1;
    }
    return m;
}

std::size_t symdiff(const PathMask& a, const PathMask& b) {
    if (a.bits.size() != b.bits.size()) throw ContractError("mask shape mismatch");
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) n += (a.bits[i] != 0) != (b.bits[i] != 0);
    return n;
}

double psim_term(const Path& pred, const Path& ref) {
    if (ref.empty()) throw ContractError("empty reference path");
    const double ratio = static_cast<double>(node_symdiff(pred, ref)) / (2.0 * static_cast<double>(ref.size()));
    return 1.0 - std::min(ratio, 1.0);
}

ChamferValue chamfer_term(const Path& pred, const Path& ref) {
    if (pred.empty() || ref.empty()) throw ContractError("chamfer distance of an empty path");
    const double forward = directed_sq(pred, ref);
    const double backward = directed_sq(ref, pred);
    return {forward + backward,
            forward / static_cast<double>(pred.size()) + backward / static_cast<double>(ref.size())};
}

double spr(std::span<const Path> pred, std::span<const Path> ref) {
    require_same_length(pred.size(), ref.size());
    if (pred.empty()) throw ContractError("no instances");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i].size() <= ref[i].size();
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double psim(std::span<const Path> pred, std::span<const Path> ref) {
    require_same_length(pred.size(), ref.size());
    if (pred.empty()) throw ContractError("no instances");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) total += 1.0 - psim_term(pred[i], ref[i]);
    return 1.0 - total / static_cast<double>(pred.size());
}

ChamferValue chamfer(std::span<const Path> pred, std::span<const Path> ref) {
    require_same_length(pred.size(), ref.size());
    if (pred.empty()) throw ContractError("no instances");
    ChamferValue sum;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const auto v = chamfer_term(pred[i], ref[i]);
        sum.literal += v.literal;
        sum.normalized += v.normalized;
    }
    const auto k = static_cast<double>(pred.size());
    return {sum.literal / k, sum.normalized / k};
}

std::vector<NodeId> area_region(const Path& a, const Path& b) {
    if (a.empty() || b.empty() || a.front() != b.front() || a.back() != b.back())
        throw ContractError("area_between: paths must share source and target");
    std::vector<NodeId> poly = a.nodes;
    poly.insert(poly.end(), b.nodes.rbegin(), b.nodes.rend());

    int rmin = poly.front().row, rmax = rmin, cmin = poly.front().col, cmax = cmin;
    for (const NodeId n : poly) {
        rmin = std::min(rmin, n.row);
        rmax = std::max(rmax, n.row);
        cmin = std::min(cmin, n.col);
        cmax = std::max(cmax, n.col);
    }
    std::set<NodeId> on_path(a.nodes.begin(), a.nodes.end());
    on_path.insert(b.nodes.begin(), b.nodes.end());

    std::vector<NodeId> region;
    std::vector<double> crossings;
    for (int r = rmin + 1; r < rmax; ++r) {
        crossings.clear();
        for (std::size_t e = 0; e < poly.size(); ++e) {
            const NodeId p = poly[e];
            const NodeId q = poly[(e + 1) % poly.size()];
            if ((p.row > r) != (q.row > r))
                crossings.push_back(p.col + static_cast<double>(r - p.row) * (q.col - p.col) / (q.row - p.row));
        }
        std::sort(crossings.begin(), crossings.end());
        for (int c = cmin + 1; c < cmax; ++c) {
            const auto left = std::lower_bound(crossings.begin(), crossings.end(), static_cast<double>(c));
            const auto right_count = crossings.end() - left;
            // Even-odd: an odd number of edge crossings to the right means inside.
            if ((right_count & 1) && !on_path.count(NodeId{r, c})) region.push_back({r, c});
        }
    }
    return region;
}

std::size_t area_between(const Path& a, const Path& b) { return area_region(a, b).size(); }

std::vector<double> asim_terms(std::span<const Path* const> preds, const Path& ref) {
    std::vector<std::vector<NodeId>> regions;
    regions.reserve(preds.size());
    std::set<NodeId> all;
    for (const Path* p : preds) {
        regions.push_back(area_region(*p, ref));
        all.insert(regions.back().begin(), regions.back().end());
    }
    std::vector<double> scores;
    scores.reserve(preds.size());
    for (const auto& region : regions) {
        if (all.empty()) scores.push_back(1.0);
        else scores.push_back(1.0 - static_cast<double>(region.size()) / static_cast<double>(all.size()));
    }
    return scores;
}

std::vector<std::pair<std::string, double>> asim(const MethodPaths& preds, std::span<const Path> ref) {
    if (preds.empty()) throw ContractError("asim needs at least one method");
    for (const auto& [name, paths] : preds)
        if (paths.size() != ref.size()) throw ContractError("method '" + name + "' covers a different instance set");
    if (ref.empty()) throw ContractError("no instances");
    std::vector<double> totals(preds.size(), 0.0);
    std::vector<const Path*> column(preds.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        for (std::size_t j = 0; j < preds.size(); ++j) column[j] = &preds[j].second[i];
        const auto scores = asim_terms(column, ref[i]);
        for (std::size_t j = 0; j < preds.size(); ++j) totals[j] += scores[j];
    }
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t j = 0; j < preds.size(); ++j)
        out.emplace_back(preds[j].first, totals[j] / static_cast<double>(ref.size()));
    return out;
}

double hist(const SearchTrace& trace, const GridMap& map) {
    return static_cast<double>(trace.closed_count()) / static_cast<double>(map.cell_count());
}

double ep(const SearchTrace& trace, const SearchTrace& astar_trace) {
    const auto base = static_cast<double>(astar_trace.closed_count());
    if (base == 0.0) throw ContractError("reference A* trace has an empty closed list");
    const double mine = static_cast<double>(trace.closed_count());
    return std::max(base - mine, 0.0) / base;
}

double path_loss(const SearchTrace& trace, const Path& ref) {
    const PathMask visited{trace.height, trace.width, trace.visited_mask()};
    const PathMask target = mask_of(ref, trace.height, trace.width);
    return static_cast<double>(symdiff(visited, target));
}

MetricsReport summarize(std::vector<InstanceMetrics> rows) {
    MetricsReport report;
    report.aggregate.instance_id = "mean";
    if (!rows.empty()) {
        auto& a = report.aggregate;
        for (const auto& r : rows) {
            a.spr += r.spr;
            a.psim += r.psim;
            a.asim += r.asim;
            a.cd += r.cd;
            a.cd_normalized += r.cd_normalized;
            a.hist += r.hist;
            a.ep += r.ep;
            a.path_loss += r.path_loss;
        }
        const auto k = static_cast<double>(rows.size());
        a.spr /= k;
        a.psim /= k;
        a.asim /= k;
        a.cd /= k;
        a.cd_normalized /= k;
        a.hist /= k;
        a.ep /= k;
        a.path_loss /= k;
    }
    report.per_instance = std::move(rows);
    return report;
}

}  // namespace apf::metrics
