#include "apf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "apf/errors.hpp"

namespace apf {

double heuristic(NodeId node, NodeId target, double sigma) {
    const int dr = std::abs(node.row - target.row);
    const int dc = std::abs(node.col - target.col);
    return static_cast<double>(std::max(dr, dc)) + sigma * std::sqrt(static_cast<double>(dr * dr + dc * dc));
}

double euclidean(NodeId a, NodeId b) {
    const double dr = a.row - b.row;
    const double dc = a.col - b.col;
    return std::sqrt(dr * dr + dc * dc);
}

HeuristicField::HeuristicField(const GridMap& map, NodeId target, double sigma)
    : values_(map.cell_count()), sigma_(sigma) {
    if (!map.in_bounds(target)) throw ContractError("heuristic target out of bounds");
    if (!std::isfinite(sigma) || sigma < 0.0) throw ContractError("sigma must be finite and >= 0");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = heuristic(map.node(i), target, sigma);
}

void PafParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError("alpha must lie in [0,1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ContractError("lambda must lie in [0,1]");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw ContractError("kappa must be finite and >= 0");
}

std::optional<double> turn_angle(NodeId j, NodeId i, NodeId k) {
    const double ax = i.row - j.row;
    const double ay = i.col - j.col;
    const double bx = k.row - i.row;
    const double by = k.col - i.col;
    const double na = std::sqrt(ax * ax + ay * ay);
    const double nb = std::sqrt(bx * bx + by * by);
    if (na == 0.0 || nb == 0.0) return std::nullopt;
    const double cosine = std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
    return std::acos(cosine);
}

std::vector<NodeId> bresenham(NodeId a, NodeId b) {
    std::vector<NodeId> cells;
    const int dr = std::abs(b.row - a.row);
    const int dc = std::abs(b.col - a.col);
    const int sr = a.row < b.row ? 1 : -1;
    const int sc = a.col < b.col ? 1 : -1;
    cells.reserve(static_cast<std::size_t>(std::max(dr, dc)) + 1);
    int err = dc - dr;
    NodeId cur = a;
    while (true) {
        cells.push_back(cur);
        if (cur == b) break;
        const int e2 = 2 * err;
        if (e2 >= -dr) {
            err -= dr;
            cur.col += sc;
        }
        if (e2 <= dc) {
            err += dc;
            cur.row += sr;
        }
    }
    return cells;
}

SightLine line_of_sight(const GridMap& map, NodeId a, NodeId b) {
    if (!map.in_bounds(a) || !map.in_bounds(b)) throw ContractError("line_of_sight endpoint out of bounds");
    SightLine out;
    if (b < a) {
        out.cells = bresenham(b, a);
        std::reverse(out.cells.begin(), out.cells.end());
    } else {
        out.cells = bresenham(a, b);
    }
    out.clear = std::all_of(out.cells.begin(), out.cells.end(), [&](NodeId n) { return map.passable(n); });
    return out;
}

bool has_line_of_sight(const GridMap& map, NodeId a, NodeId b) {
    return line_of_sight(map, a, b).clear;
}

}  // namespace apf
