#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "apf/geometry.hpp"
#include "apf/gridmap.hpp"

namespace apf {

inline constexpr std::int64_t kNoParent = -1;
inline constexpr double kUnset = std::numeric_limits<double>::infinity();

/// Mutable state of one search run, stored densely over the map's cells.
///
/// For the angular engines `messages` holds m_k and `costs` the blended
/// selection key c_k; the classic engines store their g-value in `messages`
/// and f-value in `costs`. `probabilities` is only filled by the angular
/// engines (the softmax weight of each node at the step it was selected,
/// zero elsewhere).
struct SearchTrace {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> closed;
    std::vector<std::size_t> expansion_order;  // one entry per selection
    std::vector<std::size_t> open_final;
    std::vector<std::int64_t> parents;
    std::vector<double> messages;
    std::vector<double> costs;
    std::vector<double> probabilities;
    std::size_t expansions = 0;
    std::size_t reopenings = 0;
    /// Set when the run stopped at the target; the target counts as visited
    /// even for engines that exit on generation without closing it.
    std::optional<std::size_t> reached_target;

    SearchTrace() = default;
    SearchTrace(int h, int w);

    [[nodiscard]] std::size_t cell_count() const noexcept { return closed.size(); }
    [[nodiscard]] std::size_t index(NodeId n) const noexcept {
        return static_cast<std::size_t>(n.row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(n.col);
    }
    [[nodiscard]] NodeId node(std::size_t flat) const noexcept {
        return {static_cast<int>(flat / static_cast<std::size_t>(width)),
                static_cast<int>(flat % static_cast<std::size_t>(width))};
    }
    [[nodiscard]] bool is_closed(NodeId n) const noexcept { return closed[index(n)] != 0; }
    [[nodiscard]] std::optional<NodeId> parent(NodeId n) const;
    [[nodiscard]] std::size_t closed_count() const noexcept;
    [[nodiscard]] std::vector<NodeId> closed_nodes() const;
    /// Closed cells plus the reached target.
    [[nodiscard]] std::vector<std::uint8_t> visited_mask() const;
};

enum class Termination { target_reached, open_exhausted };

struct SearchOutcome {
    std::optional<Path> path;
    SearchTrace trace;
    Termination terminated_by = Termination::open_exhausted;
};

/// Called for every strict message decrease: (node, old value, new value).
using MessageObserver = std::function<void(NodeId, double, double)>;

struct SearchOptions {
    bool record_probabilities = true;
    MessageObserver on_message;
};

/// Angular A*: message passing with PAF turn penalties, blended cost
/// selection and exit as soon as the target is generated.
[[nodiscard]] SearchOutcome daa_star(const ProblemInstance& instance, const PafParams& params,
                                     double sigma = kDefaultSigma, const SearchOptions& options = {});

/// Angular search with kappa = 0 whose selection samples among the k
/// cheapest open nodes, weighted by their softmax over -cost.
[[nodiscard]] SearchOutcome random_walk_search(const ProblemInstance& instance, const PafParams& params,
                                               double sigma, int k, std::uint64_t seed);

/// Textbook A* with unit moves, f = g + heuristic, re-opening on g-improvement.
[[nodiscard]] SearchOutcome classic_astar(const ProblemInstance& instance, double sigma = kDefaultSigma);

/// Uniform-cost search; entering node k costs its prior.
[[nodiscard]] SearchOutcome dijkstra(const ProblemInstance& instance);

struct ThetaStarOutcome {
    SearchOutcome outcome;  // path is the rasterised route
    Path waypoints;         // parent-chain vertices
    double length = 0.0;    // Euclidean length of the waypoint polyline
};

/// Basic Theta* with Euclidean g-values and Bresenham line-of-sight shortcuts.
[[nodiscard]] ThetaStarOutcome theta_star(const ProblemInstance& instance, double sigma = kDefaultSigma);

inline constexpr double kDefaultFocalWeight = 2.0;

/// Focal search on unit step costs. The map's cost field is read as a path
/// probability map in [0,1]; within {open : f <= w * f_min} the node with the
/// highest probability is expanded.
[[nodiscard]] SearchOutcome focal_search(const GridMap& ppm, NodeId source, NodeId target,
                                         double w = kDefaultFocalWeight, double sigma = kDefaultSigma);

/// Follows parents from target back to source.
/// Throws InternalError on a missing link or a cycle.
[[nodiscard]] Path backtrack(const SearchTrace& trace, NodeId source, NodeId target);

}  // namespace apf
