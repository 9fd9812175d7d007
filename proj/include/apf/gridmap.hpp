#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apf {

/// Grid cell addressed by (row, col).
struct NodeId {
    int row = 0;
    int col = 0;

    friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

/// Ordered node sequence from source to target.
struct Path {
    std::vector<NodeId> nodes;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    [[nodiscard]] bool empty() const noexcept { return nodes.empty(); }
    [[nodiscard]] const NodeId& front() const { return nodes.front(); }
    [[nodiscard]] const NodeId& back() const { return nodes.back(); }

    friend bool operator==(const Path&, const Path&) = default;
};

[[nodiscard]] constexpr bool adjacent8(NodeId a, NodeId b) noexcept {
    const int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    const int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    return (dr | dc) != 0 && dr <= 1 && dc <= 1;
}

/// Occupancy and per-node prior over an H x W 8-connected grid.
///
/// Impassable cells are carried by the mask only; the engines never read their
/// cost slot.
class GridMap {
public:
    GridMap(int height, int width);
    GridMap(int height, int width, std::vector<std::uint8_t> passable, std::vector<double> costs);

    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] std::size_t cell_count() const noexcept { return passable_.size(); }

    [[nodiscard]] bool in_bounds(NodeId n) const noexcept {
        return n.row >= 0 && n.col >= 0 && n.row < height_ && n.col < width_;
    }
    [[nodiscard]] std::size_t index(NodeId n) const noexcept {
        return static_cast<std::size_t>(n.row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(n.col);
    }
    [[nodiscard]] NodeId node(std::size_t flat) const noexcept {
        return {static_cast<int>(flat / static_cast<std::size_t>(width_)),
                static_cast<int>(flat % static_cast<std::size_t>(width_))};
    }

    [[nodiscard]] bool passable(NodeId n) const noexcept { return in_bounds(n) && passable_[index(n)] != 0; }
    [[nodiscard]] bool passable(std::size_t flat) const noexcept { return passable_[flat] != 0; }
    [[nodiscard]] double cost(NodeId n) const noexcept { return costs_[index(n)]; }
    [[nodiscard]] double cost(std::size_t flat) const noexcept { return costs_[flat]; }

    void set_passable(NodeId n, bool value);
    void set_cost(NodeId n, double value);

    [[nodiscard]] std::size_t passable_count() const noexcept;
    /// True when every passable cell carries the same prior.
    [[nodiscard]] bool uniform_cost() const noexcept;

    friend bool operator==(const GridMap&, const GridMap&) = default;

private:
    int height_;
    int width_;
    std::vector<std::uint8_t> passable_;
    std::vector<double> costs_;
};

/// Passable 8-neighbours of `node`, row-major over the 3x3 window.
/// Throws ContractError when `node` is out of bounds.
[[nodiscard]] std::vector<NodeId> neighbors(const GridMap& map, NodeId node);

/// Appends neighbours of a flat index to `out` (cleared first). Hot-loop variant.
void neighbor_indices(const GridMap& map, std::size_t flat, std::vector<std::size_t>& out);

struct ProblemInstance {
    GridMap map;
    NodeId source;
    NodeId target;
    std::optional<Path> reference;
};

/// Empty string when valid, otherwise a description of the first violation.
[[nodiscard]] std::string path_violation(const GridMap& map, const Path& path, NodeId source, NodeId target);

/// Labelling-degree check: endpoints have exactly one path neighbour among the
/// path nodes, interior nodes exactly two.
[[nodiscard]] bool satisfies_degree_constraint(const Path& path);

/// Throws DataError if the instance breaks its invariants.
void validate_instance(const ProblemInstance& instance);

// MovingAI .map text. Accepts `.`/`G` as free and `@`/`O`/`T`/`W` as blocked.
[[nodiscard]] GridMap parse_movingai(std::string_view text);
// Writes the canonical form: `type octile` header, `.` free, `@` blocked, LF endings.
[[nodiscard]] std::string write_movingai(const GridMap& map);

inline constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

/// Row-major H x W real grid to map; cells with cost > threshold become blocked.
[[nodiscard]] GridMap load_costmap(const std::vector<std::vector<double>>& grid,
                                   double passable_threshold = kNoThreshold);

/// Cost-map text: either `H W` then H rows of W whitespace-separated reals, or
/// plain CSV rows (detected by the presence of commas).
[[nodiscard]] GridMap parse_costmap_text(std::string_view text, double passable_threshold = kNoThreshold);
[[nodiscard]] std::string write_costmap_text(const GridMap& map);

struct MazeOptions {
    int height = 32;
    int width = 32;
    double obstacle_density = 0.3;
    std::uint64_t seed = 0;
    int max_retries = 200;
};

/// Rejection-sampled binary maze with a Dijkstra reference path.
/// Throws DataError when the retry budget is exhausted.
[[nodiscard]] ProblemInstance generate_maze(const MazeOptions& options);

/// Breadth-first reachability over passable cells.
[[nodiscard]] bool connected(const GridMap& map, NodeId a, NodeId b);

}  // namespace apf
