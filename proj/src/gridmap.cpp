#include "apf/gridmap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <sstream>
#include <string>

#include "apf/errors.hpp"
#include "apf/random.hpp"
#include "apf/search.hpp"

namespace apf {

namespace {

void require_dims(int height, int width) {
    if (height < 2 || width < 2)
        throw DataError("grid must be at least 2x2, got " + std::to_string(height) + "x" + std::to_string(width));
}

std::string where(NodeId n) { return "(" + std::to_string(n.row) + "," + std::to_string(n.col) + ")"; }

}  // namespace

GridMap::GridMap(int height, int width)
    : height_(height), width_(width) {
    require_dims(height, width);
    passable_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 1);
    costs_.assign(passable_.size(), 1.0);
}

GridMap::GridMap(int height, int width, std::vector<std::uint8_t> passable, std::vector<double> costs)
    : height_(height), width_(width), passable_(std::move(passable)), costs_(std::move(costs)) {
    require_dims(height, width);
    const auto n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    if (passable_.size() != n || costs_.size() != n) throw DataError("grid buffers do not match dimensions");
    for (std::size_t i = 0; i < n; ++i) {
        passable_[i] = passable_[i] ? 1 : 0;
        if (passable_[i] && !(std::isfinite(costs_[i]) && costs_[i] >= 0.0))
            throw DataError("passable cell " + where(node(i)) + " has invalid cost");
    }
}

void GridMap::set_passable(NodeId n, bool value) {
    if (!in_bounds(n)) throw ContractError("set_passable out of bounds at " + where(n));
    passable_[index(n)] = value ? 1 : 0;
}

void GridMap::set_cost(NodeId n, double value) {
    if (!in_bounds(n)) throw ContractError("set_cost out of bounds at " + where(n));
    if (!std::isfinite(value) || value < 0.0) throw DataError("cost must be finite and >= 0 at " + where(n));
    costs_[index(n)] = value;
}

std::size_t GridMap::passable_count() const noexcept {
    return static_cast<std::size_t>(std::count(passable_.begin(), passable_.end(), std::uint8_t{1}));
}

bool GridMap::uniform_cost() const noexcept {
    std::optional<double> seen;
    for (std::size_t i = 0; i < passable_.size(); ++i) {
        if (!passable_[i]) continue;
        if (!seen) seen = costs_[i];
        else if (*seen != costs_[i]) return false;
    }
    return true;
}

void neighbor_indices(const GridMap& map, std::size_t flat, std::vector<std::size_t>& out) {
    out.clear();
    const NodeId n = map.node(flat);
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const NodeId m{n.row + dr, n.col + dc};
            if (map.passable(m)) out.push_back(map.index(m));
        }
    }
}

std::vector<NodeId> neighbors(const GridMap& map, NodeId node) {
    if (!map.in_bounds(node)) throw ContractError("neighbors: node " + where(node) + " out of bounds");
    std::vector<std::size_t> flat;
    neighbor_indices(map, map.index(node), flat);
    std::vector<NodeId> out;
    out.reserve(flat.size());
    for (auto f : flat) out.push_back(map.node(f));
    return out;
}

std::string path_violation(const GridMap& map, const Path& path, NodeId source, NodeId target) {
    if (path.empty()) return "path is empty";
    if (path.front() != source) return "path does not start at the source";
    if (path.back() != target) return "path does not end at the target";
    std::vector<std::uint8_t> seen(map.cell_count(), 0);
    for (std::size_t i = 0; i < path.size(); ++i) {
        const NodeId n = path.nodes[i];
        if (!map.in_bounds(n)) return "node " + where(n) + " out of bounds";
        if (!map.passable(n)) return "node " + where(n) + " is blocked";
        if (seen[map.index(n)]) return "node " + where(n) + " repeats";
        seen[map.index(n)] = 1;
        if (i > 0 && !adjacent8(path.nodes[i - 1], n))
            return "nodes " + where(path.nodes[i - 1]) + " and " + where(n) + " are not adjacent";
    }
    return {};
}

bool satisfies_degree_constraint(const Path& path) {
    if (path.size() < 2) return false;
    for (std::size_t i = 0; i < path.size(); ++i) {
        int degree = 0;
        for (std::size_t j = 0; j < path.size(); ++j)
            if (j != i && adjacent8(path.nodes[i], path.nodes[j])) ++degree;
        const bool endpoint = i == 0 || i + 1 == path.size();
        if (degree != (endpoint ? 1 : 2)) return false;
    }
    return true;
}

void validate_instance(const ProblemInstance& instance) {
    const GridMap& map = instance.map;
    if (!map.in_bounds(instance.source)) throw DataError("source " + where(instance.source) + " out of bounds");
    if (!map.in_bounds(instance.target)) throw DataError("target " + where(instance.target) + " out of bounds");
    if (instance.source == instance.target) throw DataError("source equals target");
    if (!map.passable(instance.source)) throw DataError("source " + where(instance.source) + " is blocked");
    if (!map.passable(instance.target)) throw DataError("target " + where(instance.target) + " is blocked");
    if (instance.reference) {
        const auto why = path_violation(map, *instance.reference, instance.source, instance.target);
        if (!why.empty()) throw DataError("invalid reference path: " + why);
    }
}

// ---------------------------------------------------------------------------
// MovingAI

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    return lines;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw DataError("line " + std::to_string(line) + ": " + what);
}

int header_value(std::string_view line, std::string_view key, std::size_t lineno) {
    if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ' ')
        parse_fail(lineno, "expected '" + std::string(key) + " <n>'");
    auto digits = line.substr(key.size() + 1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || value <= 0)
        parse_fail(lineno, "bad " + std::string(key) + " value");
    return value;
}

}  // namespace

GridMap parse_movingai(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.size() < 4) parse_fail(lines.size() + 1, "truncated header");
    if (lines[0].substr(0, 5) != "type ") parse_fail(1, "expected 'type <name>'");
    const int height = header_value(lines[1], "height", 2);
    const int width = header_value(lines[2], "width", 3);
    if (lines[3] != "map") parse_fail(4, "expected 'map'");
    const std::size_t rows = lines.size() - 4;
    if (rows != static_cast<std::size_t>(height))
        parse_fail(lines.size(), "header height " + std::to_string(height) + " but " + std::to_string(rows) +
                                     " body rows");
    if (height < 2 || width < 2) parse_fail(2, "map must be at least 2x2");

    std::vector<std::uint8_t> passable(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
    std::vector<double> costs(passable.size(), 0.0);
    for (int r = 0; r < height; ++r) {
        const auto row = lines[4 + static_cast<std::size_t>(r)];
        const std::size_t lineno = 5 + static_cast<std::size_t>(r);
        if (row.size() != static_cast<std::size_t>(width))
            parse_fail(lineno, "row length " + std::to_string(row.size()) + " != width " + std::to_string(width));
        for (int c = 0; c < width; ++c) {
            const auto flat = static_cast<std::size_t>(r) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c);
            switch (row[static_cast<std::size_t>(c)]) {
                case '.':
                case 'G':
                    passable[flat] = 1;
                    costs[flat] = 1.0;
                    break;
                case '@':
                case 'O':
                case 'T':
                case 'W':
                    passable[flat] = 0;
                    break;
                default:
                    parse_fail(lineno, std::string("unknown cell character '") + row[static_cast<std::size_t>(c)] + "'");
            }
        }
    }
    return GridMap(height, width, std::move(passable), std::move(costs));
}

std::string write_movingai(const GridMap& map) {
    std::string out = "type octile\nheight " + std::to_string(map.height()) + "\nwidth " +
                      std::to_string(map.width()) + "\nmap\n";
    out.reserve(out.size() + map.cell_count() + static_cast<std::size_t>(map.height()));
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c) out.push_back(map.passable(NodeId{r, c}) ? '.' : '@');
        out.push_back('\n');
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cost maps

GridMap load_costmap(const std::vector<std::vector<double>>& grid, double passable_threshold) {
    if (grid.empty() || grid.front().empty()) throw DataError("cost map is empty");
    const auto height = static_cast<int>(grid.size());
    const auto width = static_cast<int>(grid.front().size());
    require_dims(height, width);
    std::vector<std::uint8_t> passable;
    std::vector<double> costs;
    passable.reserve(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
    costs.reserve(passable.capacity());
    for (int r = 0; r < height; ++r) {
        const auto& row = grid[static_cast<std::size_t>(r)];
        if (row.size() != static_cast<std::size_t>(width))
            throw DataError("cost map row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                            " values, expected " + std::to_string(width));
        for (int c = 0; c < width; ++c) {
            const double v = row[static_cast<std::size_t>(c)];
            if (!std::isfinite(v)) throw DataError("non-finite cost at " + where({r, c}));
            if (v < 0.0) throw DataError("negative cost at " + where({r, c}));
            passable.push_back(v > passable_threshold ? 0 : 1);
            costs.push_back(v);
        }
    }
    return GridMap(height, width, std::move(passable), std::move(costs));
}

namespace {

std::vector<double> parse_reals(std::string_view line, char sep, std::size_t lineno) {
    std::vector<double> out;
    std::string buf(line);
    if (sep == ',') std::replace(buf.begin(), buf.end(), ',', ' ');
    std::istringstream in(buf);
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            parse_fail(lineno, "bad number '" + tok + "'");
        }
        if (used != tok.size()) parse_fail(lineno, "bad number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char ch) { return ch == ' ' || ch == '\t'; });
}

}  // namespace

GridMap parse_costmap_text(std::string_view text, double passable_threshold) {
    auto lines = split_lines(text);
    while (!lines.empty() && blank(lines.back())) lines.pop_back();
    if (lines.empty()) throw DataError("cost map is empty");
    std::vector<std::vector<double>> grid;
    if (text.find(',') != std::string_view::npos) {
        for (std::size_t i = 0; i < lines.size(); ++i) grid.push_back(parse_reals(lines[i], ',', i + 1));
    } else {
        const auto header = parse_reals(lines[0], ' ', 1);
        if (header.size() != 2 || header[0] != std::floor(header[0]) || header[1] != std::floor(header[1]) ||
            header[0] < 1 || header[1] < 1)
            parse_fail(1, "expected 'H W' header");
        const auto h = static_cast<std::size_t>(header[0]);
        const auto w = static_cast<std::size_t>(header[1]);
        if (lines.size() - 1 != h)
            parse_fail(lines.size(), "header height " + std::to_string(h) + " but " +
                                         std::to_string(lines.size() - 1) + " rows");
        for (std::size_t i = 1; i < lines.size(); ++i) {
            grid.push_back(parse_reals(lines[i], ' ', i + 1));
            if (grid.back().size() != w)
                parse_fail(i + 1, "row has " + std::to_string(grid.back().size()) + " values, expected " +
                                      std::to_string(w));
        }
    }
    return load_costmap(grid, passable_threshold);
}

std::string write_costmap_text(const GridMap& map) {
    std::ostringstream out;
    out.precision(17);
    out << map.height() << ' ' << map.width() << '\n';
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c) {
            if (c) out << ' ';
            out << map.cost(NodeId{r, c});
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Maze generation

bool connected(const GridMap& map, NodeId a, NodeId b) {
    if (!map.passable(a) || !map.passable(b)) return false;
    std::vector<std::uint8_t> seen(map.cell_count(), 0);
    std::deque<std::size_t> queue{map.index(a)};
    seen[map.index(a)] = 1;
    const std::size_t goal = map.index(b);
    std::vector<std::size_t> nbrs;
    while (!queue.empty()) {
        const auto i = queue.front();
        queue.pop_front();
        if (i == goal) return true;
        neighbor_indices(map, i, nbrs);
        for (auto k : nbrs) {
            if (!seen[k]) {
                seen[k] = 1;
                queue.push_back(k);
            }
        }
    }
    return false;
}

ProblemInstance generate_maze(const MazeOptions& options) {
    if (options.height < 4 || options.width < 4) throw ContractError("maze dimensions must be >= 4");
    if (!(options.obstacle_density >= 0.0 && options.obstacle_density < 1.0))
        throw ContractError("obstacle density must lie in [0,1)");
    Rng rng(options.seed);
    const double min_sep = std::max(options.height, options.width) / 2.0;

    for (int attempt = 0; attempt < options.max_retries; ++attempt) {
        GridMap map(options.height, options.width);
        for (int r = 0; r < options.height; ++r)
            for (int c = 0; c < options.width; ++c)
                if (unit_double(rng) < options.obstacle_density) map.set_passable({r, c}, false);

        std::vector<NodeId> free;
        for (std::size_t i = 0; i < map.cell_count(); ++i)
            if (map.passable(i)) free.push_back(map.node(i));
        if (free.size() < 2) continue;
        const NodeId source = free[uniform_index(rng, free.size())];
        std::vector<NodeId> far;
        for (const NodeId n : free)
            if (std::max(std::abs(n.row - source.row), std::abs(n.col - source.col)) >= min_sep) far.push_back(n);
        if (far.empty()) continue;
        const NodeId target = far[uniform_index(rng, far.size())];
        if (!connected(map, source, target)) continue;

        ProblemInstance instance{std::move(map), source, target, std::nullopt};
        auto ref = dijkstra(instance);
        if (!ref.path) throw InternalError("dijkstra failed on a connected maze");
        instance.reference = std::move(ref.path);
        return instance;
    }
    throw DataError("maze retry budget exhausted (" + std::to_string(options.max_retries) +
                    " attempts at density " + std::to_string(options.obstacle_density) + ")");
}

}  // namespace apf
