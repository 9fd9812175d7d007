#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include "apf/gridmap.hpp"

namespace apf {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDefaultSigma = 0.001;

/// Chebyshev distance plus sigma times Euclidean distance.
[[nodiscard]] double heuristic(NodeId node, NodeId target, double sigma);

[[nodiscard]] double euclidean(NodeId a, NodeId b);

/// Precomputed heuristic values for every cell of a map.
class HeuristicField {
public:
    HeuristicField(const GridMap& map, NodeId target, double sigma);

    [[nodiscard]] double operator[](std::size_t flat) const noexcept { return values_[flat]; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
    double sigma_;
};

/// Search weights. `beta` is derived, never stored.
struct PafParams {
    double alpha = 0.5;
    double lambda = 0.5;
    double kappa = 1.0;

    [[nodiscard]] double beta() const noexcept { return (1.0 - lambda) * kappa; }
    /// Throws ContractError outside alpha, lambda in [0,1], kappa >= 0.
    void validate() const;

    friend bool operator==(const PafParams&, const PafParams&) = default;
};

/// Angle between the moves j->i and i->k; nullopt when either move is zero.
[[nodiscard]] std::optional<double> turn_angle(NodeId j, NodeId i, NodeId k);

/// alpha * angle + (1 - alpha) * (pi - angle).
[[nodiscard]] constexpr double paf(double angle, double alpha) noexcept {
    return alpha * angle + (1.0 - alpha) * (kPi - angle);
}

struct SightLine {
    bool clear = false;
    std::vector<NodeId> cells;  // traversal order a..b, endpoints included
};

/// Bresenham rasterisation of a->b. The raster is always computed from the
/// lexicographically smaller endpoint so both query directions see the same
/// cells; `cells` is then ordered from a to b.
[[nodiscard]] SightLine line_of_sight(const GridMap& map, NodeId a, NodeId b);

/// Clear-or-not only; same raster as line_of_sight.
[[nodiscard]] bool has_line_of_sight(const GridMap& map, NodeId a, NodeId b);

/// Raw Bresenham cells from a to b (no symmetric reordering).
[[nodiscard]] std::vector<NodeId> bresenham(NodeId a, NodeId b);

}  // namespace apf
