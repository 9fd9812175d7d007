#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apf/gridmap.hpp"
#include "apf/search.hpp"

namespace apf::metrics {

/// Binary labelling of a path or node set over an H x W grid.
struct PathMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits;

    [[nodiscard]] std::size_t popcount() const noexcept;
};

[[nodiscard]] PathMask mask_of(const Path& path, int height, int width);
/// Popcount of the exclusive-or of two masks of equal shape.
[[nodiscard]] std::size_t symdiff(const PathMask& a, const PathMask& b);

// Per-instance terms. The aggregate functions below are their means.
[[nodiscard]] double psim_term(const Path& pred, const Path& ref);

struct ChamferValue {
    double literal = 0.0;     // sum of squared nearest-neighbour distances, both directions
    double normalized = 0.0;  // each directed sum divided by its point count
};
[[nodiscard]] ChamferValue chamfer_term(const Path& pred, const Path& ref);

[[nodiscard]] double spr(std::span<const Path> pred, std::span<const Path> ref);
[[nodiscard]] double psim(std::span<const Path> pred, std::span<const Path> ref);
[[nodiscard]] ChamferValue chamfer(std::span<const Path> pred, std::span<const Path> ref);

/// Cells strictly enclosed (even-odd rule) by the polygon a + reversed(b),
/// excluding cells on either path. Sorted by (row, col).
[[nodiscard]] std::vector<NodeId> area_region(const Path& a, const Path& b);
[[nodiscard]] std::size_t area_between(const Path& a, const Path& b);

/// One instance: 1 - |region_j| / |union of all regions|, with 0/0 -> 1.
[[nodiscard]] std::vector<double> asim_terms(std::span<const Path* const> preds, const Path& ref);

using MethodPaths = std::vector<std::pair<std::string, std::vector<Path>>>;
/// Per-method mean ASIM, normalised over exactly the given method set.
[[nodiscard]] std::vector<std::pair<std::string, double>> asim(const MethodPaths& preds, std::span<const Path> ref);

[[nodiscard]] double hist(const SearchTrace& trace, const GridMap& map);
[[nodiscard]] double ep(const SearchTrace& trace, const SearchTrace& astar_trace);
/// L1 between the visited mask (closed list plus reached target) and the reference mask.
[[nodiscard]] double path_loss(const SearchTrace& trace, const Path& ref);

struct InstanceMetrics {
    std::string instance_id;
    double spr = 0.0;
    double psim = 0.0;
    double asim = 0.0;
    double cd = 0.0;
    double cd_normalized = 0.0;
    double hist = 0.0;
    double ep = 0.0;
    double path_loss = 0.0;
};

struct MetricsReport {
    std::vector<InstanceMetrics> per_instance;
    InstanceMetrics aggregate;  // arithmetic means, instance_id "mean"
};

[[nodiscard]] MetricsReport summarize(std::vector<InstanceMetrics> rows);

}  // namespace apf::metrics
