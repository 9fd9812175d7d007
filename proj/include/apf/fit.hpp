#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apf/geometry.hpp"
#include "apf/gridmap.hpp"

namespace apf::fit {

struct FitConfig {
    double grid_step = 0.1;
    int refine_iters = 8;
    double refine_shrink = 0.5;
    double kappa_max = 1.0;  // alpha and lambda are always searched over [0,1]
    double sigma = kDefaultSigma;
    std::uint64_t seed = 0;  // recorded for reproducibility; the sweep itself is deterministic
    std::optional<std::string> preset;  // replaces the default starting point
    unsigned threads = 1;

    void validate() const;
};

struct CurvePoint {
    PafParams params;
    double loss = 0.0;
};

struct FitResult {
    PafParams params;
    double train_loss = 0.0;
    std::optional<double> eval_loss;
    std::size_t evaluations = 0;
    std::vector<CurvePoint> loss_curve;
};

/// Mean path loss of the angular search over instances carrying references.
[[nodiscard]] double objective(const PafParams& params, std::span<const ProblemInstance> instances,
                               double sigma = kDefaultSigma);

/// Start point, coarse sweep over (alpha, lambda, kappa), then coordinate
/// descent with a shrinking step. Ties keep the earlier-evaluated point.
[[nodiscard]] FitResult fit(std::span<const ProblemInstance> instances, const FitConfig& config = {});

/// Reference learned weights, stored as fractions. Names look like
/// "mpd/daa-mix". Throws ContractError for an unknown name.
[[nodiscard]] PafParams presets(std::string_view name);
[[nodiscard]] std::vector<std::string> preset_names();

/// Grid values k * step over [0, upper]; the upper bound is always included.
[[nodiscard]] std::vector<double> sweep_values(double step, double upper);

}  // namespace apf::fit
