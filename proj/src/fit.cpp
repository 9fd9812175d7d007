#include "apf/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <thread>

#include "apf/errors.hpp"
#include "apf/metrics.hpp"
#include "apf/search.hpp"

namespace apf::fit {

namespace {

struct PresetRow {
    std::string_view name;
    PafParams params;
};

// alpha, lambda, kappa (learned percentages divided by 100).
constexpr std::array kPresets{
    PresetRow{"mpd/daa-min", {1.0, 0.199, 0.296}},
    PresetRow{"mpd/daa-max", {0.0, 0.525, 0.362}},
    PresetRow{"mpd/daa-mix", {0.334, 0.660, 0.753}},
    PresetRow{"tmpd/daa-min", {1.0, 0.172, 0.659}},
    PresetRow{"tmpd/daa-max", {0.0, 0.321, 0.001}},
    PresetRow{"tmpd/daa-mix", {0.769, 0.481, 0.838}},
    PresetRow{"csm/daa-min", {1.0, 0.473, 1.0}},
    PresetRow{"csm/daa-max", {0.0, 0.321, 0.001}},
    PresetRow{"csm/daa-mix", {0.687, 0.517, 0.768}},
    PresetRow{"aug-tmpd/daa", {0.964, 0.633, 0.978}},
    PresetRow{"aug-tmpd/daa-path", {0.587, 0.552, 0.563}},
    PresetRow{"aug-tmpd/daa-mask", {0.696, 0.505, 0.774}},
    PresetRow{"aug-tmpd/daa-weight", {0.622, 0.499, 0.703}},
    PresetRow{"warcraft/daa-min", {1.0, 0.754, 0.167}},
    PresetRow{"warcraft/daa-max", {0.0, 0.788, 0.439}},
    PresetRow{"warcraft/daa-mix", {0.277, 0.805, 0.744}},
    PresetRow{"pokemon/daa-min", {1.0, 0.785, 0.228}},
    PresetRow{"pokemon/daa-max", {0.0, 0.834, 0.440}},
    PresetRow{"pokemon/daa-mix", {0.323, 0.832, 0.702}},
    PresetRow{"sdd-intra/daa-min", {1.0, 0.535, 0.002}},
    PresetRow{"sdd-intra/daa-max", {0.0, 0.734, 0.684}},
    PresetRow{"sdd-intra/daa-mix", {0.095, 0.779, 0.914}},
    PresetRow{"sdd-inter/daa-min", {1.0, 0.296, 0.030}},
    PresetRow{"sdd-inter/daa-max", {0.0, 0.690, 0.577}},
    PresetRow{"sdd-inter/daa-mix", {0.174, 0.730, 0.841}},
};

using Key = std::array<double, 3>;

Key key_of(const PafParams& p) { return {p.alpha, p.lambda, p.kappa}; }

}  // namespace

void FitConfig::validate() const {
    if (!(grid_step > 0.0 && grid_step <= 0.5)) throw ContractError("grid_step must lie in (0, 0.5]");
    if (!(refine_shrink > 0.0 && refine_shrink < 1.0)) throw ContractError("refine_shrink must lie in (0,1)");
    if (refine_iters < 0) throw ContractError("refine_iters must be >= 0");
    if (!(kappa_max >= 0.0) || !std::isfinite(kappa_max)) throw ContractError("kappa bound must be finite and >= 0");
    if (threads == 0) throw ContractError("threads must be >= 1");
}

double objective(const PafParams& params, std::span<const ProblemInstance> instances, double sigma) {
    if (instances.empty()) throw ContractError("objective needs at least one instance");
    SearchOptions options;
    options.record_probabilities = false;
    double total = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (!inst.reference) throw DataError("instance " + std::to_string(i) + " has no reference path");
        const auto outcome = daa_star(inst, params, sigma, options);
        if (!outcome.path) throw InternalError("search failed on instance " + std::to_string(i) + " with a reference");
        total += metrics::path_loss(outcome.trace, *inst.reference);
    }
    return total / static_cast<double>(instances.size());
}

std::vector<double> sweep_values(double step, double upper) {
    std::vector<double> values;
    if (upper <= 0.0) return {0.0};
    const double count = upper / step;
    const double rounded = std::round(count);
    if (std::abs(count - rounded) < 1e-9) {
        // k * upper / n keeps decimal grid points such as 0.3 exact.
        const auto n = static_cast<int>(rounded);
        for (int k = 0; k <= n; ++k) values.push_back(upper * k / n);
    } else {
        for (int k = 0; k * step < upper - 1e-12; ++k) values.push_back(std::round(k * step * 1e12) / 1e12);
        values.push_back(upper);
    }
    return values;
}

FitResult fit(std::span<const ProblemInstance> instances, const FitConfig& config) {
    config.validate();
    if (instances.empty()) throw ContractError("fit needs at least one instance");
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (!instances[i].reference) throw DataError("instance " + std::to_string(i) + " has no reference path");

    const auto clamp_params = [&](PafParams p) {
        p.alpha = std::clamp(p.alpha, 0.0, 1.0);
        p.lambda = std::clamp(p.lambda, 0.0, 1.0);
        p.kappa = std::clamp(p.kappa, 0.0, config.kappa_max);
        return p;
    };

    FitResult result;
    std::map<Key, double> memo;
    std::size_t best = 0;

    const auto record = [&](const PafParams& p, double loss) {
        result.loss_curve.push_back({p, loss});
        memo.emplace(key_of(p), loss);
        if (loss < result.loss_curve[best].loss) best = result.loss_curve.size() - 1;
    };

    // Evaluate a batch in order; results are independent of thread scheduling.
    const auto evaluate_batch = [&](const std::vector<PafParams>& batch) {
        std::vector<double> losses(batch.size(), 0.0);
        std::vector<std::size_t> todo;
        for (std::size_t j = 0; j < batch.size(); ++j) {
            const auto hit = memo.find(key_of(batch[j]));
            if (hit != memo.end()) losses[j] = hit->second;
            else todo.push_back(j);
        }
        const unsigned workers = std::min<std::size_t>(config.threads, std::max<std::size_t>(todo.size(), 1));
        if (workers <= 1) {
            for (auto j : todo) losses[j] = objective(batch[j], instances, config.sigma);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(workers);
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t q = w; q < todo.size(); q += workers)
                            losses[todo[q]] = objective(batch[todo[q]], instances, config.sigma);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (std::size_t j = 0; j < batch.size(); ++j) record(batch[j], losses[j]);
    };

    const PafParams start = clamp_params(config.preset ? presets(*config.preset) : PafParams{0.5, 0.5, 1.0});
    evaluate_batch({start});

    std::vector<PafParams> grid;
    const auto unit = sweep_values(config.grid_step, 1.0);
    const auto kappas = sweep_values(config.grid_step * config.kappa_max, config.kappa_max);
    for (double a : unit)
        for (double l : unit)
            for (double k : kappas) grid.push_back({a, l, k});
    evaluate_batch(grid);

    double step = config.grid_step;
    for (int iter = 0; iter < config.refine_iters; ++iter) {
        for (int axis = 0; axis < 3; ++axis) {
            for (const double sign : {-1.0, 1.0}) {
                PafParams probe = result.loss_curve[best].params;
                double& coord = axis == 0 ? probe.alpha : axis == 1 ? probe.lambda : probe.kappa;
                coord += sign * step * (axis == 2 ? config.kappa_max : 1.0);
                probe = clamp_params(probe);
                if (probe == result.loss_curve[best].params) continue;
                evaluate_batch({probe});
            }
        }
        step *= config.refine_shrink;
    }

    result.params = result.loss_curve[best].params;
    result.train_loss = result.loss_curve[best].loss;
    result.evaluations = result.loss_curve.size();
    const double check = objective(result.params, instances, config.sigma);
    if (check != result.train_loss) throw InternalError("fit: final re-evaluation disagrees with recorded loss");
    return result;
}

PafParams presets(std::string_view name) {
    for (const auto& row : kPresets)
        if (row.name == name) return row.params;
    throw ContractError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& row : kPresets) out.emplace_back(row.name);
    return out;
}

}  // namespace apf::fit
