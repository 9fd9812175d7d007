#include <doctest.h>

#include <algorithm>

#include "apf/errors.hpp"
#include "apf/fit.hpp"
#include "apf/search.hpp"
#include "oracles.hpp"

using namespace apf;

namespace {

std::vector<ProblemInstance> corridor_set() {
    std::vector<ProblemInstance> out;
    out.push_back({oracle::corridor_map(3, 9, 1, 0, 8), {1, 0}, {1, 8}, oracle::row_path(1, 0, 8)});
    out.push_back({oracle::corridor_map(4, 6, 2, 1, 5), {2, 1}, {2, 5}, oracle::row_path(2, 1, 5)});
    Path diag;
    for (int i = 0; i < 6; ++i) diag.nodes.push_back({i, i});
    out.push_back({oracle::diagonal_corridor(6), {0, 0}, {5, 5}, diag});
    return out;
}

std::vector<ProblemInstance> engine_set(const PafParams& truth, int count, int size, std::uint64_t seed0) {
    std::vector<ProblemInstance> out;
    for (int i = 0; i < count; ++i) {
        auto inst = generate_maze({size, size, 0.3, seed0 + static_cast<std::uint64_t>(i), 200});
        inst.reference = daa_star(inst, truth).path;
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace

TEST_CASE("objective is zero on corridors for any parameters") {
    const auto set = corridor_set();
    for (double a : {0.0, 0.5, 1.0})
        for (double l : {0.0, 0.5, 1.0})
            for (double k : {0.0, 1.0}) CHECK(fit::objective({a, l, k}, set) == 0.0);
}

TEST_CASE("objective counts the overshoot of the closed list") {
    // Corridor (1,0)..(1,7) with s=(1,3), t=(1,7). With lambda=0, kappa=0 the
    // search is breadth-first in message order with ties to the lower flat
    // index, so the three cells left of s (messages 1, 2, 3) are closed before
    // (1,6) generates the target: loss 3. With lambda=1 the heuristic keeps
    // the search on the reference side: loss 0.
    const std::vector<ProblemInstance> set{
        {oracle::corridor_map(3, 8, 1, 0, 7), {1, 3}, {1, 7}, oracle::row_path(1, 3, 7)}};
    CHECK(fit::objective({0.5, 0.0, 0.0}, set) == 3.0);
    CHECK(fit::objective({0.5, 1.0, 0.0}, set) == 0.0);
}

TEST_CASE("objective contract") {
    CHECK_THROWS_AS((void)fit::objective({}, std::span<const ProblemInstance>{}), ContractError);
    auto set = corridor_set();
    set[1].reference.reset();
    CHECK_THROWS_AS((void)fit::objective({}, set), DataError);
}

TEST_CASE("sweep values are exact decimals with the bound included") {
    CHECK(fit::sweep_values(0.5, 1.0) == std::vector<double>{0.0, 0.5, 1.0});
    const auto v = fit::sweep_values(0.1, 1.0);
    REQUIRE(v.size() == 11);
    CHECK(v[3] == 0.3);
    CHECK(v[7] == 0.7);
    CHECK(v[8] == 0.8);
    CHECK(fit::sweep_values(0.3, 1.0) == std::vector<double>{0.0, 0.3, 0.6, 0.9, 1.0});
}

TEST_CASE("coarse grid without refinement is the best of 28 evaluations") {
    const auto set = engine_set({0.3, 0.7, 0.8}, 6, 12, 500);
    fit::FitConfig cfg;
    cfg.grid_step = 0.5;
    cfg.refine_iters = 0;
    const auto r = fit::fit(set, cfg);
    CHECK(r.evaluations == 28);
    REQUIRE(r.loss_curve.size() == 28);
    CHECK(r.loss_curve.front().params == PafParams{0.5, 0.5, 1.0});

    // Enumerate the expected order and the earliest minimum independently.
    std::vector<PafParams> order{{0.5, 0.5, 1.0}};
    for (double a : {0.0, 0.5, 1.0})
        for (double l : {0.0, 0.5, 1.0})
            for (double k : {0.0, 0.5, 1.0}) order.push_back({a, l, k});
    double best = 1e300;
    PafParams arg;
    for (std::size_t i = 0; i < order.size(); ++i) {
        CHECK(r.loss_curve[i].params == order[i]);
        const double loss = fit::objective(order[i], set);
        CHECK(r.loss_curve[i].loss == loss);
        if (loss < best) {
            best = loss;
            arg = order[i];
        }
    }
    CHECK(r.train_loss == best);
    CHECK(r.params == arg);
}

TEST_CASE("fit never loses to the truth or the start point") {
    const PafParams truth{0.3, 0.7, 0.8};
    const auto set = engine_set(truth, 8, 16, 900);
    fit::FitConfig cfg;
    cfg.grid_step = 0.25;
    cfg.refine_iters = 3;
    const auto r = fit::fit(set, cfg);
    CHECK(r.train_loss <= fit::objective(truth, set) + 1e-9);
    CHECK(r.train_loss <= fit::objective({0.5, 0.5, 1.0}, set));
    CHECK(r.train_loss == fit::objective(r.params, set));
    double curve_min = 1e300;
    for (const auto& p : r.loss_curve) curve_min = std::min(curve_min, p.loss);
    CHECK(r.train_loss == curve_min);
    CHECK(r.evaluations == r.loss_curve.size());
    for (const auto& p : r.loss_curve) {
        CHECK(p.params.alpha >= 0.0);
        CHECK(p.params.alpha <= 1.0);
        CHECK(p.params.lambda >= 0.0);
        CHECK(p.params.lambda <= 1.0);
        CHECK(p.params.kappa >= 0.0);
        CHECK(p.params.kappa <= cfg.kappa_max);
    }
}

TEST_CASE("fit on dijkstra references beats the initial point") {
    std::vector<ProblemInstance> set;
    for (std::uint64_t s = 0; s < 6; ++s) set.push_back(generate_maze({14, 14, 0.3, 40 + s, 200}));
    fit::FitConfig cfg;
    cfg.grid_step = 0.5;
    cfg.refine_iters = 2;
    const auto r = fit::fit(set, cfg);
    CHECK(r.train_loss <= fit::objective({0.5, 0.5, 1.0}, set));
}

TEST_CASE("fit attains zero loss on corridors") {
    fit::FitConfig cfg;
    cfg.grid_step = 0.5;
    cfg.refine_iters = 1;
    CHECK(fit::fit(corridor_set(), cfg).train_loss == 0.0);
}

TEST_CASE("fit is deterministic and thread-count independent") {
    const auto set = engine_set({0.2, 0.6, 0.4}, 5, 12, 70);
    fit::FitConfig cfg;
    cfg.grid_step = 0.5;
    cfg.refine_iters = 2;
    const auto a = fit::fit(set, cfg);
    cfg.threads = 3;
    const auto b = fit::fit(set, cfg);
    CHECK(a.params == b.params);
    CHECK(a.train_loss == b.train_loss);
    REQUIRE(a.loss_curve.size() == b.loss_curve.size());
    for (std::size_t i = 0; i < a.loss_curve.size(); ++i) {
        CHECK(a.loss_curve[i].params == b.loss_curve[i].params);
        CHECK(a.loss_curve[i].loss == b.loss_curve[i].loss);
    }
}

TEST_CASE("fit starts from a preset when asked") {
    fit::FitConfig cfg;
    cfg.grid_step = 0.5;
    cfg.refine_iters = 0;
    cfg.preset = "mpd/daa-mix";
    const auto r = fit::fit(corridor_set(), cfg);
    CHECK(r.loss_curve.front().params == fit::presets("mpd/daa-mix"));
}

TEST_CASE("fit config validation") {
    const auto set = corridor_set();
    fit::FitConfig cfg;
    cfg.grid_step = 0.0;
    CHECK_THROWS_AS((void)fit::fit(set, cfg), ContractError);
    cfg.grid_step = 0.6;
    CHECK_THROWS_AS((void)fit::fit(set, cfg), ContractError);
    cfg = {};
    cfg.refine_shrink = 1.0;
    CHECK_THROWS_AS((void)fit::fit(set, cfg), ContractError);
    cfg = {};
    cfg.preset = "nope";
    CHECK_THROWS_AS((void)fit::fit(set, cfg), ContractError);
    CHECK_THROWS_AS((void)fit::fit(std::span<const ProblemInstance>{}, fit::FitConfig{}), ContractError);
}

TEST_CASE("presets") {
    CHECK(fit::presets("mpd/daa-mix") == PafParams{0.334, 0.660, 0.753});
    CHECK(fit::presets("sdd-intra/daa-mix") == PafParams{0.095, 0.779, 0.914});
    CHECK(fit::presets("csm/daa-min") == PafParams{1.0, 0.473, 1.0});
    CHECK_THROWS_AS((void)fit::presets("mpd/daa-none"), ContractError);
    const auto names = fit::preset_names();
    CHECK(std::find(names.begin(), names.end(), "mpd/daa-mix") != names.end());
    for (const auto& n : names) {
        const auto p = fit::presets(n);
        CHECK_NOTHROW(p.validate());
        CHECK(p.kappa <= 1.0);
    }
}
