// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "apf/bench.hpp"
#include "apf/cli.hpp"
#include "apf/fit.hpp"
#include "apf/geometry.hpp"
#include "apf/metrics.hpp"
#include "apf/random.hpp"
#include "apf/search.hpp"
#include "oracles.hpp"

using namespace apf;
namespace fs = std::filesystem;

namespace {

// Pinned limits and tolerances.
constexpr int kMazeCount = 500;
constexpr int kMazeSize = 32;
constexpr double kMazeDensity = 0.3;
constexpr std::uint64_t kMazeSeed0 = 20240001;
constexpr double kOracleTimeLimit = 10.0;  // seconds

constexpr int kSmallSeeds = 200;
constexpr int kSmallSize = 6;
constexpr double kSmallDensity = 0.3;

constexpr int kRandomWalkSeeds = 5;
constexpr int kDisconnectedCount = 50;

constexpr int kPafSamples = 1000;
constexpr double kPafTol = 1e-12;
constexpr double kPafStep = 1e-3;

constexpr double kHeuristicTol = 1e-12;

constexpr int kThetaMaps = 100;
constexpr double kThetaTol = 1e-9;

constexpr int kIdentityInstances = 100;

constexpr int kFitInstances = 50;
constexpr double kFitTol = 1e-9;
constexpr double kFitTimeLimit = 300.0;  // seconds

constexpr int kSelectionTrials = 10000;
constexpr double kSelectionTol = 0.02;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::vector<ProblemInstance>& mazes() {
    static const std::vector<ProblemInstance> set = [] {
        std::vector<ProblemInstance> out;
        out.reserve(kMazeCount);
        for (int i = 0; i < kMazeCount; ++i)
            out.push_back(generate_maze(
                {kMazeSize, kMazeSize, kMazeDensity, kMazeSeed0 + static_cast<std::uint64_t>(i), 200}));
        return out;
    }();
    return set;
}

Verdict optimality_oracle() {
    const auto& set = mazes();
    const auto t0 = Clock::now();
    int equal = 0;
    for (const auto& inst : set) {
        const auto a = classic_astar(inst);
        const auto d = dijkstra(inst);
        if (a.path && d.path && a.path->size() == d.path->size()) ++equal;
    }
    const double dt = seconds_since(t0);
    return {equal == kMazeCount && dt < kOracleTimeLimit,
            fmt("astar = dijkstra on %d/%d mazes, %.2f s (limit %.0f s)", equal, kMazeCount, dt, kOracleTimeLimit)};
}

Verdict small_grid_equivalence() {
    long pairs = 0, mismatches = 0, inadmissible = 0;
    for (int seed = 0; seed < kSmallSeeds; ++seed) {
        Rng rng(static_cast<std::uint64_t>(seed));
        GridMap map(kSmallSize, kSmallSize);
        for (int r = 0; r < kSmallSize; ++r)
            for (int c = 0; c < kSmallSize; ++c)
                if (unit_double(rng) < kSmallDensity) map.set_passable({r, c}, false);
        for (std::size_t t = 0; t < map.cell_count(); ++t) {
            if (!map.passable(t)) continue;
            const NodeId nt = map.node(t);
            const auto hops = oracle::bfs_hops(map, nt);
            for (std::size_t s = 0; s < map.cell_count(); ++s) {
                if (hops[s] == oracle::kUnreached) continue;
                const NodeId ns = map.node(s);
                if (heuristic(ns, nt, 0.0) > static_cast<double>(hops[s])) ++inadmissible;
                if (s == t) continue;
                const ProblemInstance inst{map, ns, nt, std::nullopt};
                const auto a = classic_astar(inst);
                const auto d = dijkstra(inst);
                ++pairs;
                if (!a.path || !d.path || a.path->size() != d.path->size() ||
                    a.path->size() != static_cast<std::size_t>(hops[s] + 1))
                    ++mismatches;
            }
        }
    }
    return {mismatches == 0 && inadmissible == 0,
            fmt("%ld connected pairs over %d patterns, %ld count mismatches, %ld inadmissible nodes", pairs,
                kSmallSeeds, mismatches, inadmissible)};
}

GridMap as_ppm(const GridMap& map) {
    GridMap ppm = map;
    for (std::size_t i = 0; i < ppm.cell_count(); ++i)
        if (ppm.passable(i)) ppm.set_cost(ppm.node(i), 1.0);
    return ppm;
}

std::vector<ProblemInstance> disconnected_set() {
    std::vector<ProblemInstance> out;
    for (int i = 0; i < kDisconnectedCount; ++i) {
        Rng rng(7000 + static_cast<std::uint64_t>(i));
        const int h = 6 + static_cast<int>(uniform_index(rng, 20));
        const int w = 8 + static_cast<int>(uniform_index(rng, 20));
        const int wall = 2 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(w - 4)));
        GridMap map = oracle::walled_map(h, w, wall);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                if (c != wall && unit_double(rng) < 0.15) map.set_passable({r, c}, false);
        const NodeId s{static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h))), 0};
        const NodeId t{static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h))), w - 1};
        map.set_passable(s, true);
        map.set_passable(t, true);
        out.push_back({map, s, t, std::nullopt});
    }
    return out;
}

Verdict completeness() {
    const auto& set = mazes();
    int reached = 0, runs = 0;
    auto tally = [&](const std::optional<Path>& path, Termination term, const ProblemInstance& inst) {
        ++runs;
        if (path && term == Termination::target_reached &&
            path_violation(inst.map, *path, inst.source, inst.target).empty())
            ++reached;
    };
    for (const auto& inst : set) {
        const auto d = daa_star(inst, {});
        tally(d.path, d.terminated_by, inst);
        for (int s = 0; s < kRandomWalkSeeds; ++s) {
            const auto r = random_walk_search(inst, {}, kDefaultSigma, 3, static_cast<std::uint64_t>(s));
            tally(r.path, r.terminated_by, inst);
        }
        const auto th = theta_star(inst);
        tally(th.outcome.path, th.outcome.terminated_by, inst);
        const auto f = focal_search(as_ppm(inst.map), inst.source, inst.target);
        tally(f.path, f.terminated_by, inst);
    }
    int exhausted = 0, dis_runs = 0;
    auto none = [&](const SearchOutcome& o) {
        ++dis_runs;
        if (!o.path && o.terminated_by == Termination::open_exhausted) ++exhausted;
    };
    for (const auto& inst : disconnected_set()) {
        none(daa_star(inst, {}));
        for (int s = 0; s < kRandomWalkSeeds; ++s)
            none(random_walk_search(inst, {}, kDefaultSigma, 3, static_cast<std::uint64_t>(s)));
        none(theta_star(inst).outcome);
        none(focal_search(as_ppm(inst.map), inst.source, inst.target));
    }
    return {reached == runs && exhausted == dis_runs,
            fmt("connected: %d/%d runs reached the target; disconnected: %d/%d runs open_exhausted", reached, runs,
                exhausted, dis_runs)};
}

Verdict paf_algebra() {
    Rng rng(404);
    double worst_sum = 0.0, worst_half = 0.0;
    int bad_sign = 0;
    for (int i = 0; i < kPafSamples; ++i) {
        const double t = unit_double(rng) * kPi;
        const double a = unit_double(rng);
        worst_sum = std::max(worst_sum, std::abs(paf(t, a) + paf(t, 1.0 - a) - kPi));
        worst_half = std::max(worst_half, std::abs(paf(t, 0.5) - kPi / 2));
        for (double alpha : {0.0, 0.25, 0.75, 1.0}) {
            const double t0 = t * (kPi - kPafStep) / kPi;
            const double diff = paf(t0 + kPafStep, alpha) - paf(t0, alpha);
            const double want = 2.0 * alpha - 1.0;
            if ((diff > 0.0) != (want > 0.0) || diff == 0.0) ++bad_sign;
        }
    }
    return {worst_sum <= kPafTol && worst_half <= kPafTol && bad_sign == 0,
            fmt("%d samples: max |sum - pi| = %.2e, max |paf(.,0.5) - pi/2| = %.2e, %d sign errors", kPafSamples,
                worst_sum, worst_half, bad_sign)};
}

Verdict heuristic_constant() {
    const double v = heuristic({0, 0}, {3, 4}, kDefaultSigma);
    return {std::abs(v - 4.005) <= kHeuristicTol && kDefaultSigma == 0.001,
            fmt("sigma = %.3f, heuristic((0,0),(3,4)) = %.15f", kDefaultSigma, v)};
}

Verdict theta_empty_maps() {
    Rng rng(606);
    int ok = 0;
    double worst = 0.0;
    for (int i = 0; i < kThetaMaps; ++i) {
        const int h = 2 + static_cast<int>(uniform_index(rng, 40));
        const int w = 2 + static_cast<int>(uniform_index(rng, 40));
        NodeId s, t;
        do {
            s = {static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h))),
                 static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(w)))};
            t = {static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h))),
                 static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(w)))};
        } while (s == t);
        const GridMap map(h, w);
        const auto out = theta_star({map, s, t, std::nullopt});
        const double err = std::abs(out.length - std::hypot(t.row - s.row, t.col - s.col));
        worst = std::max(worst, err);
        if (out.waypoints == Path{{s, t}} && err <= kThetaTol && out.outcome.path &&
            out.outcome.path->nodes == line_of_sight(map, s, t).cells)
            ++ok;
    }
    return {ok == kThetaMaps, fmt("%d/%d maps with waypoints [s,t], max length error %.2e", ok, kThetaMaps, worst)};
}

Verdict metric_identities() {
    int ok = 0;
    for (int i = 0; i < kIdentityInstances; ++i) {
        const auto inst = generate_maze({24, 24, 0.3, 8000 + static_cast<std::uint64_t>(i), 200});
        const std::vector<Path> ref{*inst.reference};
        SearchTrace tr(24, 24);
        for (const NodeId n : inst.reference->nodes) tr.closed[tr.index(n)] = 1;
        const auto astar = classic_astar(inst);
        const auto asim = metrics::asim(metrics::MethodPaths{{"ref", ref}}, ref);
        const auto cd = metrics::chamfer(ref, ref);
        if (metrics::spr(ref, ref) == 1.0 && metrics::psim(ref, ref) == 1.0 && asim[0].second == 1.0 &&
            cd.literal == 0.0 && cd.normalized == 0.0 && metrics::path_loss(tr, *inst.reference) == 0.0 &&
            metrics::ep(astar.trace, astar.trace) == 0.0)
            ++ok;
    }
    return {ok == kIdentityInstances, fmt("%d/%d instances with perfect scores", ok, kIdentityInstances)};
}

Verdict metric_fixtures() {
    const Path ref = oracle::row_path(1, 0, 5);
    const Path alt{{{1, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 5}}};
    const double p = metrics::psim_term(alt, ref);
    const Path top{{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}}};
    const Path bottom{{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}}};
    const auto ring = metrics::area_between(top, bottom);
    Path c0, c1;
    for (int r = 0; r < 4; ++r) {
        c0.nodes.push_back({r, 0});
        c1.nodes.push_back({r, 1});
    }
    const double cd = metrics::chamfer_term(c1, c0).literal;
    return {p == 1.0 - 8.0 / 12.0 && ring == 1 && cd == 8.0,
            fmt("psim = %.17g (1/3), ring area = %zu (1), shifted CD = %g (8)", p, ring, cd)};
}

Verdict fit_recovery() {
    const PafParams truth{0.3, 0.7, 0.8};
    std::vector<ProblemInstance> set;
    for (int i = 0; i < kFitInstances; ++i) {
        auto inst = generate_maze({kMazeSize, kMazeSize, kMazeDensity, 9000 + static_cast<std::uint64_t>(i), 200});
        inst.reference = daa_star(inst, truth).path;
        set.push_back(std::move(inst));
    }
    const auto t0 = Clock::now();
    const auto result = fit::fit(set);
    const double dt = seconds_since(t0);
    const double at_truth = fit::objective(truth, set);
    return {result.train_loss <= at_truth + kFitTol && dt < kFitTimeLimit,
            fmt("train_loss %.4f <= objective(truth) %.4f, fitted (%.3f, %.3f, %.3f), %zu evaluations, %.1f s "
                "(limit %.0f s)",
                result.train_loss, at_truth, result.params.alpha, result.params.lambda, result.params.kappa,
                result.evaluations, dt, kFitTimeLimit)};
}

Verdict presets() {
    const auto mpd = fit::presets("mpd/daa-mix");
    const auto sdd = fit::presets("sdd-intra/daa-mix");
    const bool ok = mpd == PafParams{0.334, 0.660, 0.753} && sdd == PafParams{0.095, 0.779, 0.914};
    return {ok, fmt("mpd/daa-mix = (%.3f, %.3f, %.3f), sdd-intra/daa-mix = (%.3f, %.3f, %.3f)", mpd.alpha,
                    mpd.lambda, mpd.kappa, sdd.alpha, sdd.lambda, sdd.kappa)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
    const fs::path dir = fs::temp_directory_path() / ("apf_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto bench_to = [&](const std::string& name) {
        std::ostringstream out, err;
        const std::vector<std::string> args{"apf", "bench", "--dataset",
                                            "gen:count=20,height=24,width=24,density=0.3,seed=11", "--method",
                                            "daa:preset=mpd/daa-mix", "--method", "astar", "--method", "theta",
                                            "--method", "random-walk:k=3,seed=5", "--method", "focal:w=2",
                                            "--output", (dir / name).string()};
        return apf::cli::run(args, out, err);
    };
    const int c1 = bench_to("a.csv");
    const int c2 = bench_to("b.csv");
    const std::string a = slurp(dir / "a.csv");
    const bool same_csv = c1 == 0 && c2 == 0 && !a.empty() && a == slurp(dir / "b.csv");
    fs::remove_all(dir);

    const auto& inst = mazes().front();
    const auto r1 = random_walk_search(inst, {}, kDefaultSigma, 3, 123);
    const auto r2 = random_walk_search(inst, {}, kDefaultSigma, 3, 123);
    const bool same_rw = r1.path == r2.path && r1.trace.expansion_order == r2.trace.expansion_order &&
                         r1.trace.messages == r2.trace.messages && r1.trace.costs == r2.trace.costs &&
                         r1.trace.probabilities == r2.trace.probabilities;
    return {same_csv && same_rw, fmt("bench CSV byte-identical: %s (%zu bytes); random walk reproducible: %s",
                                     same_csv ? "yes" : "no", a.size(), same_rw ? "yes" : "no")};
}

Verdict selection_distribution() {
    const ProblemInstance inst{GridMap(8, 8), {3, 3}, {7, 7}, std::nullopt};
    const PafParams params{0.5, 0.5, 0.0};
    // After the source every neighbour carries message theta_s = 1. The three
    // cheapest are (4,4) and the tied pair (3,4), (4,3).
    const std::vector<NodeId> top{{4, 4}, {3, 4}, {4, 3}};
    std::vector<double> costs;
    for (const NodeId n : top)
        costs.push_back(params.lambda * (1.0 + heuristic(n, inst.target, kDefaultSigma)) +
                        (1.0 - params.lambda) * 1.0);
    const auto expected = oracle::softmax_neg(costs);
    std::vector<int> hits(top.size(), 0);
    int outside = 0;
    for (int seed = 0; seed < kSelectionTrials; ++seed) {
        const auto out = random_walk_search(inst, params, kDefaultSigma, 3, static_cast<std::uint64_t>(seed));
        const NodeId first = out.trace.node(out.trace.expansion_order.at(1));
        const auto it = std::find(top.begin(), top.end(), first);
        if (it == top.end()) ++outside;
        else ++hits[static_cast<std::size_t>(it - top.begin())];
    }
    double worst = 0.0;
    std::string freqs;
    for (std::size_t j = 0; j < top.size(); ++j) {
        const double f = hits[j] / static_cast<double>(kSelectionTrials);
        worst = std::max(worst, std::abs(f - expected[j]));
        freqs += fmt("%s%.4f/%.4f", j ? ", " : "", f, expected[j]);
    }
    return {outside == 0 && worst <= kSelectionTol,
            fmt("%d trials, observed/expected: %s, max deviation %.4f (tol %.2f)", kSelectionTrials, freqs.c_str(),
                worst, kSelectionTol)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"optimality oracle", optimality_oracle},
        {"exhaustive small-grid equivalence", small_grid_equivalence},
        {"completeness", completeness},
        {"paf algebra", paf_algebra},
        {"heuristic constant", heuristic_constant},
        {"theta* empty-map exactness", theta_empty_maps},
        {"metric identities", metric_identities},
        {"metric fixtures", metric_fixtures},
        {"fit recovery in loss space", fit_recovery},
        {"presets", presets},
        {"determinism", determinism},
        {"random-walk selection distribution", selection_distribution},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::printf("[%s] %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
