#include "apf/render.hpp"

#include <array>
#include <vector>

namespace apf {

namespace {

std::vector<char> glyphs(const ProblemInstance& instance, const SearchOutcome& outcome) {
    const GridMap& map = instance.map;
    std::vector<char> g(map.cell_count());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!map.passable(i)) g[i] = '#';
        else if (i < outcome.trace.closed.size() && outcome.trace.closed[i]) g[i] = 'o';
        else g[i] = '.';
    }
    if (outcome.path)
        for (const NodeId n : outcome.path->nodes) g[map.index(n)] = '*';
    g[map.index(instance.source)] = 'S';
    g[map.index(instance.target)] = 'T';
    return g;
}

}  // namespace

std::string render_ascii(const ProblemInstance& instance, const SearchOutcome& outcome) {
    const auto g = glyphs(instance, outcome);
    const auto w = static_cast<std::size_t>(instance.map.width());
    std::string out;
    out.reserve(g.size() + static_cast<std::size_t>(instance.map.height()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.push_back(g[i]);
        if ((i + 1) % w == 0) out.push_back('\n');
    }
    return out;
}

std::string render_ppm(const ProblemInstance& instance, const SearchOutcome& outcome, int scale) {
    if (scale < 1) scale = 1;
    const auto g = glyphs(instance, outcome);
    const int h = instance.map.height();
    const int w = instance.map.width();
    const auto colour = [](char c) -> std::array<unsigned char, 3> {
        switch (c) {
            case '#': return {30, 30, 30};
            case 'o': return {150, 190, 230};
            case '*': return {220, 40, 40};
            case 'S': return {40, 180, 60};
            case 'T': return {240, 170, 20};
            default: return {245, 245, 245};
        }
    };
    std::string out = "P6\n" + std::to_string(w * scale) + " " + std::to_string(h * scale) + "\n255\n";
    for (int r = 0; r < h * scale; ++r) {
        for (int c = 0; c < w * scale; ++c) {
            const auto rgb = colour(g[static_cast<std::size_t>(r / scale) * static_cast<std::size_t>(w) +
                                      static_cast<std::size_t>(c / scale)]);
            out.append(reinterpret_cast<const char*>(rgb.data()), 3);
        }
    }
    return out;
}

}  // namespace apf
