#include "apf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "apf/errors.hpp"

namespace apf::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open '" + file.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& file, const std::string& content) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write '" + file.string() + "'");
    out << content;
    if (!out) throw DataError("write failed for '" + file.string() + "'");
}

GridMap load_map_file(const fs::path& file) {
    const auto text = read_text(file);
    try {
        if (text.rfind("type", 0) == 0) return parse_movingai(text);
        return parse_costmap_text(text);
    } catch (const DataError& e) {
        throw DataError(file.string() + ": " + e.what());
    }
}

namespace {

NodeId node_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw DataError("'" + field + "' must be [row, col]");
    return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

json path_to_json(const Path& path) {
    json out = json::array();
    for (const NodeId n : path.nodes) out.push_back({n.row, n.col});
    return out;
}

Path path_from_json(const json& j) {
    if (!j.is_array()) throw DataError("path must be an array of [row, col]");
    Path p;
    for (const auto& n : j) p.nodes.push_back(node_from_json(n, "path node"));
    return p;
}

InstanceFile load_instance(const fs::path& file) {
    json j;
    try {
        j = json::parse(read_text(file));
    } catch (const json::parse_error& e) {
        throw DataError(file.string() + ": " + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("map_path") || !j["map_path"].is_string())
            throw DataError("missing 'map_path'");
        if (!j.contains("source") || !j.contains("target")) throw DataError("missing 'source' or 'target'");
        InstanceFile out{j["map_path"].get<std::string>(),
                         ProblemInstance{load_map_file(file.parent_path() / j["map_path"].get<std::string>()),
                                         node_from_json(j["source"], "source"), node_from_json(j["target"], "target"),
                                         std::nullopt}};
        if (j.contains("reference") && !j["reference"].is_null()) out.instance.reference = path_from_json(j["reference"]);
        validate_instance(out.instance);
        return out;
    } catch (const DataError& e) {
        throw DataError(file.string() + ": " + e.what());
    }
}

void save_instance(const fs::path& file, const std::string& map_path, const ProblemInstance& instance) {
    json j;
    j["map_path"] = map_path;
    j["source"] = {instance.source.row, instance.source.col};
    j["target"] = {instance.target.row, instance.target.col};
    if (instance.reference) j["reference"] = path_to_json(*instance.reference);
    write_text(file, j.dump(1) + "\n");
}

const char* to_string(Termination t) {
    return t == Termination::target_reached ? "target_reached" : "open_exhausted";
}

json outcome_to_json(const SearchOutcome& outcome, bool full_trace) {
    const auto& tr = outcome.trace;
    json j;
    j["terminated_by"] = to_string(outcome.terminated_by);
    j["path"] = outcome.path ? path_to_json(*outcome.path) : json(nullptr);
    j["trace"] = {{"closed", tr.closed_count()},
                  {"expansions", tr.expansions},
                  {"reopenings", tr.reopenings},
                  {"open_final", tr.open_final.size()}};
    if (full_trace) {
        json closed = json::array();
        for (auto i : tr.expansion_order) closed.push_back({tr.node(i).row, tr.node(i).col});
        json nodes = json::array();
        for (std::size_t i = 0; i < tr.cell_count(); ++i) {
            if (tr.messages[i] == kUnset && tr.parents[i] == kNoParent) continue;
            json n{{"node", {tr.node(i).row, tr.node(i).col}},
                   {"message", tr.messages[i]},
                   {"cost", std::isfinite(tr.costs[i]) ? json(tr.costs[i]) : json(nullptr)}};
            if (tr.parents[i] != kNoParent) {
                const auto p = tr.node(static_cast<std::size_t>(tr.parents[i]));
                n["parent"] = {p.row, p.col};
            }
            if (tr.probabilities[i] > 0.0) n["probability"] = tr.probabilities[i];
            nodes.push_back(std::move(n));
        }
        j["trace"]["expansion_order"] = std::move(closed);
        j["trace"]["nodes"] = std::move(nodes);
    }
    return j;
}

namespace {

json params_json(const PafParams& p) {
    return {{"alpha", p.alpha}, {"lambda", p.lambda}, {"kappa", p.kappa}, {"beta", p.beta()}};
}

}  // namespace

json fit_result_to_json(const fit::FitResult& result) {
    json j;
    j["params"] = params_json(result.params);
    j["train_loss"] = result.train_loss;
    j["eval_loss"] = result.eval_loss ? json(*result.eval_loss) : json(nullptr);
    j["evaluations"] = result.evaluations;
    json curve = json::array();
    for (const auto& pt : result.loss_curve)
        curve.push_back({{"alpha", pt.params.alpha}, {"lambda", pt.params.lambda}, {"kappa", pt.params.kappa},
                         {"loss", pt.loss}});
    j["loss_curve"] = std::move(curve);
    return j;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fit_curve_csv(const fit::FitResult& result) {
    std::string out = "step,alpha,lambda,kappa,loss\n";
    for (std::size_t i = 0; i < result.loss_curve.size(); ++i) {
        const auto& pt = result.loss_curve[i];
        out += std::to_string(i) + "," + format_real(pt.params.alpha) + "," + format_real(pt.params.lambda) + "," +
               format_real(pt.params.kappa) + "," + format_real(pt.loss) + "\n";
    }
    return out;
}

json metrics_to_json(const metrics::InstanceMetrics& m) {
    return {{"instance_id", m.instance_id}, {"spr", m.spr}, {"psim", m.psim}, {"asim", m.asim},
            {"cd", m.cd}, {"cd_normalized", m.cd_normalized}, {"hist", m.hist}, {"ep", m.ep},
            {"path_loss", m.path_loss}};
}

std::string metrics_csv_fields(const metrics::InstanceMetrics& m) {
    std::string out;
    for (const double v : {m.spr, m.psim, m.asim, m.cd, m.cd_normalized, m.hist, m.ep, m.path_loss}) {
        if (!out.empty()) out += ',';
        out += format_real(v);
    }
    return out;
}

}  // namespace apf::io
