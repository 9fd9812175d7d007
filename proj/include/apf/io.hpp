#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "apf/fit.hpp"
#include "apf/gridmap.hpp"
#include "apf/metrics.hpp"
#include "apf/search.hpp"

namespace apf::io {

[[nodiscard]] std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& content);

/// MovingAI text when the file starts with `type`, cost-map text otherwise.
[[nodiscard]] GridMap load_map_file(const std::filesystem::path& file);

struct InstanceFile {
    std::string map_path;  // as written, relative to the instance file
    ProblemInstance instance;
};

/// Reads {map_path, source:[r,c], target:[r,c], reference:[[r,c],...]} and
/// validates the result.
[[nodiscard]] InstanceFile load_instance(const std::filesystem::path& file);
void save_instance(const std::filesystem::path& file, const std::string& map_path, const ProblemInstance& instance);

[[nodiscard]] nlohmann::json path_to_json(const Path& path);
[[nodiscard]] Path path_from_json(const nlohmann::json& j);

[[nodiscard]] const char* to_string(Termination t);

/// Path, trace summary and, when `full_trace` is set, the dense trace arrays.
[[nodiscard]] nlohmann::json outcome_to_json(const SearchOutcome& outcome, bool full_trace);

[[nodiscard]] nlohmann::json fit_result_to_json(const fit::FitResult& result);
[[nodiscard]] std::string fit_curve_csv(const fit::FitResult& result);

[[nodiscard]] nlohmann::json metrics_to_json(const metrics::InstanceMetrics& m);
/// Fixed-order CSV fields: spr, psim, asim, cd, cd_normalized, hist, ep, path_loss.
[[nodiscard]] std::string metrics_csv_fields(const metrics::InstanceMetrics& m);
[[nodiscard]] std::string format_real(double v);

}  // namespace apf::io
