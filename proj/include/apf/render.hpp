#pragma once

#include <optional>
#include <string>

#include "apf/gridmap.hpp"
#include "apf/search.hpp"

namespace apf {

/// One line per row: `#` blocked, `.` free, `*` path, `o` closed but off the
/// path, `S`/`T` endpoints.
[[nodiscard]] std::string render_ascii(const ProblemInstance& instance, const SearchOutcome& outcome);

/// Binary P6 pixmap of the same picture, `scale` pixels per cell.
[[nodiscard]] std::string render_ppm(const ProblemInstance& instance, const SearchOutcome& outcome, int scale = 8);

}  // namespace apf
