#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nbody/results_csv.hpp"

namespace nbody {

// Markdown tables from sweep rows: best GFLOPS per series by N, then the
// SoA/AoS ratio, single/double ratio, parallel speedup and parallel
// efficiency. Only rows with status ok contribute. When a key appears more
// than once the last row wins.
std::string render_report(const std::vector<ResultRow>& rows);

// Reads and renders a results CSV; malformed rows raise CsvError with line
// numbers.
std::string render_report(const std::filesystem::path& csv_path);

// Fixed three-decimal rendering used in every table cell.
std::string format_cell(double value);

}  // namespace nbody
