#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace kolmo::cli {

/// Shortest round-trip decimal form of a double; identical bytes on every run.
std::string format_number(double v);

/// Writes a CSV file with the given header and rows of numbers.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot; non-positive values are dropped on log axes.
void write_line_svg(const std::filesystem::path& path, const std::string& title,
                    const std::vector<Series>& series, bool log_x, bool log_y);

/// Heat map of row-major values on an n x n grid, subsampled to at most 64 x 64.
void write_heat_svg(const std::filesystem::path& path, const std::string& title, int n,
                    const std::vector<double>& values);

}  // namespace kolmo::cli
