#pragma once

// CSV and JSON export. Numbers are written with 12 significant digits and a
// fixed column order so that identical runs give identical files.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wgqed/model.hpp"

namespace wgqed {

std::string format_number(double v);

/// Columns: delta_omega, re_right, im_right, re_left, im_left.
void write_spectrum_csv(const std::filesystem::path& path, const DirectionalSpectrum& spectrum);

/// Step between exported trajectory rows: the largest of 1, 2, 5, 10, 20, 50,
/// ... that still leaves at least `min_samples` rows.
Index decimation_stride(Index steps, Index min_samples = 2000);

/// Row indices exported for a given stride (always includes the last step).
std::vector<Index> decimated_rows(Index steps, Index stride);

using NamedColumn = std::pair<std::string, VectorXd>;

/// Columns: t, then re_a_j, im_a_j, re_c_j, im_c_j per emitter, then `extra`
/// (each sampled at the same rows; full-length vectors).
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::vector<Index>& rows, const std::vector<NamedColumn>& extra);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name; -1 when absent.
  int column(const std::string& name) const;
  std::vector<double> values(int col) const;
};

CsvTable read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

/// Writes `contents` to `path` through a temporary file in the same directory.
void write_text(const std::filesystem::path& path, const std::string& contents);

}  // namespace wgqed
