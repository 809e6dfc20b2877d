#include "wgqed/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wgqed {

std::string format_number(double v) {
  if (v == 0.0 || std::fpclassify(v) == FP_SUBNORMAL) return "0";  // folds -0 and denormals
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_spectrum_csv(const std::filesystem::path& path, const DirectionalSpectrum& spectrum) {
  std::ostringstream out;
  out << "delta_omega,re_right,im_right,re_left,im_left\n";
  for (Index i = 0; i < spectrum.grid.size(); ++i) {
    out << format_number(spectrum.grid[i]) << ',' << format_number(spectrum.right(i).real())
        << ',' << format_number(spectrum.right(i).imag()) << ','
        << format_number(spectrum.left(i).real()) << ',' << format_number(spectrum.left(i).imag())
        << '\n';
  }
  write_text(path, out.str());
}

Index decimation_stride(Index steps, Index min_samples) {
  if (steps <= min_samples) return 1;
  const Index limit = (steps - 1) / (min_samples - 1);
  Index best = 1;
  for (Index decade = 1; decade <= limit; decade *= 10)
    for (Index m : {1, 2, 5})
      if (m * decade <= limit) best = m * decade;
  return best;
}

std::vector<Index> decimated_rows(Index steps, Index stride) {
  std::vector<Index> rows;
  for (Index i = 0; i < steps; i += stride) rows.push_back(i);
  if (!rows.empty() && rows.back() != steps - 1) rows.push_back(steps - 1);
  return rows;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::vector<Index>& rows, const std::vector<NamedColumn>& extra) {
  const Index n = traj.emitters();
  std::ostringstream out;
  out << 't';
  for (Index j = 1; j <= n; ++j)
    out << ",re_a" << j << ",im_a" << j << ",re_c" << j << ",im_c" << j;
  for (const auto& [name, col] : extra) {
    if (col.size() != traj.steps())
      throw std::invalid_argument("write_trajectory_csv: column '" + name + "' has wrong length");
    out << ',' << name;
  }
  out << '\n';
  for (Index r : rows) {
    out << format_number(traj.times(r));
    for (Index j = 0; j < n; ++j) {
      out << ',' << format_number(traj.a(r, j).real()) << ',' << format_number(traj.a(r, j).imag())
          << ',' << format_number(traj.c(r, j).real()) << ','
          << format_number(traj.c(r, j).imag());
    }
    for (const auto& [name, col] : extra) out << ',' << format_number(col(r));
    out << '\n';
  }
  write_text(path, out.str());
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::values(int col) const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.at(static_cast<std::size_t>(col)));
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0')
        throw std::runtime_error(path.string() + ": not a number: '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw std::runtime_error(path.string() + ": row width does not match the header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text(path, value.dump(2) + "\n");
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in);
}

}  // namespace wgqed
