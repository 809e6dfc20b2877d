#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wgqed/model.hpp"

namespace testing {

inline wgqed::EmitterArray array_of(std::vector<double> positions_in_lambda,
                                    double gamma_free = 0.0) {
  wgqed::PhysicalParams p;
  p.gamma_free = gamma_free;
  return wgqed::EmitterArray(std::span<const double>(positions_in_lambda), p);
}

inline wgqed::EmitterArray pair(double gamma_free = 0.0) { return array_of({-0.125, 0.125}, gamma_free); }

inline wgqed::TargetState symmetric(wgqed::Index n = 2) {
  return wgqed::dicke_target(n, std::vector<int>(static_cast<std::size_t>(n), 1));
}

inline wgqed::TargetState antisymmetric() { return wgqed::dicke_target(2, std::vector<int>{1, -1}); }

inline wgqed::TargetState single() { return symmetric(1); }

/// Fresh scratch directory below $WGQED_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("WGQED_TEST_TMP");
  std::filesystem::path dir =
      root && *root ? std::filesystem::path(root) : std::filesystem::temp_directory_path() / "wgqed_tests";
  dir /= name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double max_abs_diff(const wgqed::VectorXcd& x, const wgqed::VectorXcd& y) {
  return (x - y).cwiseAbs().maxCoeff();
}

}  // namespace testing
