#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "queuelib/network.hpp"
#include "queuelib/params.hpp"
#include "queuelib/solver.hpp"

namespace queuelib::cli {

// Flat key = value scenario file. Relative paths resolve against the
// directory holding the file.
struct ScenarioConfig {
  std::filesystem::path base = ".";
  std::filesystem::path nodes;
  std::filesystem::path links;
  std::filesystem::path demands;
  std::filesystem::path paths;  // empty: enumerate k shortest paths
  std::size_t k = 3;
  CostOverrides params;
  QueueMode mode = QueueMode::fixed_point;
  Variant variant = Variant::queue_dependent;
  double epsilon = 1e-3;
  int max_iter = 2000;
  std::uint64_t seed = 42;
  std::filesystem::path out = "out";

  // Sets one field from text. Throws InputError naming the key.
  void set(std::string_view key, std::string_view value);
  std::filesystem::path resolve(const std::filesystem::path& p) const;
  SolverOptions solver_options() const;
};

ScenarioConfig parse_config(std::istream& in, const std::filesystem::path& base);
ScenarioConfig load_config(const std::filesystem::path& file);

struct Scenario {
  Network network;
  PathSet path_set;
  SolverOptions options;
};

// Reads every referenced file. Throws InputError naming the missing path
// or the offending rows.
Scenario load_scenario(const ScenarioConfig& config);

}  // namespace queuelib::cli
