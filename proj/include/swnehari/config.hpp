#pragma once

// Flat key = value run configuration. One entry per line, '#' starts a
// comment, whitespace around keys and values is ignored.
//
// Required: dim_n alpha mu p q lambda gamma1 gamma2 beta v0 v_inf
//           box_half_width points_per_axis
// Optional: extremal_tol extremal_max_iter multistart multistart_perturbation
//           solver_tol solver_max_iter slope_tol restarts seed out_dir

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "swnehari/grid.hpp"
#include "swnehari/model.hpp"
#include "swnehari/rayleigh.hpp"
#include "swnehari/solver.hpp"

namespace swnehari {

struct RunConfig {
  ModelParams model;
  GridSpec grid;
  MultistartOptions extremal;
  SolverOptions solver;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  /// Propagates `seed` into the multistart and solver options.
  void apply_seed(std::uint64_t s);
};

/// Throws ConfigError on unknown, duplicate, missing or malformed keys.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config (optimizer keys included).
std::string format_config(const RunConfig& cfg);

void to_json(nlohmann::json& j, const RunConfig& cfg);

}  // namespace swnehari
