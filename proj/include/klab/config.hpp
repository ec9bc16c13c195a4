#pragma once

// Experiment configs: flat INI-style text, one [section] per concern.
//
//   [model]       kind, m, rank, degrees (comma list)
//   [k]           min, max
//   [quadrature]  base_degree, fiber_degree (-1 = default)
//   [tolerance]   balance, max_iter, route, expansion_points
//   [solver]      method (t_iteration | gradient_flow), step
//   [diagnostics] q, r_bound, ca_order
//   [run]         out, seed, workers
//
// Unknown keys are errors, so a typo cannot silently fall back to a default.

#include "klab/sections.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace klab {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Solver { t_iteration, gradient_flow };

struct ExperimentConfig {
  ModelKind kind = ModelKind::line_bundle_sum_over_p1;
  int m = 1;
  int rank = 2;
  std::vector<int> degrees{0, 1};
  int k_min = 2, k_max = 6;

  int base_degree = -1;
  int fiber_degree = -1;

  double balance_tol = 1e-8;
  int max_iter = 500;
  double route_tol = 1e-5;
  int expansion_points = 4;

  Solver solver = Solver::t_iteration;
  double flow_step = 1.0;

  int q = 1;
  double r_bound = 10.0;
  int ca_order = 4;

  std::string out = "out";
  std::uint64_t seed = 1;
  int workers = 0;  // 0: OpenMP default

  /// Model twisted by k.
  ModelSpace model(int k) const;
  std::vector<int> k_range() const;
};

/// Throws ConfigError naming the line or the section.key at fault.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

}  // namespace klab
