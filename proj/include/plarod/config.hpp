#pragma once

#include <json.hpp>
#include <string>

#include "plarod/forces.hpp"
#include "plarod/geometry.hpp"
#include "plarod/solver.hpp"

namespace plarod {

/// One run = one config file (JSON).
struct RunConfig {
  PlateDomain plate_domain;
  RodDomain rod_domain;
  int plate_nx = 8, plate_ny = 8;
  int rod_elems = 8;
  int plate_gauss = 4, rod_gauss = 3;
  MaterialParams material;
  ForceData forces;
  AdmissibilityThresholds thresholds;  // zero => defaults from the material
  SolveOptions solver;
  int multistart = 0;
  double multistart_scale = 1e-2;
  std::vector<double> sweep_deltas = {0.2, 0.1, 0.05};
  int sweep_n = 4;
  int sweep_quad_order = 4;
  double sweep_edge_width = 0.4;
  std::string out_dir = "out";

  nlohmann::json echo;  // normalized config (defaults filled, keys sorted)
};

/// Throws std::invalid_argument with the offending block/field named.
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j, const std::string& base_dir);

}  // namespace plarod
