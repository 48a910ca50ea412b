#include "plarod/config.hpp"

#include <filesystem>
#include <fstream>

namespace plarod {

namespace {

using nlohmann::json;

[[noreturn]] void cfg_error(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config error in '" + where + "': " + what);
}

const json& need(const json& j, const std::string& block, const std::string& key) {
  if (!j.contains(key)) cfg_error(block, "missing field '" + key + "'");
  return j.at(key);
}

double need_num(const json& j, const std::string& block, const std::string& key) {
  const json& v = need(j, block, key);
  if (!v.is_number()) cfg_error(block + "." + key, "expected a number");
  return v.get<double>();
}

ScalarField parse_component(const json& v, const std::string& where,
                            const std::string& base_dir, bool allow_table) {
  if (v.is_string()) {
    try {
      return ScalarField::from_expression(v.get<std::string>());
    } catch (const std::exception& e) {
      cfg_error(where, e.what());
    }
  }
  if (v.is_number()) return ScalarField::from_expression(v.dump());
  if (v.is_object() && v.contains("table")) {
    if (!allow_table)
      cfg_error(where, "tables interpolate along the rod axis; plate components must be expressions");
    const std::string rel = v.at("table").get<std::string>();
    const std::filesystem::path p = std::filesystem::path(base_dir) / rel;
    if (!std::filesystem::exists(p))
      cfg_error(where, "table file '" + p.string() + "' does not exist");
    std::ifstream in(p);
    std::vector<double> xs, vs;
    double a, b;
    while (in >> a >> b) {
      xs.push_back(a);
      vs.push_back(b);
    }
    try {
      return ScalarField::from_table(std::move(xs), std::move(vs));
    } catch (const std::exception& e) {
      cfg_error(where, e.what());
    }
  }
  cfg_error(where, "expected an expression string or {\"table\": path}");
}

std::array<ScalarField, 3> parse_field3(const json& block,
                                        const std::string& blockname,
                                        const std::string& key,
                                        const std::string& base_dir,
                                        bool allow_table) {
  std::array<ScalarField, 3> out;
  if (!block.contains(key)) return out;  // defaults to zero
  const json& arr = block.at(key);
  if (!arr.is_array() || arr.size() != 3)
    cfg_error(blockname + "." + key, "expected an array of 3 components");
  for (int i = 0; i < 3; ++i)
    out[static_cast<std::size_t>(i)] = parse_component(
        arr.at(i), blockname + "." + key, base_dir, allow_table);
  return out;
}

json echo_field3(const std::array<ScalarField, 3>& f) {
  json arr = json::array();
  for (const auto& c : f) {
    if (c.tabulated) {
      json t;
      t["table_x"] = c.table_x;
      t["table_v"] = c.table_v;
      arr.push_back(t);
    } else {
      arr.push_back(c.expr.text());
    }
  }
  return arr;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  RunConfig c;

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    if (g.contains("half_width_x")) c.plate_domain.a1 = need_num(g, "geometry", "half_width_x");
    if (g.contains("half_width_y")) c.plate_domain.a2 = need_num(g, "geometry", "half_width_y");
    if (g.contains("rod_length")) c.rod_domain.length = need_num(g, "geometry", "rod_length");
    if (g.contains("clamped_edges")) {
      const json& e = g.at("clamped_edges");
      if (!e.is_array()) cfg_error("geometry.clamped_edges", "expected an array");
      c.plate_domain.clamped = {false, false, false, false};
      for (const auto& name : e) {
        const std::string s = name.get<std::string>();
        if (s == "xmin") c.plate_domain.clamped[kEdgeXMin] = true;
        else if (s == "xmax") c.plate_domain.clamped[kEdgeXMax] = true;
        else if (s == "ymin") c.plate_domain.clamped[kEdgeYMin] = true;
        else if (s == "ymax") c.plate_domain.clamped[kEdgeYMax] = true;
        else cfg_error("geometry.clamped_edges", "unknown edge '" + s + "'");
      }
    }
    try {
      c.plate_domain.validate();
      c.rod_domain.validate();
    } catch (const std::exception& e) {
      cfg_error("geometry", e.what());
    }
  }

  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    if (m.contains("plate_elements")) {
      const json& pe = m.at("plate_elements");
      if (!pe.is_array() || pe.size() != 2)
        cfg_error("mesh.plate_elements", "expected [nx, ny]");
      c.plate_nx = pe.at(0).get<int>();
      c.plate_ny = pe.at(1).get<int>();
    }
    if (m.contains("rod_elements")) c.rod_elems = m.at("rod_elements").get<int>();
    if (m.contains("plate_gauss_order")) c.plate_gauss = m.at("plate_gauss_order").get<int>();
    if (m.contains("rod_gauss_order")) c.rod_gauss = m.at("rod_gauss_order").get<int>();
  }

  if (!j.contains("material")) cfg_error("config", "missing block 'material'");
  {
    const json& m = j.at("material");
    const bool has_eng = m.contains("young") || m.contains("poisson");
    const bool has_lame = m.contains("lambda") || m.contains("mu");
    try {
      if (has_eng && has_lame) {
        const MaterialParams a = lame_from_engineering(
            need_num(m, "material", "young"), need_num(m, "material", "poisson"));
        const MaterialParams b = material_from_lame(
            need_num(m, "material", "lambda"), need_num(m, "material", "mu"));
        MaterialParams both = a;
        both.lambda = need_num(m, "material", "lambda");
        both.mu = need_num(m, "material", "mu");
        if (!material_consistent(both))
          cfg_error("material",
                    "both parameter pairs given but mutually inconsistent");
        (void)b;
        c.material = a;
      } else if (has_eng) {
        c.material = lame_from_engineering(need_num(m, "material", "young"),
                                           need_num(m, "material", "poisson"));
      } else if (has_lame) {
        c.material = material_from_lame(need_num(m, "material", "lambda"),
                                        need_num(m, "material", "mu"));
      } else {
        cfg_error("material", "need {young, poisson} or {lambda, mu}");
      }
    } catch (const std::invalid_argument&) {
      throw;
    }
  }

  if (j.contains("forces")) {
    const json& f = j.at("forces");
    c.forces.f_p = parse_field3(f, "forces", "f_p", base_dir, false);
    c.forces.f_r = parse_field3(f, "forces", "f_r", base_dir, true);
    c.forces.g1 = parse_field3(f, "forces", "g1", base_dir, true);
    c.forces.g2 = parse_field3(f, "forces", "g2", base_dir, true);
  }
  c.forces.rod_length = c.rod_domain.length;

  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    if (t.contains("threshold_p")) c.thresholds.threshold_p = need_num(t, "thresholds", "threshold_p");
    if (t.contains("threshold_r")) c.thresholds.threshold_r = need_num(t, "thresholds", "threshold_r");
  }
  if (c.thresholds.threshold_p <= 0 || c.thresholds.threshold_r <= 0)
    c.thresholds = default_thresholds(c.material, c.rod_domain.length);

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("grad_tol")) c.solver.grad_tol = need_num(s, "solver", "grad_tol");
    if (s.contains("max_iters")) c.solver.max_iters = s.at("max_iters").get<int>();
    if (s.contains("armijo_c")) c.solver.armijo_c = need_num(s, "solver", "armijo_c");
    if (s.contains("backtrack")) c.solver.backtrack = need_num(s, "solver", "backtrack");
    if (s.contains("multistart")) c.multistart = s.at("multistart").get<int>();
    if (s.contains("multistart_scale"))
      c.multistart_scale = need_num(s, "solver", "multistart_scale");
    try {
      c.solver.validate();
    } catch (const std::exception& e) {
      cfg_error("solver", e.what());
    }
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.contains("deltas")) {
      c.sweep_deltas.clear();
      for (const auto& d : s.at("deltas")) c.sweep_deltas.push_back(d.get<double>());
    }
    if (s.contains("n")) c.sweep_n = s.at("n").get<int>();
    if (s.contains("quad_order")) c.sweep_quad_order = s.at("quad_order").get<int>();
    if (s.contains("edge_width")) c.sweep_edge_width = need_num(s, "sweep", "edge_width");
    for (std::size_t i = 0; i + 1 < c.sweep_deltas.size(); ++i)
      if (!(c.sweep_deltas[i] > c.sweep_deltas[i + 1]))
        cfg_error("sweep.deltas", "values must decrease strictly");
    for (double d : c.sweep_deltas)
      if (!(d > 0 && d <= 1.0 / c.sweep_n))
        cfg_error("sweep.deltas", "every delta must satisfy 0 < delta <= 1/n");
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("dir")) c.out_dir = o.at("dir").get<std::string>();
  }

  // normalized echo (defaults filled; nlohmann objects keep keys sorted)
  json e;
  e["geometry"]["half_width_x"] = c.plate_domain.a1;
  e["geometry"]["half_width_y"] = c.plate_domain.a2;
  e["geometry"]["rod_length"] = c.rod_domain.length;
  json edges = json::array();
  const char* names[4] = {"xmin", "xmax", "ymin", "ymax"};
  for (int k = 0; k < 4; ++k)
    if (c.plate_domain.clamped[static_cast<std::size_t>(k)]) edges.push_back(names[k]);
  e["geometry"]["clamped_edges"] = edges;
  e["mesh"]["plate_elements"] = {c.plate_nx, c.plate_ny};
  e["mesh"]["rod_elements"] = c.rod_elems;
  e["mesh"]["plate_gauss_order"] = c.plate_gauss;
  e["mesh"]["rod_gauss_order"] = c.rod_gauss;
  e["material"]["young"] = c.material.young;
  e["material"]["poisson"] = c.material.poisson;
  e["material"]["lambda"] = c.material.lambda;
  e["material"]["mu"] = c.material.mu;
  e["forces"]["f_p"] = echo_field3(c.forces.f_p);
  e["forces"]["f_r"] = echo_field3(c.forces.f_r);
  e["forces"]["g1"] = echo_field3(c.forces.g1);
  e["forces"]["g2"] = echo_field3(c.forces.g2);
  e["thresholds"]["threshold_p"] = c.thresholds.threshold_p;
  e["thresholds"]["threshold_r"] = c.thresholds.threshold_r;
  e["solver"]["grad_tol"] = c.solver.grad_tol;
  e["solver"]["max_iters"] = c.solver.max_iters;
  e["solver"]["armijo_c"] = c.solver.armijo_c;
  e["solver"]["backtrack"] = c.solver.backtrack;
  e["solver"]["multistart"] = c.multistart;
  e["solver"]["multistart_scale"] = c.multistart_scale;
  e["sweep"]["deltas"] = c.sweep_deltas;
  e["sweep"]["n"] = c.sweep_n;
  e["sweep"]["quad_order"] = c.sweep_quad_order;
  e["sweep"]["edge_width"] = c.sweep_edge_width;
  e["output"]["dir"] = c.out_dir;
  c.echo = e;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config error: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("config error: invalid JSON in '" + path +
                                "': " + e.what());
  }
  return config_from_json(j,
                          std::filesystem::path(path).parent_path().string());
}

}  // namespace plarod
