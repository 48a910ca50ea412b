#include "plarod/bundle.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace plarod {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json admissibility_json(const AdmissibilityReport& rep) {
  nlohmann::json j;
  j["case1_holds"] = rep.case1_holds;
  j["fr3_norm"] = rep.fr3_norm;
  j["fp_norm"] = rep.fp_norm;
  j["threshold_p"] = rep.threshold_p;
  j["threshold_r"] = rep.threshold_r;
  j["min_Fr3"] = rep.min_Fr3;
  j["verdict"] = verdict_name(rep.verdict);
  return j;
}

nlohmann::json solve_report_json(const SolveReport& rep) {
  nlohmann::json j;
  j["status"] = status_name(rep.status);
  j["energy"] = rep.energy;
  j["iterations"] = rep.iterations;
  j["grad_norms"] = rep.grad_norms;
  j["step_sizes"] = rep.step_sizes;
  j["energies"] = rep.energies;
  j["hessian_negative_eigs"] = rep.hessian_negative_eigs;
  j["certified_local_min"] = rep.certified_local_min();
  return j;
}

nlohmann::json sweep_rows_json(const std::vector<SweepRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["delta"] = r.delta;
    j["n"] = r.n;
    j["elastic"] = r.elastic;
    j["load"] = r.load;
    j["total"] = r.total;
    j["limit_energy"] = r.limit_energy;
    j["gap"] = r.gap;
    j["physical"] = r.physical;
    j["gs_ratio"] = r.gs_ratio;
    j["dist_ratio"] = r.dist_ratio;
    arr.push_back(j);
  }
  return arr;
}

std::string sweep_rows_csv(const std::vector<SweepRow>& rows) {
  std::string out = "delta,n,elastic,load,total,limit_energy,gap\n";
  for (const auto& r : rows) {
    out += format_double(r.delta);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.elastic);
    out += ',';
    out += format_double(r.load);
    out += ',';
    out += format_double(r.total);
    out += ',';
    out += format_double(r.limit_energy);
    out += ',';
    out += format_double(r.gap);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace plarod
