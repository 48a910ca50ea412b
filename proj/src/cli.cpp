#include "plarod/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>

#include "plarod/bundle.hpp"
#include "plarod/config.hpp"
#include "plarod/decomposition.hpp"
#include "plarod/limit_model.hpp"
#include "plarod/parallel.hpp"

namespace plarod {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitNonphysical = 4;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct CommonArgs {
  std::string config_path;
  std::string out_dir;         // overrides config when nonempty
  int threads = 1;
  unsigned long long seed = 0;
};

struct LoadedRun {
  RunConfig cfg;
  Discretization disc;
  AdmissibilityReport adm;
};

LoadedRun load_run(const CommonArgs& args) {
  LoadedRun run{load_config(args.config_path), {}, {}};
  if (!args.out_dir.empty()) run.cfg.out_dir = args.out_dir;
  run.disc = make_discretization(run.cfg.plate_domain, run.cfg.rod_domain,
                                 run.cfg.plate_nx, run.cfg.plate_ny,
                                 run.cfg.rod_elems, run.cfg.plate_gauss,
                                 run.cfg.rod_gauss);
  run.adm = check_admissibility(run.cfg.forces, run.disc.plate, run.disc.rod,
                                run.cfg.thresholds);
  if (run.adm.verdict != AdmissibilityReport::Verdict::Admissible)
    std::cerr << "warning: force data verdict is " << verdict_name(run.adm.verdict)
              << " (fp_norm=" << run.adm.fp_norm
              << ", fr3_norm=" << run.adm.fr3_norm << ")\n";
  return run;
}

SolveReport solve_with_multistart(const LoadedRun& run, const CommonArgs& args) {
  SolveOptions opts = run.cfg.solver;
  opts.threads = args.threads;
  SolveReport best = minimize(run.disc, run.cfg.forces, run.cfg.material,
                              Eigen::VectorXd::Zero(run.disc.dm.total), opts);
  std::mt19937_64 rng(args.seed);
  std::uniform_real_distribution<double> dist(-run.cfg.multistart_scale,
                                              run.cfg.multistart_scale);
  for (int k = 0; k < run.cfg.multistart; ++k) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(run.disc.dm.total);
    for (int i : run.disc.dm.free_list) x0(i) = dist(rng);
    SolveReport trial = minimize(run.disc, run.cfg.forces, run.cfg.material, x0, opts);
    const bool better =
        trial.status == SolveStatus::Converged &&
        (best.status != SolveStatus::Converged || trial.energy < best.energy);
    if (better) best = std::move(trial);
  }
  return best;
}

nlohmann::json base_bundle(const LoadedRun& run) {
  nlohmann::json j;
  j["version"] = kToolVersion;
  j["config"] = run.cfg.echo;
  j["admissibility"] = admissibility_json(run.adm);
  return j;
}

void write_bundle(const RunConfig& cfg, const nlohmann::json& bundle) {
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/result.json", bundle.dump(2) + "\n");
}

int cmd_solve(const CommonArgs& args) {
  Timer timer;
  LoadedRun run = load_run(args);
  const SolveReport rep = solve_with_multistart(run, args);
  nlohmann::json bundle = base_bundle(run);
  bundle["solve"] = solve_report_json(rep);
  write_bundle(run.cfg, bundle);
  std::cerr << "solve: status=" << status_name(rep.status)
            << " energy=" << format_double(rep.energy)
            << " iters=" << rep.iterations << " wall=" << timer.seconds()
            << "s\n";
  return rep.status == SolveStatus::Converged ? kExitOk : kExitNoConvergence;
}

int cmd_sweep(const CommonArgs& args) {
  Timer timer;
  LoadedRun run = load_run(args);
  const SolveReport rep = solve_with_multistart(run, args);
  if (rep.status != SolveStatus::Converged) {
    nlohmann::json bundle = base_bundle(run);
    bundle["solve"] = solve_report_json(rep);
    write_bundle(run.cfg, bundle);
    std::cerr << "sweep: solver did not converge\n";
    return kExitNoConvergence;
  }
  LimitState state(run.disc);
  state.dofs = rep.state_dofs;
  const std::vector<SweepRow> rows =
      delta_sweep(state, run.cfg.forces, run.cfg.material, run.cfg.sweep_deltas,
                  run.cfg.sweep_n, run.cfg.sweep_quad_order, args.threads,
                  run.cfg.sweep_edge_width);
  nlohmann::json bundle = base_bundle(run);
  bundle["solve"] = solve_report_json(rep);
  bundle["sweep"] = sweep_rows_json(rows);
  write_bundle(run.cfg, bundle);
  write_text_file(run.cfg.out_dir + "/sweep.csv", sweep_rows_csv(rows));
  bool physical = true;
  for (const auto& r : rows) physical = physical && r.physical;
  std::cerr << "sweep: " << rows.size() << " rows, wall=" << timer.seconds()
            << "s\n";
  return physical ? kExitOk : kExitNonphysical;
}

int cmd_check_forces(const CommonArgs& args) {
  LoadedRun run = load_run(args);
  nlohmann::json bundle = base_bundle(run);
  write_bundle(run.cfg, bundle);
  std::cout << bundle["admissibility"].dump(2) << "\n";
  return kExitOk;
}

int cmd_decompose(const std::string& field_path, const std::string& out_dir) {
  const SampledField3D field = read_sampled_field(field_path);
  nlohmann::json j;
  j["version"] = kToolVersion;
  j["field"] = field_path;
  if (field.kind == SampledField3D::Kind::Plate) {
    const DecomposedPlate dec = decompose_plate(field);
    j["kind"] = "plate";
    j["max_reconstruction_residual"] = dec.max_reconstruction_residual;
    j["max_moment0"] = dec.max_moment0;
    j["max_moment1"] = dec.max_moment1;
    j["Gs"] = seminorm_Gs(field);
  } else {
    const DecomposedRod dec = decompose_rod(field);
    j["kind"] = "rod";
    j["max_reconstruction_residual"] = dec.max_reconstruction_residual;
    j["rms_warping"] = dec.rms_warping;
    j["max_identity_residual"] = dec.max_identity_residual;
    j["degenerate_sections"] = dec.degenerate;
    j["dist"] = seminorm_dist(field);
  }
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/decomposition.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"limit model of a thin plate with a perpendicular rod"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string field_path;
  std::string decompose_out = "out";

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", args.config_path, "config file (JSON)")
          ->required();
    cmd->add_option("--out", args.out_dir, "output directory override");
    cmd->add_option("--threads", args.threads, "worker threads");
    cmd->add_option("--seed", args.seed, "multi-start RNG seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "minimize the limit energy");
  add_common(solve, true);
  CLI::App* sweep =
      app.add_subcommand("sweep", "solve, then run the delta-sweep verification");
  add_common(sweep, true);
  CLI::App* check =
      app.add_subcommand("check-forces", "evaluate the admissibility conditions");
  add_common(check, true);
  CLI::App* dec = app.add_subcommand("decompose", "decompose a sampled 3D field");
  dec->add_option("--field", field_path, "sampled field file")->required();
  dec->add_option("--out", decompose_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (check->parsed()) return cmd_check_forces(args);
    if (dec->parsed()) return cmd_decompose(field_path, decompose_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace plarod
