#pragma once

#include <string>
#include <vector>

#include "plarod/limit_model.hpp"

namespace plarod {

struct SolveOptions {
  double grad_tol = 1e-10;
  int max_iters = 200;
  double armijo_c = 1e-4;     // in (0, 1/2]
  double backtrack = 0.5;     // in (0, 1)
  double shift_seed = 1e-8;   // first Hessian regularization, scaled by diag
  int threads = 1;

  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations, LineSearchFailure };

struct SolveReport {
  Eigen::VectorXd state_dofs;  // full layout
  double energy = 0.0;
  std::vector<double> grad_norms;   // per evaluated iterate
  std::vector<double> step_sizes;   // accepted line-search steps
  std::vector<double> energies;     // per accepted iterate
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  int hessian_negative_eigs = -1;  // on the free subspace at the final iterate
  bool certified_local_min() const {
    return status == SolveStatus::Converged && hessian_negative_eigs == 0;
  }
};

const char* status_name(SolveStatus s);

/// Damped Newton with Armijo backtracking on the total energy.
SolveReport minimize(const Discretization& disc, const ForceData& fd,
                     const MaterialParams& m, const Eigen::VectorXd& x0,
                     const SolveOptions& opts);

/// Warm-started load stepping: one solve per scale factor (increasing).
/// A failed step is retried from zero and flagged.
struct ContinuationStep {
  double scale = 0.0;
  SolveReport report;
  bool cold_started = false;
};

std::vector<ContinuationStep> continuation_sweep(const Discretization& disc,
                                                 const ForceData& fd,
                                                 const MaterialParams& m,
                                                 const std::vector<double>& scales,
                                                 const SolveOptions& opts);

}  // namespace plarod
