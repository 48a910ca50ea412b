#include "plarod/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace plarod {

void SolveOptions::validate() const {
  if (!(grad_tol > 0)) throw std::invalid_argument("solver: grad_tol > 0");
  if (max_iters < 0) throw std::invalid_argument("solver: max_iters >= 0");
  if (!(armijo_c > 0 && armijo_c <= 0.5))
    throw std::invalid_argument("solver: armijo constant in (0, 1/2]");
  if (!(backtrack > 0 && backtrack < 1))
    throw std::invalid_argument("solver: backtracking factor in (0,1)");
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iter";
    case SolveStatus::LineSearchFailure: return "line-search-failure";
  }
  return "unknown";
}

namespace {

double energy_at(const Discretization& disc, const ForceData& fd,
                 const MaterialParams& m, const Eigen::VectorXd& x,
                 int threads) {
  AssemblyOptions o;
  o.threads = threads;
  return assemble(disc.plate, disc.rod, disc.dm, x, &fd, m, o).energy;
}

int count_negative_eigs(const Eigen::SparseMatrix<double, Eigen::RowMajor>& H) {
  if (H.rows() == 0) return 0;
  Eigen::MatrixXd D(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D,
                                                    Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, D.cwiseAbs().maxCoeff());
  int neg = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < -1e-10 * scale) ++neg;
  return neg;
}

}  // namespace

SolveReport minimize(const Discretization& disc, const ForceData& fd,
                     const MaterialParams& m, const Eigen::VectorXd& x0,
                     const SolveOptions& opts) {
  opts.validate();
  SolveReport rep;
  Eigen::VectorXd x = x0;
  if (x.size() != disc.dm.total)
    throw std::invalid_argument("minimize: initial state size mismatch");
  for (int d = 0; d < disc.dm.total; ++d)
    if (disc.dm.constrained[d]) x(d) = 0.0;

  AssemblyOptions ao;
  ao.gradient = true;
  ao.hessian = true;
  ao.threads = opts.threads;

  double energy = 0.0;
  rep.status = SolveStatus::MaxIterations;
  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    AssemblyResult ar = assemble(disc.plate, disc.rod, disc.dm, x, &fd, m, ao);
    energy = ar.energy;
    const double gnorm =
        ar.grad.size() ? ar.grad.lpNorm<Eigen::Infinity>() : 0.0;
    rep.grad_norms.push_back(gnorm);
    rep.energies.push_back(energy);
    rep.iterations = iter;
    if (gnorm <= opts.grad_tol) {
      rep.status = SolveStatus::Converged;
      rep.hessian_negative_eigs = count_negative_eigs(ar.hess.m);
      break;
    }
    if (iter == opts.max_iters) break;

    // Newton direction with shift escalation until descent.
    Eigen::SparseMatrix<double> H = ar.hess.m;
    const int n = static_cast<int>(H.rows());
    double diag_scale = 1.0;
    for (int k = 0; k < n; ++k) diag_scale = std::max(diag_scale, std::abs(H.coeff(k, k)));
    double tau = 0.0;
    Eigen::VectorXd dir;
    bool have_dir = false;
    for (int attempt = 0; attempt < 60 && !have_dir; ++attempt) {
      Eigen::SparseMatrix<double> Hs = H;
      if (tau > 0.0) {
        Eigen::SparseMatrix<double> I(n, n);
        I.setIdentity();
        Hs = H + tau * I;
      }
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Hs);
      bool ok = ldlt.info() == Eigen::Success;
      if (ok) {
        // reject indefinite factorizations: they need not give descent
        const auto& Dv = ldlt.vectorD();
        for (int k = 0; k < Dv.size(); ++k)
          if (!(Dv(k) > 0.0)) {
            ok = false;
            break;
          }
      }
      if (ok) {
        dir = ldlt.solve(-ar.grad);
        ok = dir.allFinite() && ar.grad.dot(dir) < 0.0;
      }
      if (ok)
        have_dir = true;
      else
        tau = (tau == 0.0) ? opts.shift_seed * diag_scale : tau * 10.0;
    }
    if (!have_dir) {
      rep.status = SolveStatus::LineSearchFailure;
      break;
    }

    const double slope = ar.grad.dot(dir);
    const double fuzz =
        16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(energy));
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_full_dir = disc.dm.expand(dir);
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd xt = x + alpha * x_full_dir;
      const double et = energy_at(disc, fd, m, xt, opts.threads);
      const bool sufficient = et <= energy + opts.armijo_c * alpha * slope;
      // near the minimum the predicted decrease drops below the energy's
      // floating-point resolution; accept such steps instead of shrinking
      const bool below_roundoff =
          std::abs(alpha * slope) <= fuzz && et <= energy + fuzz;
      if (std::isfinite(et) && (sufficient || below_roundoff)) {
        x = xt;
        rep.step_sizes.push_back(alpha);
        accepted = true;
        break;
      }
      alpha *= opts.backtrack;
    }
    if (!accepted) {
      rep.status = SolveStatus::LineSearchFailure;
      break;
    }
  }

  if (rep.status != SolveStatus::Converged && rep.hessian_negative_eigs < 0) {
    AssemblyOptions ho;
    ho.hessian = true;
    ho.threads = opts.threads;
    rep.hessian_negative_eigs = count_negative_eigs(
        assemble(disc.plate, disc.rod, disc.dm, x, &fd, m, ho).hess.m);
  }
  rep.state_dofs = x;
  rep.energy = energy;
  return rep;
}

std::vector<ContinuationStep> continuation_sweep(
    const Discretization& disc, const ForceData& fd, const MaterialParams& m,
    const std::vector<double>& scales, const SolveOptions& opts) {
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] > scales[i - 1]))
      throw std::invalid_argument("continuation: scale factors must increase");
  std::vector<ContinuationStep> steps;
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(disc.dm.total);
  for (double t : scales) {
    ContinuationStep st;
    st.scale = t;
    const ForceData fs = fd.scaled(t);
    st.report = minimize(disc, fs, m, warm, opts);
    if (st.report.status != SolveStatus::Converged) {
      st.cold_started = true;
      st.report = minimize(disc, fs, m, Eigen::VectorXd::Zero(disc.dm.total), opts);
    }
    warm = st.report.state_dofs;
    steps.push_back(std::move(st));
  }
  return steps;
}

}  // namespace plarod
