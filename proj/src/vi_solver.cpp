#include "qvi/vi_solver.hpp"

#include <cmath>

namespace qvi {

namespace {

Primal fixedPointStep(const ViProblem& p, const Primal& z, double tau, double inner_tol) {
  Functional g = p.b_op(z, inner_tol);
  Eigen::VectorXd r = g.coords - p.f->coords;
  Primal pre(z.coords - tau * p.space->riesz(Functional(r)).coords);
  return project(*p.space, *p.set, pre);
}

}  // namespace

double naturalResidual(const ViProblem& p, const Primal& z) {
  const double tau0 = p.cert.mu / (p.cert.lip * p.cert.lip);
  Primal next = fixedPointStep(p, z, tau0, 1e-13);
  return p.space->norm(Primal(z.coords - next.coords));
}

SolveReport solveVi(const ViProblem& p, double tol, int max_iter, const Primal* warm_start) {
  const double mu = p.cert.mu, lip = p.cert.lip;
  const double tau = mu / (lip * lip);
  const double factor2 = 1.0 - 2.0 * tau * mu + tau * tau * lip * lip;
  if (!(factor2 < 1.0))
    throw NotContraction("solveVi: derived contraction factor >= 1");
  const double inner_tol = tol / 10.0;

  SolveReport rep;
  Primal z = warm_start ? *warm_start
                        : project(*p.space, *p.set,
                                  Primal(Eigen::VectorXd::Zero(p.space->dim())));
  double contraction = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Primal next = fixedPointStep(p, z, tau, inner_tol);
    const double r = p.space->norm(Primal(z.coords - next.coords));
    if (!rep.residual_history.empty()) {
      const double prev = rep.residual_history.back();
      // ratios near rounding noise carry no contraction information
      if (prev > 100.0 * tol) contraction = std::max(contraction, r / prev);
    }
    rep.residual_history.push_back(r);
    z = next;
    rep.iterations = it + 1;
    if (r <= tol) {
      rep.solution = z;
      rep.contraction_estimate = contraction;
      rep.status = SolveStatus::Converged;
      return rep;
    }
  }
  rep.solution = z;
  rep.contraction_estimate = contraction;
  rep.status = SolveStatus::MaxIterations;
  return rep;
}

Primal solveLinearViOnCone(const Space& space, const Eigen::MatrixXd& b_lin,
                           const Certificate* cert, const CriticalConeRep& cone,
                           const Functional& h, double tol) {
  const int n = space.dim();
  if (b_lin.rows() != n || b_lin.cols() != n)
    throw DimensionMismatch("solveLinearViOnCone: matrix size");

  Certificate c = cert ? *cert : [&] {
    auto [mu, lip] = estimateConstants(space, b_lin);
    if (!(mu > 0.0))
      throw ConditionViolated("solveLinearViOnCone: linearization is not coercive");
    return Certificate(mu, lip);
  }();

  bool subspace = true;
  for (CoordStatus s : cone.status)
    if (s == CoordStatus::Nonneg || s == CoordStatus::Nonpos) subspace = false;

  if (subspace) {
    // cone = {w : w_Z = 0}: the VI is the linear equation (B w - h)_F = 0
    std::vector<int> free;
    for (int i = 0; i < n; ++i)
      if (cone.status[i] == CoordStatus::Free) free.push_back(i);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    if (!free.empty()) {
      const int nf = static_cast<int>(free.size());
      Eigen::MatrixXd bf(nf, nf);
      Eigen::VectorXd hf(nf);
      for (int a = 0; a < nf; ++a) {
        hf[a] = h.coords[free[a]];
        for (int b = 0; b < nf; ++b) bf(a, b) = b_lin(free[a], free[b]);
      }
      Eigen::VectorXd wf = bf.partialPivLu().solve(hf);
      for (int a = 0; a < nf; ++a) w[free[a]] = wf[a];
    }
    return Primal(w);
  }

  ConvexSet cone_set = cone.toSet();
  ViProblem vp;
  vp.space = &space;
  vp.b_op = [&b_lin](const Primal& z, double) { return Functional(b_lin * z.coords); };
  vp.cert = c;
  vp.set = &cone_set;
  vp.f = &h;
  SolveReport rep = solveVi(vp, tol);
  if (!rep.ok()) throw SolverFailure("solveLinearViOnCone: VI solve did not converge");
  return rep.solution;
}

}  // namespace qvi
