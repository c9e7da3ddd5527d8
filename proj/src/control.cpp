#include "qvi/control.hpp"

#include <cmath>

namespace qvi {

QuadraticObjective QuadraticObjective::tracking(Primal y_d, double alpha, int dim_u) {
  if (!(alpha > 0.0)) throw Error("objective: alpha must be positive");
  QuadraticObjective o;
  o.w_y = Eigen::MatrixXd::Identity(y_d.dim(), y_d.dim());
  o.w_u = Eigen::MatrixXd::Identity(dim_u, dim_u);
  o.y_d = std::move(y_d);
  o.alpha = alpha;
  return o;
}

double QuadraticObjective::value(const Primal& y, const Primal& u) const {
  Eigen::VectorXd dy = y.coords - y_d.coords;
  return 0.5 * dy.dot(w_y * dy) + 0.5 * alpha * u.coords.dot(w_u * u.coords);
}

Functional QuadraticObjective::gradY(const Primal& y) const {
  return Functional(w_y * (y.coords - y_d.coords));
}

Functional QuadraticObjective::gradU(const Primal& u) const {
  return Functional(alpha * (w_u * u.coords));
}

StationarityCertificate recoverMultipliers(const ControlProblem& cp, const Primal& y_bar,
                                           const Primal& u_bar, const Linearization& lin,
                                           double tol) {
  const int nv = cp.qvi.space->dim();
  Functional j_y = cp.objective.gradY(y_bar);
  Functional j_u = cp.objective.gradU(u_bar);

  // gradient equation J_u - B* p = 0, solved in the least-squares sense
  Eigen::MatrixXd bt = cp.b_ctrl.transpose();  // dim(U) x dim(V)
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(bt);
  if (cod.rank() < nv)
    throw Error("recoverMultipliers: b_ctrl is rank deficient (dense-range model)");
  StationarityCertificate cert;
  cert.p = Primal(cod.solve(j_u.coords));
  cert.res_gradient = cp.control_space.dualNorm(
      Functional(j_u.coords - bt * cert.p.coords));

  // adjoint equation J_y + A'(y)* p + (I - Phi'(y))* mu = 0
  Eigen::MatrixXd i_minus_t =
      (Eigen::MatrixXd::Identity(nv, nv) - lin.phi_jac).transpose();
  Eigen::VectorXd rhs = j_y.coords + lin.a_jac.transpose() * cert.p.coords;
  cert.mu = Functional(-i_minus_t.partialPivLu().solve(rhs));
  cert.res_adjoint = cp.qvi.space->dualNorm(
      Functional(rhs + i_minus_t * cert.mu.coords));

  const double scale =
      1.0 + cp.qvi.space->dualNorm(j_y) + cp.qvi.space->norm(cert.p);
  cert.p_in_minus_cone = lin.cone.negated().contains(*cp.qvi.space, cert.p, tol, scale);
  cert.mu_in_polar = inPolar(*cp.qvi.space, lin.cone, cert.mu, tol, scale);
  return cert;
}

bool checkStrongStationarity(const StationarityCertificate& cert, double tol) {
  return cert.res_adjoint <= tol && cert.res_gradient <= tol && cert.p_in_minus_cone &&
         cert.mu_in_polar;
}

double checkBStationarity(const ControlProblem& cp, const Primal& y_bar,
                          const Primal& u_bar, const Linearization& lin, int n_dirs,
                          std::mt19937_64& rng, double deriv_tol) {
  Functional j_y = cp.objective.gradY(y_bar);
  Functional j_u = cp.objective.gradU(u_bar);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int nu = cp.control_space.dim();
  double min_lhs = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_dirs; ++k) {
    Eigen::VectorXd hc(nu);
    do {
      for (int i = 0; i < nu; ++i) hc[i] = nd(rng);
    } while (hc.norm() == 0.0);
    Primal h(hc);
    h.coords /= cp.control_space.norm(h);
    Functional bh(cp.b_ctrl * h.coords);
    Primal x = directionalDerivative(*cp.qvi.space, lin, bh, deriv_tol);
    min_lhs = std::min(min_lhs, pairing(j_y, x) + pairing(j_u, h));
  }
  return min_lhs;
}

QviSolution solveState(const ControlProblem& cp, const Primal& u, double tol) {
  QviProblem p = cp.qvi;
  p.f = Functional(cp.qvi.f.coords + cp.b_ctrl * u.coords);
  QviOptions opts;
  opts.tol = tol;
  return solveQvi(p, opts);
}

namespace {

// Riesz representative in U of h -> <J_y, x(B h)> + <J_u, h>, computed with
// the biactive coordinates pinned (valid gradient wherever the derivative
// map is linear).
Primal reducedGradient(const ControlProblem& cp, const QviSolution& sol,
                       const Linearization& lin) {
  const int nv = cp.qvi.space->dim();
  Functional j_y = cp.objective.gradY(sol.y);

  std::vector<int> free;
  for (int i = 0; i < nv; ++i)
    if (lin.cone.status[i] == CoordStatus::Free) free.push_back(i);

  Eigen::VectorXd v1 = lin.i_minus_phi_jac_inv.transpose() * j_y.coords;
  Eigen::VectorXd v2 = Eigen::VectorXd::Zero(nv);
  if (!free.empty()) {
    const int nf = static_cast<int>(free.size());
    Eigen::MatrixXd bf(nf, nf);
    Eigen::VectorXd v1f(nf);
    for (int a = 0; a < nf; ++a) {
      v1f[a] = v1[free[a]];
      for (int b = 0; b < nf; ++b) bf(a, b) = lin.b_jac(free[a], free[b]);
    }
    Eigen::VectorXd v2f = bf.transpose().partialPivLu().solve(v1f);
    for (int a = 0; a < nf; ++a) v2[free[a]] = v2f[a];
  }
  // the J_u part is added by the caller
  return Primal(Eigen::VectorXd(cp.b_ctrl.transpose() * v2));
}

}  // namespace

DescentResult solveControlDescent(const ControlProblem& cp, const Primal& u0, int steps,
                                  const StepRule& rule, double state_tol) {
  DescentResult res;
  res.u = u0;
  QviSolution sol = solveState(cp, res.u, state_tol);
  double obj = cp.objective.value(sol.y, res.u);
  res.objective_history.push_back(obj);

  for (int it = 0; it < steps; ++it) {
    Linearization lin = linearize(cp.qvi, sol);
    Primal g_state = reducedGradient(cp, sol, lin);
    Eigen::VectorXd g_star = g_state.coords + cp.objective.gradU(res.u).coords;
    Primal g = cp.control_space.riesz(Functional(g_star));
    const double g2 = g_star.dot(g.coords);
    res.grad_norm = std::sqrt(std::max(0.0, g2));
    if (res.grad_norm <= rule.grad_tol) break;

    double s = rule.initial;
    bool accepted = false;
    for (int bt = 0; bt < rule.max_backtracks; ++bt) {
      Primal u_try(res.u.coords - s * g.coords);
      QviSolution sol_try = solveState(cp, u_try, state_tol);
      const double obj_try = cp.objective.value(sol_try.y, u_try);
      if (obj_try <= obj - rule.armijo * s * g2) {
        res.u = std::move(u_try);
        sol = std::move(sol_try);
        obj = obj_try;
        res.objective_history.push_back(obj);
        accepted = true;
        break;
      }
      s *= rule.shrink;
    }
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }
  }
  res.y = sol.y;
  return res;
}

}  // namespace qvi
