#include "qvi/sensitivity.hpp"

#include <cmath>

namespace qvi {

Linearization linearize(const QviProblem& p, const QviSolution& sol, double tol_act,
                        double tol_lam) {
  const int n = p.space->dim();
  Linearization lin;
  lin.y_bar = sol.y;
  lin.z_bar = sol.z;
  lin.lam_bar = sol.lam;
  lin.a_jac = p.a_op.jacobian(sol.y);
  lin.phi_jac = p.phi.jacobian(sol.y);
  Eigen::MatrixXd i_minus = Eigen::MatrixXd::Identity(n, n) - lin.phi_jac;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(i_minus);
  if (std::abs(lu.determinant()) < 1e-300)
    throw Error("linearize: I - Phi'(y) is singular");
  lin.i_minus_phi_jac_inv = lu.inverse();
  lin.b_jac = lin.a_jac * lin.i_minus_phi_jac_inv;
  auto [mu, lip] = estimateConstants(*p.space, lin.b_jac);
  if (!(mu > 0.0))
    throw ConditionViolated("linearize: B'(z) is not coercive");
  lin.b_jac_cert = Certificate(mu, lip);
  lin.cone = criticalCone(*p.space, p.set_k, sol.z, sol.lam, tol_act, tol_lam);
  return lin;
}

Primal directionalDerivative(const Space& space, const Linearization& lin,
                             const Functional& h, double tol) {
  Primal w = solveLinearViOnCone(space, lin.b_jac, &lin.b_jac_cert, lin.cone, h, tol);
  return Primal(lin.i_minus_phi_jac_inv * w.coords);
}

std::vector<FdEntry> fdCheck(const QviProblem& p, const QviSolution& sol,
                             const Linearization& lin, const Functional& h,
                             const std::vector<double>& t_list, double solver_tol) {
  Primal x = directionalDerivative(*p.space, lin, h, solver_tol / 10.0);
  std::vector<FdEntry> out;
  out.reserve(t_list.size());
  for (double t : t_list) {
    QviProblem pt = p;
    pt.f = Functional(p.f.coords + t * h.coords);
    QviOptions opts;
    opts.tol = solver_tol;
    QviSolution st = solveQvi(pt, opts);
    Primal quot((st.y.coords - sol.y.coords) / t);
    out.push_back({t, p.space->norm(Primal(quot.coords - x.coords))});
  }
  return out;
}

bool verifyLinearizedQvi(const Space& space, const Linearization& lin, const Primal& x,
                         const Functional& h, double tol, std::mt19937_64& rng,
                         int n_samples) {
  Primal w(x.coords - lin.phi_jac * x.coords);
  const double scale = 1.0 + space.norm(x);
  if (!lin.cone.contains(space, w, tol, scale)) return false;
  // residual of <A'(y) x - h, v - x> >= 0 over v in cone + Phi'(y) x,
  // equivalently <B' w - h, c - w> >= 0 over cone elements c
  Functional res(lin.a_jac * x.coords - h.coords);
  ConvexSet cone_set = lin.cone.toSet();
  for (int k = 0; k <= n_samples; ++k) {
    Primal c = k == 0 ? Primal(Eigen::VectorXd::Zero(space.dim()))
                      : sampleFeasible(space, cone_set, rng, scale);
    const double lhs = pairing(res, Primal(c.coords - w.coords));
    if (lhs < -tol * (1.0 + space.norm(c)) * (1.0 + space.dualNorm(res))) return false;
  }
  return true;
}

}  // namespace qvi
