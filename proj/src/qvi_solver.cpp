#include "qvi/qvi_solver.hpp"

#include <cmath>
#include <sstream>

namespace qvi {

Primal projectBall(const Space& space, const Ball& ball, const Primal& x) {
  Primal d(x.coords - ball.center.coords);
  const double nd = space.norm(d);
  if (nd <= ball.radius) return x;
  return Primal(ball.center.coords + (ball.radius / nd) * d.coords);
}

Certificate certificateForB(const QviProblem& p, const QviOptions& opts) {
  if (opts.cert_b) return *opts.cert_b;
  if (p.phi.isZero()) return p.a_op.cert();
  const double lp = p.phi.lipPhi();
  if (p.a_op.isLinear() && p.phi.isLinear()) {
    const int n = p.space->dim();
    Eigen::MatrixXd i_minus = Eigen::MatrixXd::Identity(n, n) - p.phi.matrix(n);
    Eigen::MatrixXd b_mat = p.a_op.matrix() * i_minus.inverse();
    auto [mu, lip] = estimateConstants(*p.space, b_mat);
    if (!(mu > 1e-12 * std::max(1.0, lip)))
      throw ConditionViolated("non-coercive composed operator (measured mu <= 0)");
    return Certificate(mu, lip);
  }
  return composedConstants(p.a_op.cert(), lp);
}

namespace {

QviSolution finalize(const QviProblem& p, Primal y, Primal z, SolveReport rep,
                     double recovery_res) {
  QviSolution sol;
  sol.lam = Functional(p.f.coords - p.a_op.eval(y).coords);
  sol.y = std::move(y);
  sol.z = std::move(z);
  sol.qvi_residual = std::max(
      rep.residual_history.empty() ? 0.0 : rep.residual_history.back(), recovery_res);
  sol.vi_report = std::move(rep);
  return sol;
}

}  // namespace

QviSolution solveQvi(const QviProblem& p, const QviOptions& opts) {
  const double lp = p.phi.lipPhi();
  if (!opts.skip_uniqueness_check && !opts.cert_b &&
      !checkUniqueness(p.a_op.cert(), lp).unique)
    throw ConditionViolated("solveQvi: no uniqueness condition holds for (A, Phi)");

  Certificate cert_b = certificateForB(p, opts);

  ViProblem vp;
  vp.space = p.space;
  vp.cert = cert_b;
  vp.set = &p.set_k;
  vp.f = &p.f;
  Eigen::MatrixXd b_mat;
  if (p.a_op.isLinear() && p.phi.isLinear()) {
    const int n = p.space->dim();
    Eigen::MatrixXd i_minus = Eigen::MatrixXd::Identity(n, n) - p.phi.matrix(n);
    b_mat = p.a_op.matrix() * i_minus.inverse();
    vp.b_op = [&b_mat](const Primal& zz, double) { return Functional(b_mat * zz.coords); };
  } else {
    vp.b_op = [&p](const Primal& zz, double tol) {
      return evalB(*p.space, p.a_op, p.phi, zz, tol);
    };
  }

  SolveReport rep = solveVi(vp, opts.tol, opts.max_iter);
  if (!rep.ok()) throw SolverFailure("solveQvi: VI solve did not converge");
  Primal z = rep.solution;
  Primal y = invertIMinusPhi(*p.space, p.phi, z, opts.tol / 10.0);
  const double rec = p.space->norm(
      Primal(z.coords - (y.coords - p.phi.eval(y).coords)));
  return finalize(p, std::move(y), std::move(z), std::move(rep), rec);
}

QviSolution solveQviSequential(const QviProblem& p, const QviOptions& opts) {
  if (!opts.skip_uniqueness_check && !opts.cert_b &&
      !checkUniqueness(p.a_op.cert(), p.phi.lipPhi()).unique)
    throw ConditionViolated("solveQviSequential: no uniqueness condition holds");

  Primal y(Eigen::VectorXd::Zero(p.space->dim()));
  Eigen::VectorXd offset = p.phi.eval(y).coords;
  SolveReport last_rep;
  double step = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    ConvexSet moved = ConvexSet::translate(p.set_k, offset);
    ViProblem vp;
    vp.space = p.space;
    vp.b_op = [&p](const Primal& yy, double) { return p.a_op.eval(yy); };
    vp.cert = p.a_op.cert();
    vp.set = &moved;
    vp.f = &p.f;
    SolveReport rep = solveVi(vp, opts.tol, opts.max_iter, &y);
    if (!rep.ok()) throw SolverFailure("solveQviSequential: inner VI did not converge");
    Primal y_next = rep.solution;
    Eigen::VectorXd offset_next = p.phi.eval(y_next).coords;
    step = p.space->norm(Primal(offset_next - offset));
    y = std::move(y_next);
    offset = std::move(offset_next);
    last_rep = std::move(rep);
    if (step <= opts.tol) {
      Primal z(y.coords - offset);
      return finalize(p, y, std::move(z), std::move(last_rep), 0.0);
    }
  }
  std::ostringstream msg;
  msg << "solveQviSequential: outer iteration did not converge, final step " << step;
  throw MaxIterations(msg.str());
}

QviSolution solveQviLocalized(const QviProblem& p, const QviOptions& opts) {
  if (!p.region_y) throw Error("solveQviLocalized: region_y is required");
  const Ball region = *p.region_y;
  const Space* space = p.space;
  const MovingMap phi_orig = p.phi;
  // Phi-tilde = Phi o Proj_Y stays lip_phi-Lipschitz globally.
  MovingMap phi_tilde = MovingMap::nonlinearMap(
      [space, region, phi_orig](const Eigen::VectorXd& yc) {
        Primal proj = projectBall(*space, region, Primal(yc));
        return phi_orig.eval(proj).coords;
      },
      [space, region, phi_orig](const Eigen::VectorXd& yc) {
        Primal proj = projectBall(*space, region, Primal(yc));
        return phi_orig.jacobian(proj);
      },
      phi_orig.lipPhi(), std::nullopt);

  QviProblem mod = p;
  mod.phi = phi_tilde;
  mod.region_y.reset();
  QviSolution sol = solveQvi(mod, opts);
  const double dist = space->norm(Primal(sol.y.coords - region.center.coords));
  sol.inside_region = dist < region.radius - opts.tol * (1.0 + region.radius);
  // lam must come from the original problem data
  sol.lam = Functional(p.f.coords - p.a_op.eval(sol.y).coords);
  return sol;
}

}  // namespace qvi
