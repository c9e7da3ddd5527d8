#include <doctest.h>

#include <random>

#include "qvi/cases.hpp"
#include "qvi/qvi_solver.hpp"

using namespace qvi;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("Phi = 0 reduces to the plain VI") {
  ObstacleInstance inst = caseMovingObstacle(63, 0.0);
  QviOptions opts;
  opts.tol = 1e-11;
  QviSolution sol = solveQvi(inst.problem, opts);

  ViProblem vp;
  vp.space = inst.space.get();
  vp.b_op = [&inst](const Primal& z, double) { return inst.space->applyGram(z); };
  vp.cert = Certificate(1.0, 1.0);
  vp.set = &inst.problem.set_k;
  vp.f = &inst.problem.f;
  SolveReport rep = solveVi(vp, opts.tol);
  REQUIRE(rep.ok());
  CHECK((sol.y.coords - rep.solution.coords).norm() <= 1e-12);
  CHECK((sol.z.coords - sol.y.coords).norm() == 0.0);
  // determinism: a second run is bitwise identical
  QviSolution sol2 = solveQvi(inst.problem, opts);
  CHECK((sol.y.coords - sol2.y.coords).norm() == 0.0);
}

TEST_CASE("unconstrained QVI with scalar Phi") {
  Space e2 = Space::euclidean(2);
  Eigen::Matrix2d am;
  am << 2, 0.5, 0.5, 3;
  QviProblem p;
  p.space = &e2;
  p.a_op = OperatorSpec::linear(am, Certificate(1.9, 3.2));
  p.phi = MovingMap::scalar(0.5);
  p.set_k = ConvexSet::wholeSpace(2);
  p.f = Functional(vec2(1, -2));
  QviOptions opts;
  opts.tol = 1e-12;
  QviSolution sol = solveQvi(p, opts);
  Eigen::Vector2d direct = am.colPivHouseholderQr().solve(Eigen::Vector2d(p.f.coords));
  CHECK((sol.y.coords - direct).norm() <= 1e-10);
  CHECK((sol.z.coords - 0.5 * sol.y.coords).norm() <= 1e-10);
  CHECK((sol.lam.coords - (p.f.coords - am * sol.y.coords)).norm() <= 1e-14);
}

TEST_CASE("scalar moving set over a box") {
  // Phi = 0.2 I, K = [0, inf)^2, A = I: z = clamp(0.8 f), y = z / 0.8
  Space e2 = Space::euclidean(2);
  QviProblem p;
  p.space = &e2;
  p.a_op = OperatorSpec::linear(Eigen::Matrix2d::Identity(), Certificate(1, 1, true));
  p.phi = MovingMap::scalar(0.2);
  p.set_k = ConvexSet::boxLower(Eigen::VectorXd::Zero(2));
  p.f = Functional(vec2(-1, 2));
  QviOptions opts;
  opts.tol = 1e-12;
  QviSolution sol = solveQvi(p, opts);
  CHECK((sol.y.coords - vec2(0, 2)).norm() <= 1e-10);
  CHECK((sol.z.coords - vec2(0, 1.6)).norm() <= 1e-10);

  QviSolution seq = solveQviSequential(p, opts);
  CHECK((seq.y.coords - sol.y.coords).norm() <= 1e-10);
}

TEST_CASE("reformulation and sequential Picard agree on the moving obstacle") {
  ObstacleInstance inst = caseMovingObstacle(63, 0.5);
  QviOptions opts;
  opts.tol = 1e-11;
  QviSolution a = solveQvi(inst.problem, opts);
  QviSolution b = solveQviSequential(inst.problem, opts);
  CHECK(inst.space->norm(Primal(a.y.coords - b.y.coords)) <= 1e-8);
  CHECK(a.qvi_residual <= opts.tol);

  // QVI inequality over random points of K + Phi(y)
  std::mt19937_64 rng(2);
  ConvexSet moved = ConvexSet::translate(inst.problem.set_k,
                                         inst.problem.phi.eval(a.y).coords);
  Functional res(inst.problem.a_op.eval(a.y).coords - inst.problem.f.coords);
  for (int k = 0; k < 100; ++k) {
    Primal v = sampleFeasible(*inst.space, moved, rng, 0.05);
    CHECK(pairing(res, Primal(v.coords - a.y.coords)) >=
          -1e-8 * (1 + inst.space->norm(v)));
  }
}

TEST_CASE("solution map obeys the composed Lipschitz bound") {
  ObstacleInstance inst = caseMovingObstacle(31, 0.3);
  const double lip_phi = inst.problem.phi.lipPhi();
  Certificate cb = composedConstants(inst.problem.a_op.cert(), lip_phi);
  QviOptions opts;
  opts.tol = 1e-11;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  const double bound_factor = (1.0 + 1e-6) / ((1.0 - lip_phi) * cb.mu);
  for (int k = 0; k < 10; ++k) {
    QviProblem p1 = inst.problem, p2 = inst.problem;
    Eigen::VectorXd d1(31), d2(31);
    for (int i = 0; i < 31; ++i) {
      d1[i] = 0.01 * nd(rng);
      d2[i] = 0.01 * nd(rng);
    }
    p1.f = Functional(p1.f.coords + d1);
    p2.f = Functional(p2.f.coords + d2);
    QviSolution s1 = solveQvi(p1, opts);
    QviSolution s2 = solveQvi(p2, opts);
    const double lhs = inst.space->norm(Primal(s1.y.coords - s2.y.coords));
    const double rhs = bound_factor * inst.space->dualNorm(Functional(d1 - d2));
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("non-coercive composed operator is rejected") {
  // rotation-scaling A with lip(Phi) = mu/L: measured mu of B is zero
  const double mu = 1.0, l = 2.0;
  const double c = std::sqrt(l * l - mu * mu);
  Eigen::Matrix2d am;
  am << mu, -c, c, mu;
  Eigen::Vector2d x(1, 0);
  Eigen::Matrix2d phim = (mu / (l * l)) * (am * x) * x.transpose();
  Space e2 = Space::euclidean(2);
  QviProblem p;
  p.space = &e2;
  p.a_op = OperatorSpec::linear(am, Certificate(mu, l));
  p.phi = MovingMap::linearMap(phim, mu / l);
  Eigen::MatrixXd basis = (Eigen::Matrix2d::Identity() - phim) * x;
  p.set_k = ConvexSet::span(basis);
  p.f = Functional(vec2(1, 1));
  QviOptions opts;
  opts.skip_uniqueness_check = true;
  bool threw = false;
  try {
    solveQvi(p, opts);
  } catch (const ConditionViolated& e) {
    threw = true;
    CHECK(std::string(e.what()).find("non-coercive composed operator") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("localized solver and containment flag") {
  Space e1 = Space::euclidean(1);
  auto phi_eval = [](const Eigen::VectorXd& y) {
    return Eigen::VectorXd(0.3 * y.array().square().matrix());
  };
  auto phi_jac = [](const Eigen::VectorXd& y) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 0.6 * y[0];
    return j;
  };
  QviProblem p;
  p.space = &e1;
  p.a_op = OperatorSpec::linear(Eigen::MatrixXd::Identity(1, 1), Certificate(1, 1, true));
  p.phi = MovingMap::nonlinearMap(phi_eval, phi_jac, 0.6,
                                  Ball{Primal(Eigen::VectorXd::Zero(1)), 1.0});
  p.set_k = ConvexSet::boxUpper(Eigen::VectorXd::Zero(1));
  p.region_y = Ball{Primal(Eigen::VectorXd::Zero(1)), 1.0};

  p.f = Functional(Eigen::VectorXd::Constant(1, -0.1));
  QviOptions opts;
  opts.tol = 1e-11;
  opts.skip_uniqueness_check = true;
  opts.cert_b = Certificate(0.2, 4.0);
  QviSolution inside = solveQviLocalized(p, opts);
  CHECK(inside.inside_region);
  CHECK(inside.y.coords[0] == doctest::Approx(-0.1).epsilon(1e-8));

  p.f = Functional(Eigen::VectorXd::Constant(1, -5.0));
  QviSolution outside = solveQviLocalized(p, opts);
  CHECK(!outside.inside_region);
  CHECK(outside.y.coords[0] == doctest::Approx(-5.0).epsilon(1e-8));
}
