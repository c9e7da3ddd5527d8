#ifndef QVI_QVI_SOLVER_HPP
#define QVI_QVI_SOLVER_HPP

#include "qvi/vi_solver.hpp"

namespace qvi {

// Find y in K + Phi(y) with <A(y) - f, v - y> >= 0 for all v in K + Phi(y).
struct QviProblem {
  const Space* space = nullptr;
  OperatorSpec a_op;
  MovingMap phi;
  ConvexSet set_k;
  Functional f;
  std::optional<Ball> region_y;
};

struct QviSolution {
  Primal y;
  Primal z;        // (I - Phi)(y), in K
  Functional lam;  // f - A(y), in T_K(z) polar
  SolveReport vi_report;
  double qvi_residual = 0.0;
  bool inside_region = true;  // only meaningful for the localized solver
};

// Options shared by the QVI solvers.
struct QviOptions {
  double tol = 1e-10;
  int max_iter = 500000;
  int max_outer = 10000;
  // Caller-supplied override for the certificate of B = A o (I-Phi)^{-1};
  // when absent: measured constants for linear instances, the composed
  // formula bounds otherwise.
  std::optional<Certificate> cert_b;
  bool skip_uniqueness_check = false;
};

// Certificate used for the composed operator (see QviOptions).
Certificate certificateForB(const QviProblem& p, const QviOptions& opts);

// Reformulation solver: change of variable z = y - Phi(y), solve the VI for
// z over K with B = A o (I - Phi)^{-1}, recover y.
QviSolution solveQvi(const QviProblem& p, const QviOptions& opts = {});

// Picard cross-check: y_{k+1} solves the VI with the frozen set K + Phi(y_k).
QviSolution solveQviSequential(const QviProblem& p, const QviOptions& opts = {});

// Localized solver: Phi replaced by Phi o Proj_Y on the given M-ball region;
// the returned inside_region flag certifies the solution only when true.
QviSolution solveQviLocalized(const QviProblem& p, const QviOptions& opts = {});

// Projection onto a closed M-ball.
Primal projectBall(const Space& space, const Ball& ball, const Primal& x);

}  // namespace qvi

#endif
