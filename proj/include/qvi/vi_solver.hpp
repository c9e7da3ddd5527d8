#ifndef QVI_VI_SOLVER_HPP
#define QVI_VI_SOLVER_HPP

#include <functional>
#include <vector>

#include "qvi/operators.hpp"
#include "qvi/sets.hpp"

namespace qvi {

// Find z in K with <B(z) - f, v - z> >= 0 for all v in K, B strongly
// monotone with certified (mu_B, L_B).
struct ViProblem {
  const Space* space = nullptr;
  std::function<Functional(const Primal&, double tol)> b_op;
  Certificate cert;
  const ConvexSet* set = nullptr;
  const Functional* f = nullptr;
};

enum class SolveStatus { Converged, MaxIterations, NonContractive };

struct SolveReport {
  Primal solution;
  int iterations = 0;
  std::vector<double> residual_history;
  double contraction_estimate = 0.0;
  SolveStatus status = SolveStatus::Converged;

  bool ok() const { return status == SolveStatus::Converged; }
};

// |z - Proj_K(z - tau0 riesz(B(z) - f))|_M with the reference step
// tau0 = mu_B / L_B^2; zero exactly at solutions.
double naturalResidual(const ViProblem& p, const Primal& z);

// Projected fixed-point iteration z <- Proj_K(z - tau riesz(B(z) - f)),
// tau = mu_B / L_B^2 (optimal contraction factor sqrt(1 - mu^2/L^2)).
SolveReport solveVi(const ViProblem& p, double tol = 1e-10, int max_iter = 200000,
                    const Primal* warm_start = nullptr);

// Linear VI over a critical cone: w in C, <b_lin w - h, v - w> >= 0 for all
// v in C.  Coordinates with Zero status are eliminated; b_lin must be
// coercive (certificate supplied or measured).
Primal solveLinearViOnCone(const Space& space, const Eigen::MatrixXd& b_lin,
                           const Certificate* cert, const CriticalConeRep& cone,
                           const Functional& h, double tol = 1e-12);

}  // namespace qvi

#endif
