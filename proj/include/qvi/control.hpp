#ifndef QVI_CONTROL_HPP
#define QVI_CONTROL_HPP

#include "qvi/sensitivity.hpp"

namespace qvi {

// Quadratic tracking objective
//   J(y,u) = 1/2 (y - y_d)' W_y (y - y_d) + alpha/2 u' W_u u.
struct QuadraticObjective {
  Primal y_d;
  double alpha = 1.0;
  Eigen::MatrixXd w_y;  // SPD
  Eigen::MatrixXd w_u;  // SPD

  static QuadraticObjective tracking(Primal y_d, double alpha, int dim_u);

  double value(const Primal& y, const Primal& u) const;
  Functional gradY(const Primal& y) const;
  Functional gradU(const Primal& u) const;
};

// min J(y,u) subject to the QVI with right-hand side b_ctrl u + f.
struct ControlProblem {
  QviProblem qvi;       // qvi.f is the fixed offset
  Space control_space;  // U
  Eigen::MatrixXd b_ctrl;  // dim(V) x dim(U), U -> V* coordinates
  QuadraticObjective objective;
};

struct StationarityCertificate {
  Primal p;
  Functional mu;
  double res_adjoint = 0.0;
  double res_gradient = 0.0;
  bool p_in_minus_cone = false;
  bool mu_in_polar = false;
};

// Multipliers of the strong-stationarity system at (y, u): p from the
// gradient equation by least squares, mu from the adjoint equation (which it
// solves exactly); cone flags evaluated against the critical cone.
StationarityCertificate recoverMultipliers(const ControlProblem& cp, const Primal& y_bar,
                                           const Primal& u_bar, const Linearization& lin,
                                           double tol = 1e-8);

bool checkStrongStationarity(const StationarityCertificate& cert, double tol = 1e-8);

// Minimum over n_dirs random unit control directions of the first-order
// objective change <J_y, S'(.; B h)> + <J_u, h>.
double checkBStationarity(const ControlProblem& cp, const Primal& y_bar,
                          const Primal& u_bar, const Linearization& lin, int n_dirs,
                          std::mt19937_64& rng, double deriv_tol = 1e-12);

// Solves the QVI at f = b_ctrl u + f0 and returns (y, objective value).
QviSolution solveState(const ControlProblem& cp, const Primal& u, double tol = 1e-10);

struct StepRule {
  double initial = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 50;
  double grad_tol = 1e-9;
};

struct DescentResult {
  Primal u;
  Primal y;
  std::vector<double> objective_history;
  double grad_norm = 0.0;
  bool line_search_failed = false;
};

// Projected-gradient-free descent on the reduced objective; the gradient is
// the Riesz representative of h -> lhs(h) on the subspace where the
// derivative map is linear.  Produces stationarity candidates only.
DescentResult solveControlDescent(const ControlProblem& cp, const Primal& u0, int steps,
                                  const StepRule& rule = {}, double state_tol = 1e-10);

}  // namespace qvi

#endif
