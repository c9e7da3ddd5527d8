#ifndef QVI_SENSITIVITY_HPP
#define QVI_SENSITIVITY_HPP

#include "qvi/qvi_solver.hpp"

namespace qvi {

// Data of the solution map linearized at a solved QVI instance.
struct Linearization {
  Primal y_bar, z_bar;
  Functional lam_bar;
  Eigen::MatrixXd a_jac;                // A'(y)
  Eigen::MatrixXd phi_jac;              // Phi'(y)
  Eigen::MatrixXd i_minus_phi_jac_inv;  // (I - Phi'(y))^{-1}
  Eigen::MatrixXd b_jac;                // A'(y) (I - Phi'(y))^{-1}
  Certificate b_jac_cert{1.0, 1.0};     // measured constants of b_jac
  CriticalConeRep cone;                 // K_K(z, f - A(y))
};

Linearization linearize(const QviProblem& p, const QviSolution& sol,
                        double tol_act = 1e-8, double tol_lam = 1e-8);

// Directional derivative of the solution map: solve the linearized VI for w
// over the critical cone, then x = (I - Phi'(y))^{-1} w.
Primal directionalDerivative(const Space& space, const Linearization& lin,
                             const Functional& h, double tol = 1e-12);

struct FdEntry {
  double t;
  double fd_error;
};

// Difference-quotient validation |(S(f + t h) - y)/t - x|_M per t.
std::vector<FdEntry> fdCheck(const QviProblem& p, const QviSolution& sol,
                             const Linearization& lin, const Functional& h,
                             const std::vector<double>& t_list,
                             double solver_tol = 1e-10);

// Checks that x solves the linearized QVI: w = x - Phi'(y) x lies in the
// critical cone and the variational inequality holds on sampled points.
bool verifyLinearizedQvi(const Space& space, const Linearization& lin, const Primal& x,
                         const Functional& h, double tol, std::mt19937_64& rng,
                         int n_samples = 50);

}  // namespace qvi

#endif
