#ifndef QVI_CASES_HPP
#define QVI_CASES_HPP

#include <map>
#include <memory>
#include <string>

#include "qvi/qvi_solver.hpp"

namespace qvi {

struct Assertion {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct CaseReport {
  std::string name;
  std::map<std::string, double> params;
  std::map<std::string, double> quantities;
  std::vector<Assertion> assertions;
  std::vector<std::string> notes;
  std::vector<std::string> table_columns;
  std::vector<std::vector<double>> table;

  void check(const std::string& what, double value, double expected, double tol);
  bool allPass() const;
};

// Rotation-scaling counterexample: the composed operator loses coercivity
// exactly when lip(Phi) = mu_A/L_A, and the VI on Span{z} has either no
// solution or a full line of them.
CaseReport caseSharpGeneral(double mu_a, double l_a);

// Symmetric counterexample at lip(Phi) = 2 sqrt(mu_A L_A)/(mu_A + L_A) with
// the rank-one Phi = 2/(mu_A+L_A) (A x) x'.  The report also records the
// assertion outcomes for the alternative matrix with mu_A^2 L_A diagonal
// entries, which fails the defining identity unless mu_A = 1.
CaseReport caseSharpSymmetric(double mu_a, double l_a);

// 1D obstacle study: |y_h| in H^1_0 scales like C h^{3/4}, so h -> y_h is
// not Lipschitz at h = 0.
CaseReport caseObstacleProjection(int n_grid, const std::vector<double>& h_list);

// Solution of the obstacle VI (A the Riesz map, unit load, upper bound h):
// the M-projection of A^{-1} f onto {v <= h}.
Primal obstacleSolution(const Space& space, double h, double load = 1.0);
// Load functional of the constant density `load` on the uniform grid.
Functional uniformLoad(const Space& space, double load = 1.0);

// Synthetic moving-obstacle QVI on the 1D grid: A the Riesz map,
// K = {v <= h0}, Phi = alpha * Sigma with Sigma a tridiagonal averaging.
struct ObstacleInstance {
  std::shared_ptr<Space> space;
  QviProblem problem;
  double alpha = 0.0;
  double h0 = 0.0;
};

ObstacleInstance caseMovingObstacle(int n_grid, double alpha, double h0 = 0.02,
                                    double load = 1.0);

}  // namespace qvi

#endif
