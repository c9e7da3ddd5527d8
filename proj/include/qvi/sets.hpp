#ifndef QVI_SETS_HPP
#define QVI_SETS_HPP

#include <memory>
#include <random>
#include <variant>
#include <vector>

#include "qvi/space.hpp"

namespace qvi {

enum class CoordStatus { Free, Zero, Nonneg, Nonpos };

// Polyhedral convex sets.  Box bounds may be +-infinity; Translate realizes
// the moving set K + c; Span is a linear subspace spanned by given vectors;
// CoordCone is a cone described coordinatewise.
class ConvexSet {
 public:
  struct Box {
    Eigen::VectorXd lower, upper;
  };
  struct Translate {
    std::shared_ptr<const ConvexSet> base;
    Eigen::VectorXd offset;
  };
  struct Span {
    Eigen::MatrixXd basis;  // columns
  };
  struct CoordCone {
    std::vector<CoordStatus> status;
  };
  struct WholeSpace {
    int dim;
  };

  static ConvexSet wholeSpace(int dim);
  static ConvexSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static ConvexSet boxUpper(Eigen::VectorXd upper);  // lower = -inf
  static ConvexSet boxLower(Eigen::VectorXd lower);  // upper = +inf
  static ConvexSet translate(ConvexSet base, Eigen::VectorXd offset);
  static ConvexSet span(Eigen::MatrixXd basis);
  static ConvexSet coordCone(std::vector<CoordStatus> status);

  int dim() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

  bool contains(const Space& space, const Primal& x, double tol) const;

 private:
  std::variant<Box, Translate, Span, CoordCone, WholeSpace> v_;
};

// M-norm projection onto the set.  Exact (up to linear-solver precision) in
// finitely many active-set steps for Box/CoordCone with general SPD M.
Primal project(const Space& space, const ConvexSet& set, const Primal& x);

// Critical cone K_K(z, lam) = T_K(z) /\ lam-perp of a Box, represented
// coordinatewise, with activity diagnostics.
struct CriticalConeRep {
  std::vector<CoordStatus> status;
  std::vector<int> active;           // coordinates at a bound
  std::vector<int> strongly_active;  // at a bound with |lam_i| > tol
  std::vector<int> biactive;         // at a bound with lam_i == 0 (degenerate)

  int dim() const { return static_cast<int>(status.size()); }
  bool hasBiactive() const { return !biactive.empty(); }
  ConvexSet toSet() const;
  CriticalConeRep negated() const;
  // Membership of a primal vector, coordinatewise, with absolute tolerance
  // tol * max(norm(x), scale).
  bool contains(const Space& space, const Primal& x, double tol,
                double scale = 0.0) const;
};

// Coordinatewise classification at (z, lam): strongly active -> Zero,
// weakly active -> one-sided, inactive -> Free.  Tolerances are absolute
// after normalizing z and lam.  Throws if z is infeasible or lam has the
// wrong sign on an active coordinate.
CriticalConeRep criticalCone(const Space& space, const ConvexSet& box,
                             const Primal& z, const Functional& lam,
                             double tol_act = 1e-8, double tol_lam = 1e-8);

// True iff <g, v> <= tol * max(dual_norm(g), scale) * norm(v) for all
// generators v of the cone.
bool inPolar(const Space& space, const CriticalConeRep& cone,
             const Functional& g, double tol, double scale = 0.0);

// A feasible point, used by property tests and residual spot checks.
Primal sampleFeasible(const Space& space, const ConvexSet& set,
                      std::mt19937_64& rng, double radius = 1.0);

}  // namespace qvi

#endif
