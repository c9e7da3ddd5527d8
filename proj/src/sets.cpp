#include "qvi/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qvi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConvexSet ConvexSet::wholeSpace(int dim) {
  ConvexSet s;
  s.v_ = WholeSpace{dim};
  return s;
}

ConvexSet ConvexSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) throw DimensionMismatch("box: bound sizes differ");
  for (int i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) throw Error("box: empty (lower > upper)");
  ConvexSet s;
  s.v_ = Box{std::move(lower), std::move(upper)};
  return s;
}

ConvexSet ConvexSet::boxUpper(Eigen::VectorXd upper) {
  Eigen::VectorXd lower = Eigen::VectorXd::Constant(upper.size(), -kInf);
  return box(std::move(lower), std::move(upper));
}

ConvexSet ConvexSet::boxLower(Eigen::VectorXd lower) {
  Eigen::VectorXd upper = Eigen::VectorXd::Constant(lower.size(), kInf);
  return box(std::move(lower), std::move(upper));
}

ConvexSet ConvexSet::translate(ConvexSet base, Eigen::VectorXd offset) {
  if (base.dim() != offset.size()) throw DimensionMismatch("translate: offset size");
  ConvexSet s;
  s.v_ = Translate{std::make_shared<const ConvexSet>(std::move(base)), std::move(offset)};
  return s;
}

ConvexSet ConvexSet::span(Eigen::MatrixXd basis) {
  ConvexSet s;
  s.v_ = Span{std::move(basis)};
  return s;
}

ConvexSet ConvexSet::coordCone(std::vector<CoordStatus> status) {
  ConvexSet s;
  s.v_ = CoordCone{std::move(status)};
  return s;
}

int ConvexSet::dim() const {
  return std::visit(
      [](const auto& alt) -> int {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, Box>) return static_cast<int>(alt.lower.size());
        if constexpr (std::is_same_v<T, Translate>) return alt.base->dim();
        if constexpr (std::is_same_v<T, Span>) return static_cast<int>(alt.basis.rows());
        if constexpr (std::is_same_v<T, CoordCone>) return static_cast<int>(alt.status.size());
        if constexpr (std::is_same_v<T, WholeSpace>) return alt.dim;
      },
      v_);
}

namespace {

void statusBounds(const std::vector<CoordStatus>& status, Eigen::VectorXd& lo,
                  Eigen::VectorXd& hi) {
  const int n = static_cast<int>(status.size());
  lo.resize(n);
  hi.resize(n);
  for (int i = 0; i < n; ++i) {
    switch (status[i]) {
      case CoordStatus::Free: lo[i] = -kInf; hi[i] = kInf; break;
      case CoordStatus::Zero: lo[i] = 0; hi[i] = 0; break;
      case CoordStatus::Nonneg: lo[i] = 0; hi[i] = kInf; break;
      case CoordStatus::Nonpos: lo[i] = -kInf; hi[i] = 0; break;
    }
  }
}

Eigen::VectorXd clampToBox(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Primal-dual active-set iteration for min |p - x|_M^2 over a box.  Exact on
// convergence; the stiffness Gram is an M-matrix, for which the iteration
// terminates finitely.
Eigen::VectorXd projectBoxGeneral(const Space& space, const Eigen::VectorXd& lo,
                                  const Eigen::VectorXd& hi, const Eigen::VectorXd& x) {
  const int n = space.dim();
  Eigen::VectorXd p = clampToBox(x, lo, hi);
  const Eigen::VectorXd mx = space.applyGram(Primal(x)).coords;
  Eigen::VectorXd q = mx - space.applyGram(Primal(p)).coords;  // multiplier M(x-p)

  std::vector<signed char> state(n, 0), prev(n, 2);  // 0 free, 1 upper, -1 lower
  const int max_iter = 3 * n + 10;
  for (int iter = 0; iter < max_iter; ++iter) {
    for (int i = 0; i < n; ++i) {
      if (lo[i] == hi[i]) {
        state[i] = 1;
      } else if (std::isfinite(hi[i]) && q[i] + (p[i] - hi[i]) > 0) {
        state[i] = 1;
      } else if (std::isfinite(lo[i]) && q[i] + (p[i] - lo[i]) < 0) {
        state[i] = -1;
      } else {
        state[i] = 0;
      }
    }
    std::vector<int> free;
    free.reserve(n);
    for (int i = 0; i < n; ++i) {
      if (state[i] == 1) p[i] = hi[i];
      else if (state[i] == -1) p[i] = lo[i];
      else free.push_back(i);
    }
    if (!free.empty()) {
      // M_FF p_F = (M x)_F - M_FA p_A
      Eigen::VectorXd p_active = p;
      for (int i : free) p_active[i] = 0.0;
      Eigen::VectorXd rhs_full = mx - space.applyGram(Primal(p_active)).coords;
      Eigen::VectorXd rhs(free.size());
      for (size_t k = 0; k < free.size(); ++k) rhs[static_cast<int>(k)] = rhs_full[free[k]];
      Eigen::VectorXd pf = space.solveReduced(free, rhs);
      for (size_t k = 0; k < free.size(); ++k) p[free[k]] = pf[static_cast<int>(k)];
    }
    q = mx - space.applyGram(Primal(p)).coords;
    if (state == prev) return p;
    prev = state;
    // the state sequence can cycle between two guesses; accept any iterate
    // that already satisfies the KKT conditions (free coordinates have q = 0
    // by the reduced solve)
    const double eps = 1e-11 * std::max(1.0, x.cwiseAbs().maxCoeff());
    bool kkt = true;
    for (int i = 0; i < n; ++i) {
      if (p[i] < lo[i] - eps || p[i] > hi[i] + eps) kkt = false;
      if (state[i] == 1 && q[i] < -eps) kkt = false;
      if (state[i] == -1 && q[i] > eps) kkt = false;
    }
    if (kkt) return clampToBox(p, lo, hi);
  }

  // The active-set updates can cycle for Gram matrices with positive
  // off-diagonal couplings.  Fall back to the projected gradient with step
  // 1/lambda_max(M) (globally convergent) and polish the resulting active
  // set with one reduced solve.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  for (int it = 0; it < 100; ++it) v = space.applyGram(Primal(v)).coords.normalized();
  const double lmax = 1.01 * space.applyGram(Primal(v)).coords.norm() + 1e-300;
  p = clampToBox(x, lo, hi);
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  for (int it = 0; it < 200000; ++it) {
    Eigen::VectorXd g = space.applyGram(Primal(p - x)).coords;
    Eigen::VectorXd next = clampToBox(p - g / lmax, lo, hi);
    const double step = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (step <= 1e-15 * scale) break;
  }
  std::vector<int> free;
  const double eps = 1e-9 * scale;
  for (int i = 0; i < n; ++i)
    if (p[i] > lo[i] + eps && p[i] < hi[i] - eps) free.push_back(i);
  if (!free.empty()) {
    Eigen::VectorXd p_active = p;
    for (int i : free) p_active[i] = 0.0;
    Eigen::VectorXd rhs_full = mx - space.applyGram(Primal(p_active)).coords;
    Eigen::VectorXd rhs(free.size());
    for (size_t k = 0; k < free.size(); ++k) rhs[static_cast<int>(k)] = rhs_full[free[k]];
    Eigen::VectorXd pf = space.solveReduced(free, rhs);
    for (size_t k = 0; k < free.size(); ++k) p[free[k]] = pf[static_cast<int>(k)];
    p = clampToBox(p, lo, hi);
  }
  q = mx - space.applyGram(Primal(p)).coords;
  for (int i = 0; i < n; ++i) {
    const bool at_hi = std::isfinite(hi[i]) && p[i] >= hi[i] - eps;
    const bool at_lo = std::isfinite(lo[i]) && p[i] <= lo[i] + eps;
    if (!at_hi && !at_lo && std::abs(q[i]) > 1e-8 * scale * (1.0 + lmax))
      throw SolverFailure("box projection: active-set iteration did not converge");
    if (at_hi && !at_lo && q[i] < -1e-8 * scale * (1.0 + lmax))
      throw SolverFailure("box projection: active-set iteration did not converge");
    if (at_lo && !at_hi && q[i] > 1e-8 * scale * (1.0 + lmax))
      throw SolverFailure("box projection: active-set iteration did not converge");
  }
  return p;
}

Eigen::VectorXd projectSpan(const Space& space, const Eigen::MatrixXd& basis,
                            const Eigen::VectorXd& x) {
  if (basis.cols() == 0) return Eigen::VectorXd::Zero(x.size());
  Eigen::MatrixXd mb(basis.rows(), basis.cols());
  for (int j = 0; j < basis.cols(); ++j)
    mb.col(j) = space.applyGram(Primal(basis.col(j))).coords;
  Eigen::MatrixXd g = basis.transpose() * mb;
  Eigen::VectorXd rhs = mb.transpose() * x;
  Eigen::VectorXd c = g.completeOrthogonalDecomposition().solve(rhs);
  return basis * c;
}

}  // namespace

Primal project(const Space& space, const ConvexSet& set, const Primal& x) {
  space.requireDim(x.dim(), "project");
  if (set.dim() != space.dim()) throw DimensionMismatch("project: set dimension");
  if (set.as<ConvexSet::WholeSpace>()) return x;
  if (const auto* t = set.as<ConvexSet::Translate>()) {
    Primal shifted(x.coords - t->offset);
    Primal pb = project(space, *t->base, shifted);
    return Primal(pb.coords + t->offset);
  }
  if (const auto* s = set.as<ConvexSet::Span>())
    return Primal(projectSpan(space, s->basis, x.coords));

  Eigen::VectorXd lo, hi;
  if (const auto* b = set.as<ConvexSet::Box>()) {
    lo = b->lower;
    hi = b->upper;
  } else if (const auto* c = set.as<ConvexSet::CoordCone>()) {
    statusBounds(c->status, lo, hi);
  } else {
    throw Error("project: unsupported set variant");
  }
  if (space.isDiagonal()) return Primal(clampToBox(x.coords, lo, hi));
  return Primal(projectBoxGeneral(space, lo, hi, x.coords));
}

bool ConvexSet::contains(const Space& space, const Primal& x, double tol) const {
  const double s = tol * std::max(1.0, space.norm(x));
  if (as<WholeSpace>()) return true;
  if (const auto* t = as<Translate>())
    return t->base->contains(space, Primal(x.coords - t->offset), tol);
  if (as<Span>() || as<Box>() || as<CoordCone>()) {
    if (as<Span>()) return space.norm(Primal(project(space, *this, x).coords - x.coords)) <= s;
    Eigen::VectorXd lo, hi;
    if (const auto* b = as<Box>()) {
      lo = b->lower;
      hi = b->upper;
    } else {
      statusBounds(as<CoordCone>()->status, lo, hi);
    }
    for (int i = 0; i < x.dim(); ++i)
      if (x.coords[i] < lo[i] - s || x.coords[i] > hi[i] + s) return false;
    return true;
  }
  return false;
}

ConvexSet CriticalConeRep::toSet() const { return ConvexSet::coordCone(status); }

CriticalConeRep CriticalConeRep::negated() const {
  CriticalConeRep n = *this;
  for (auto& st : n.status) {
    if (st == CoordStatus::Nonneg) st = CoordStatus::Nonpos;
    else if (st == CoordStatus::Nonpos) st = CoordStatus::Nonneg;
  }
  return n;
}

bool CriticalConeRep::contains(const Space& space, const Primal& x, double tol,
                               double scale) const {
  const double s = tol * std::max({1e-300, space.norm(x), scale});
  for (int i = 0; i < dim(); ++i) {
    const double xi = x.coords[i];
    switch (status[i]) {
      case CoordStatus::Free: break;
      case CoordStatus::Zero:
        if (std::abs(xi) > s) return false;
        break;
      case CoordStatus::Nonneg:
        if (xi < -s) return false;
        break;
      case CoordStatus::Nonpos:
        if (xi > s) return false;
        break;
    }
  }
  return true;
}

CriticalConeRep criticalCone(const Space& space, const ConvexSet& set, const Primal& z,
                             const Functional& lam, double tol_act, double tol_lam) {
  const int n = space.dim();
  Eigen::VectorXd lo, hi;
  if (const auto* b = set.as<ConvexSet::Box>()) {
    lo = b->lower;
    hi = b->upper;
  } else if (set.as<ConvexSet::WholeSpace>()) {
    lo = Eigen::VectorXd::Constant(n, -kInf);
    hi = Eigen::VectorXd::Constant(n, kInf);
  } else {
    throw Error("criticalCone: only Box / WholeSpace sets supported");
  }

  const double sz = std::max(1.0, space.norm(z));
  const double sl = std::max(1.0, space.dualNorm(lam));
  const double eps_act = tol_act * sz;
  const double eps_lam = tol_lam * sl;

  CriticalConeRep cone;
  cone.status.assign(n, CoordStatus::Free);
  for (int i = 0; i < n; ++i) {
    const double zi = z.coords[i];
    if (zi < lo[i] - eps_act || zi > hi[i] + eps_act)
      throw InfeasiblePoint("criticalCone: z violates the box bounds");
    const bool at_lo = std::isfinite(lo[i]) && zi - lo[i] <= eps_act;
    const bool at_hi = std::isfinite(hi[i]) && hi[i] - zi <= eps_act;
    const double li = lam.coords[i];
    if (!at_lo && !at_hi) {
      if (std::abs(li) > eps_lam)
        throw InvalidMultiplier("criticalCone: lam nonzero on inactive coordinate");
      continue;
    }
    cone.active.push_back(i);
    // normal-cone sign: lam <= 0 at a lower bound, lam >= 0 at an upper bound
    if (at_lo && !at_hi && li > eps_lam)
      throw InvalidMultiplier("criticalCone: lam has wrong sign at lower bound");
    if (at_hi && !at_lo && li < -eps_lam)
      throw InvalidMultiplier("criticalCone: lam has wrong sign at upper bound");
    if (std::abs(li) > eps_lam) {
      cone.status[i] = CoordStatus::Zero;
      cone.strongly_active.push_back(i);
    } else {
      cone.biactive.push_back(i);
      if (at_lo && at_hi) cone.status[i] = CoordStatus::Zero;
      else cone.status[i] = at_lo ? CoordStatus::Nonneg : CoordStatus::Nonpos;
    }
  }
  return cone;
}

bool inPolar(const Space& space, const CriticalConeRep& cone, const Functional& g,
             double tol, double scale) {
  const double s = tol * std::max({1e-300, space.dualNorm(g), scale});
  for (int i = 0; i < cone.dim(); ++i) {
    const double gi = g.coords[i];
    const double thr = s * space.coordNorm(i);
    switch (cone.status[i]) {
      case CoordStatus::Free:
        if (std::abs(gi) > thr) return false;
        break;
      case CoordStatus::Zero: break;
      case CoordStatus::Nonneg:
        if (gi > thr) return false;
        break;
      case CoordStatus::Nonpos:
        if (gi < -thr) return false;
        break;
    }
  }
  return true;
}

Primal sampleFeasible(const Space& space, const ConvexSet& set, std::mt19937_64& rng,
                      double radius) {
  std::normal_distribution<double> nd(0.0, radius);
  Eigen::VectorXd r(space.dim());
  for (int i = 0; i < space.dim(); ++i) r[i] = nd(rng);
  if (set.as<ConvexSet::WholeSpace>()) return Primal(r);
  if (const auto* t = set.as<ConvexSet::Translate>()) {
    Primal pb = sampleFeasible(space, *t->base, rng, radius);
    return Primal(pb.coords + t->offset);
  }
  if (const auto* s = set.as<ConvexSet::Span>()) {
    if (s->basis.cols() == 0) return Primal(Eigen::VectorXd::Zero(space.dim()));
    Eigen::VectorXd c(s->basis.cols());
    for (int i = 0; i < c.size(); ++i) c[i] = nd(rng);
    return Primal(s->basis * c);
  }
  Eigen::VectorXd lo, hi;
  if (const auto* b = set.as<ConvexSet::Box>()) {
    lo = b->lower;
    hi = b->upper;
  } else {
    statusBounds(set.as<ConvexSet::CoordCone>()->status, lo, hi);
  }
  return Primal(clampToBox(r, lo, hi));
}

}  // namespace qvi
