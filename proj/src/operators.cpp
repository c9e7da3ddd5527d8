#include "qvi/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qvi {

ThresholdReport checkUniqueness(const Certificate& cert_a, double lip_phi) {
  if (lip_phi < 0.0) throw Error("checkUniqueness: lip_phi must be >= 0");
  ThresholdReport r;
  const double g = cert_a.gamma();
  r.gamma = g;
  r.lip_phi = lip_phi;
  r.noor_oettli = 1.0 - std::sqrt(1.0 - 1.0 / (g * g));
  r.nesterov_scrimali = 1.0 / g;
  r.convex_potential = 2.0 * std::sqrt(g) / (1.0 + g);
  r.ahr = 1.0 / (1.0 + g);
  r.ok_noor_oettli = lip_phi < r.noor_oettli;
  r.ok_nesterov_scrimali = lip_phi < r.nesterov_scrimali;
  r.ok_convex_potential = lip_phi < r.convex_potential;
  r.ok_ahr = lip_phi < r.ahr;
  r.unique = r.ok_nesterov_scrimali ||
             (r.ok_convex_potential && cert_a.has_convex_potential);
  r.ordering_holds = r.ahr < r.noor_oettli && r.noor_oettli < r.nesterov_scrimali &&
                     r.nesterov_scrimali < r.convex_potential;
  return r;
}

Certificate composedConstants(const Certificate& cert_a, double lip_phi) {
  const ThresholdReport t = checkUniqueness(cert_a, lip_phi);
  if (!t.unique)
    throw ConditionViolated("composedConstants: no smallness condition holds");
  const double mu = cert_a.mu, lip = cert_a.lip;
  const double denom = (1.0 + lip_phi) * (1.0 + lip_phi);
  double mu_b = -1.0;
  if (t.ok_nesterov_scrimali) mu_b = (mu - lip * lip_phi) / denom;
  if (cert_a.has_convex_potential && t.ok_convex_potential) {
    const double s = mu + lip;
    const double mu_pot = (4.0 * mu * lip - lip_phi * lip_phi * s * s) / (4.0 * s * denom);
    mu_b = std::max(mu_b, mu_pot);
  }
  const double lip_b = lip / (1.0 - lip_phi);
  // B inherits the potential flag only when Phi is absent.
  return Certificate(mu_b, lip_b, cert_a.has_convex_potential && lip_phi == 0.0);
}

OperatorSpec OperatorSpec::linear(Eigen::MatrixXd matrix, Certificate cert) {
  if (matrix.rows() != matrix.cols()) throw Error("OperatorSpec: matrix must be square");
  if (cert.has_convex_potential) {
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw Error("OperatorSpec: convex potential requires a symmetric matrix");
  }
  OperatorSpec s;
  s.v_ = Linear{std::move(matrix)};
  s.cert_ = cert;
  return s;
}

OperatorSpec OperatorSpec::nonlinear(
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval,
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac, Certificate cert) {
  OperatorSpec s;
  s.v_ = Nonlinear{std::move(eval), std::move(jac)};
  s.cert_ = cert;
  return s;
}

Functional OperatorSpec::eval(const Primal& y) const {
  if (const auto* l = std::get_if<Linear>(&v_)) return Functional(l->m * y.coords);
  return Functional(std::get<Nonlinear>(v_).eval(y.coords));
}

Eigen::MatrixXd OperatorSpec::jacobian(const Primal& y) const {
  if (const auto* l = std::get_if<Linear>(&v_)) return l->m;
  const auto& nl = std::get<Nonlinear>(v_);
  if (!nl.jac) throw Error("OperatorSpec: no Jacobian available");
  return nl.jac(y.coords);
}

const Eigen::MatrixXd& OperatorSpec::matrix() const {
  if (const auto* l = std::get_if<Linear>(&v_)) return l->m;
  throw Error("OperatorSpec::matrix: operator is not linear");
}

MovingMap MovingMap::zero() {
  MovingMap m;
  m.v_ = Zero{};
  m.lip_phi_ = 0.0;
  return m;
}

MovingMap MovingMap::scalar(double lambda) {
  MovingMap m;
  m.v_ = Scalar{lambda};
  m.lip_phi_ = std::abs(lambda);
  return m;
}

MovingMap MovingMap::linearMap(Eigen::MatrixXd matrix, double lip_phi) {
  MovingMap m;
  m.v_ = LinearM{std::move(matrix)};
  m.lip_phi_ = lip_phi;
  return m;
}

MovingMap MovingMap::nonlinearMap(std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval,
                                  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jac,
                                  double lip_phi, std::optional<Ball> region) {
  MovingMap m;
  m.v_ = NonlinearM{std::move(eval), std::move(jac)};
  m.lip_phi_ = lip_phi;
  m.region_ = std::move(region);
  return m;
}

Primal MovingMap::eval(const Primal& y) const {
  if (std::holds_alternative<Zero>(v_)) return Primal(Eigen::VectorXd::Zero(y.dim()));
  if (const auto* s = std::get_if<Scalar>(&v_)) return Primal(s->lambda * y.coords);
  if (const auto* l = std::get_if<LinearM>(&v_)) return Primal(l->m * y.coords);
  return Primal(std::get<NonlinearM>(v_).eval(y.coords));
}

Eigen::MatrixXd MovingMap::jacobian(const Primal& y) const {
  const int n = y.dim();
  if (std::holds_alternative<Zero>(v_)) return Eigen::MatrixXd::Zero(n, n);
  if (const auto* s = std::get_if<Scalar>(&v_))
    return s->lambda * Eigen::MatrixXd::Identity(n, n);
  if (const auto* l = std::get_if<LinearM>(&v_)) return l->m;
  const auto& nl = std::get<NonlinearM>(v_);
  if (!nl.jac) throw Error("MovingMap: no Jacobian available");
  return nl.jac(y.coords);
}

bool MovingMap::isLinear() const { return !std::holds_alternative<NonlinearM>(v_); }

Eigen::MatrixXd MovingMap::matrix(int dim) const {
  if (std::holds_alternative<Zero>(v_)) return Eigen::MatrixXd::Zero(dim, dim);
  if (const auto* s = std::get_if<Scalar>(&v_))
    return s->lambda * Eigen::MatrixXd::Identity(dim, dim);
  if (const auto* l = std::get_if<LinearM>(&v_)) return l->m;
  throw Error("MovingMap::matrix: map is not linear");
}

Primal invertIMinusPhi(const Space& space, const MovingMap& phi, const Primal& z,
                       double tol, int max_iter) {
  if (phi.isZero()) return z;
  if (!(phi.lipPhi() < 1.0))
    throw NotContraction("invertIMinusPhi: lip(Phi) >= 1");
  Primal x = z;
  for (int it = 0; it <= max_iter; ++it) {
    Primal phix = phi.eval(x);
    const double r = space.norm(Primal(x.coords - phix.coords - z.coords));
    if (r <= tol) return x;
    x = Primal(z.coords + phix.coords);
  }
  throw MaxIterations("invertIMinusPhi: fixed-point iteration did not converge");
}

Functional evalB(const Space& space, const OperatorSpec& a, const MovingMap& phi,
                 const Primal& z, double tol) {
  return a.eval(invertIMinusPhi(space, phi, z, tol));
}

Eigen::MatrixXd jacobianB(const OperatorSpec& a, const MovingMap& phi, const Primal& y_bar) {
  const int n = y_bar.dim();
  Eigen::MatrixXd i_minus = Eigen::MatrixXd::Identity(n, n) - phi.jacobian(y_bar);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(i_minus);
  if (std::abs(lu.determinant()) < 1e-300)
    throw Error("jacobianB: I - Phi'(y) is singular");
  return a.jacobian(y_bar) * lu.inverse();
}

std::pair<double, double> estimateConstants(const Space& space,
                                            const Eigen::MatrixXd& linop) {
  const int n = space.dim();
  if (linop.rows() != n || linop.cols() != n)
    throw DimensionMismatch("estimateConstants: matrix size");
  Eigen::MatrixXd m = space.denseGram();
  Eigen::MatrixXd sym = 0.5 * (linop + linop.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es_mu(sym, m);
  if (es_mu.info() != Eigen::Success) throw NotSpd("estimateConstants: eigensolver failed");
  const double mu_est = es_mu.eigenvalues().minCoeff();

  // Lipschitz constant of v -> linop v from (V, M) to the dual norm:
  // largest generalized eigenvalue of (linop' M^{-1} linop, M).
  Eigen::LLT<Eigen::MatrixXd> mllt(m);
  Eigen::MatrixXd minv_l = mllt.solve(linop);
  Eigen::MatrixXd g = linop.transpose() * minv_l;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es_l(g, m);
  const double lip_est = std::sqrt(std::max(0.0, es_l.eigenvalues().maxCoeff()));
  return {mu_est, lip_est};
}

double primalOpNorm(const Space& space, const Eigen::MatrixXd& linop) {
  Eigen::MatrixXd m = space.denseGram();
  Eigen::MatrixXd g = linop.transpose() * m * linop;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(g, m);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double interpolationSlack(const Space& space, const OperatorSpec& a, const Primal& x1,
                          const Primal& x2) {
  const Certificate& c = a.cert();
  Functional g1 = a.eval(x1), g2 = a.eval(x2);
  Functional dg(g1.coords - g2.coords);
  Primal dx(x1.coords - x2.coords);
  const double lhs = pairing(dg, dx);
  const double nx = space.norm(dx), ng = space.dualNorm(dg);
  const double s = c.mu + c.lip;
  return lhs - (c.mu * c.lip / s) * nx * nx - (1.0 / s) * ng * ng;
}

double checkInterpolationInequality(const Space& space, const OperatorSpec& a,
                                    int n_samples, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    Eigen::VectorXd u(space.dim()), v(space.dim());
    for (int i = 0; i < space.dim(); ++i) {
      u[i] = nd(rng);
      v[i] = nd(rng);
    }
    worst = std::min(worst, interpolationSlack(space, a, Primal(u), Primal(v)));
  }
  return worst;
}

}  // namespace qvi
