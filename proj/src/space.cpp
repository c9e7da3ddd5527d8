#include "qvi/space.hpp"

#include <cmath>
#include <vector>

namespace qvi {

namespace {

bool isSymmetric(const Eigen::SparseMatrix<double>& m) {
  Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(m.transpose()) - m;
  double scale = 1.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
      if (std::abs(it.value()) > 1e-12 * scale) return false;
  return true;
}

bool isDiag(const Eigen::SparseMatrix<double>& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

}  // namespace

Space::Space(Eigen::SparseMatrix<double> gram, bool identity, bool diagonal)
    : dim_(static_cast<int>(gram.rows())),
      identity_(identity),
      diagonal_(diagonal),
      gram_(std::move(gram)) {
  gram_.makeCompressed();
  if (!identity_) {
    chol_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    chol_->compute(gram_);
    if (chol_->info() != Eigen::Success || chol_->vectorD().minCoeff() <= 0.0)
      throw NotSpd("gram matrix is not positive definite");
  }
}

Space Space::euclidean(int dim) {
  Eigen::SparseMatrix<double> m(dim, dim);
  m.setIdentity();
  return Space(std::move(m), true, true);
}

Space Space::withGram(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols()) throw NotSpd("gram matrix must be square");
  return withSparseGram(gram.sparseView());
}

Space Space::withSparseGram(Eigen::SparseMatrix<double> gram) {
  if (gram.rows() != gram.cols()) throw NotSpd("gram matrix must be square");
  if (!isSymmetric(gram)) throw NotSpd("gram matrix is not symmetric");
  bool diag = isDiag(gram);
  bool ident = diag && Eigen::VectorXd(gram.diagonal()).isApproxToConstant(1.0, 1e-15);
  return Space(std::move(gram), ident, diag);
}

Space Space::stiffness1d(int n) {
  if (n < 1) throw Error("stiffness1d: need at least one interior node");
  const double h = 1.0 / (n + 1);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, i, 2.0 / h);
    if (i > 0) trips.emplace_back(i, i - 1, -1.0 / h);
    if (i + 1 < n) trips.emplace_back(i, i + 1, -1.0 / h);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  Space s(std::move(m), false, n == 1 ? true : false);
  s.mesh_width_ = h;
  return s;
}

void Space::requireDim(int n, const char* what) const {
  if (n != dim_) throw DimensionMismatch(std::string(what) + ": dimension mismatch");
}

double Space::inner(const Primal& u, const Primal& v) const {
  requireDim(u.dim(), "inner");
  requireDim(v.dim(), "inner");
  if (identity_) return u.coords.dot(v.coords);
  return u.coords.dot(gram_ * v.coords);
}

double Space::norm(const Primal& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }

Primal Space::riesz(const Functional& f) const {
  requireDim(f.dim(), "riesz");
  if (identity_) return Primal(f.coords);
  return Primal(chol_->solve(f.coords));
}

double Space::dualNorm(const Functional& f) const {
  requireDim(f.dim(), "dualNorm");
  if (identity_) return f.coords.norm();
  return std::sqrt(std::max(0.0, f.coords.dot(chol_->solve(f.coords))));
}

Functional Space::applyGram(const Primal& v) const {
  requireDim(v.dim(), "applyGram");
  if (identity_) return Functional(v.coords);
  return Functional(gram_ * v.coords);
}

double Space::coordNorm(int i) const {
  if (identity_) return 1.0;
  return std::sqrt(gram_.coeff(i, i));
}

Eigen::VectorXd Space::solveReduced(const std::vector<int>& free,
                                    const Eigen::VectorXd& rhs) const {
  const int nf = static_cast<int>(free.size());
  if (nf == 0) return Eigen::VectorXd(0);
  if (identity_) return rhs;
  if (diagonal_) {
    Eigen::VectorXd x(nf);
    for (int k = 0; k < nf; ++k) x[k] = rhs[k] / gram_.coeff(free[k], free[k]);
    return x;
  }
  std::vector<int> pos(dim_, -1);
  for (int k = 0; k < nf; ++k) pos[free[k]] = k;
  std::vector<Eigen::Triplet<double>> trips;
  for (int k = 0; k < nf; ++k) {
    const int j = free[k];
    for (Eigen::SparseMatrix<double>::InnerIterator it(gram_, j); it; ++it) {
      const int pi = pos[it.row()];
      if (pi >= 0) trips.emplace_back(pi, k, it.value());
    }
  }
  Eigen::SparseMatrix<double> sub(nf, nf);
  sub.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(sub);
  if (chol.info() != Eigen::Success)
    throw NotSpd("solveReduced: reduced gram not positive definite");
  return chol.solve(rhs);
}

}  // namespace qvi
