#ifndef QVI_SPACE_HPP
#define QVI_SPACE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "qvi/errors.hpp"

namespace qvi {

// Element of V, coordinates w.r.t. the chosen basis.
struct Primal {
  Eigen::VectorXd coords;

  Primal() = default;
  explicit Primal(Eigen::VectorXd c) : coords(std::move(c)) {}
  int dim() const { return static_cast<int>(coords.size()); }
};

// Element of V*; the dual pairing <f, v> is the coordinate dot product.
struct Functional {
  Eigen::VectorXd coords;

  Functional() = default;
  explicit Functional(Eigen::VectorXd c) : coords(std::move(c)) {}
  int dim() const { return static_cast<int>(coords.size()); }
};

inline double pairing(const Functional& f, const Primal& v) {
  if (f.dim() != v.dim()) throw DimensionMismatch("pairing: dimension mismatch");
  return f.coords.dot(v.coords);
}

// Finite-dimensional model of the Hilbert space V: R^n with an SPD Gram
// matrix M.  inner(u,v) = u' M v is the norm used by every projection and
// residual in the repo.  Immutable after construction; the Cholesky-type
// factorization of M is computed once and cached.
class Space {
 public:
  Space() = default;  // empty placeholder; every operation requires a factory-built space

  static Space euclidean(int dim);
  static Space withGram(const Eigen::MatrixXd& gram);
  static Space withSparseGram(Eigen::SparseMatrix<double> gram);
  // Interior-point stiffness matrix of -u'' on (0,1), n interior nodes,
  // mesh width 1/(n+1): tridiag(-1, 2, -1)/h.
  static Space stiffness1d(int n);

  int dim() const { return dim_; }
  bool isIdentity() const { return identity_; }
  bool isDiagonal() const { return diagonal_; }
  double meshWidth() const { return mesh_width_; }  // 0 unless stiffness1d

  double inner(const Primal& u, const Primal& v) const;
  double norm(const Primal& u) const;
  Primal riesz(const Functional& f) const;
  double dualNorm(const Functional& f) const;
  Functional applyGram(const Primal& v) const;  // v -> M v

  const Eigen::SparseMatrix<double>& gram() const { return gram_; }
  Eigen::MatrixXd denseGram() const { return Eigen::MatrixXd(gram_); }
  // M-norm of the i-th coordinate vector.
  double coordNorm(int i) const;

  // Solves the SPD system restricted to the index set `free` (rows and
  // columns), right-hand side rhs on those indices.  Used by projections.
  Eigen::VectorXd solveReduced(const std::vector<int>& free,
                               const Eigen::VectorXd& rhs) const;

  void requireDim(int n, const char* what) const;

 private:
  Space(Eigen::SparseMatrix<double> gram, bool identity, bool diagonal);

  int dim_ = 0;
  bool identity_ = false;
  bool diagonal_ = false;
  double mesh_width_ = 0.0;
  Eigen::SparseMatrix<double> gram_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> chol_;
};

}  // namespace qvi

#endif
