#pragma once

#include <Eigen/Dense>
#include <utility>

#include "ntklab/errors.hpp"
#include "ntklab/rng.hpp"

namespace ntklab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense symmetric matrix. Construction mirrors the lower triangle onto the
// upper one, so entries(i,j) == entries(j,i) holds exactly.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix a);

  int order() const { return static_cast<int>(a_.rows()); }
  const Matrix& mat() const { return a_; }
  double trace() const { return a_.trace(); }
  double operator()(int i, int j) const { return a_(i, j); }

 private:
  Matrix a_;
};

// i.i.d. N(0, variance) entries, reproducible per (seed, stream_id).
Matrix sample_gaussian(const RngStream& rng, int rows, int cols, double variance);

// Smallest eigenvalue of a symmetric matrix.
double sym_eig_min(const SymmetricMatrix& a);

// All eigenvalues, ascending.
Vector sym_eigvals(const SymmetricMatrix& a);

// Eigenvalues (ascending) and the matching orthonormal eigenvectors as columns.
std::pair<Vector, Matrix> sym_eig(const SymmetricMatrix& a);

// Default ridge used by the kernel solvers: 1e-10 * trace / n.
double default_jitter(const SymmetricMatrix& a);

// Solves (A + jitter I) x = b. Cholesky-type factorization first, with an
// eigendecomposition pseudo-solve fallback; throws SingularMatrixError when
// even the fallback leaves a large residual.
Vector psd_solve(const SymmetricMatrix& a, const Vector& b, double jitter);

}  // namespace ntklab
