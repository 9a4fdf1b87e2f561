#include "ntklab/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace ntklab {
namespace {

void require_finite(const Matrix& a, const char* who) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(Matrix a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1) {
    throw std::invalid_argument("SymmetricMatrix: matrix must be square and non-empty");
  }
  a_.triangularView<Eigen::StrictlyUpper>() = a_.transpose();
}

Matrix sample_gaussian(const RngStream& rng, int rows, int cols, double variance) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("sample_gaussian: dimensions must be positive");
  }
  if (!(variance > 0.0)) {
    throw std::invalid_argument("sample_gaussian: variance must be positive");
  }
  auto eng = rng.engine();
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out(i, j) = normal(eng);
    }
  }
  return out;
}

double sym_eig_min(const SymmetricMatrix& a) {
  require_finite(a.mat(), "sym_eig_min");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Vector sym_eigvals(const SymmetricMatrix& a) {
  require_finite(a.mat(), "sym_eigvals");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::pair<Vector, Matrix> sym_eig(const SymmetricMatrix& a) {
  require_finite(a.mat(), "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  return {es.eigenvalues(), es.eigenvectors()};
}

double default_jitter(const SymmetricMatrix& a) {
  return 1e-10 * a.trace() / a.order();
}

Vector psd_solve(const SymmetricMatrix& a, const Vector& b, double jitter) {
  if (jitter < 0.0) {
    throw std::invalid_argument("psd_solve: jitter must be non-negative");
  }
  if (b.size() != a.order()) {
    throw std::invalid_argument("psd_solve: rhs size mismatch");
  }
  require_finite(a.mat(), "psd_solve");

  const int n = a.order();
  Matrix shifted = a.mat();
  shifted.diagonal().array() += jitter;

  const double a_norm = shifted.norm();
  const double b_norm = b.norm();
  auto residual_ok = [&](const Vector& x) {
    const double r = (shifted * x - b).norm();
    return r <= 1e-8 * (a_norm * x.norm() + b_norm) + 1e-300;
  };

  Eigen::LDLT<Matrix> ldlt(shifted);
  if (ldlt.info() == Eigen::Success) {
    Vector x = ldlt.solve(b);
    if (x.allFinite() && residual_ok(x)) {
      return x;
    }
  }

  // Eigendecomposition pseudo-solve: drop near-null directions.
  Eigen::SelfAdjointEigenSolver<Matrix> es(shifted);
  const Vector& vals = es.eigenvalues();
  const Matrix& vecs = es.eigenvectors();
  const double cutoff = 1e-14 * std::max(std::abs(vals(0)), std::abs(vals(n - 1)));
  Vector x = Vector::Zero(n);
  double smallest_pivot = std::abs(vals(0));
  for (int i = 0; i < n; ++i) {
    smallest_pivot = std::min(smallest_pivot, std::abs(vals(i)));
    if (std::abs(vals(i)) > cutoff) {
      x += (vecs.col(i).dot(b) / vals(i)) * vecs.col(i);
    }
  }
  if (x.allFinite() && residual_ok(x)) {
    return x;
  }
  throw SingularMatrixError("psd_solve: system numerically singular beyond fallback",
                            smallest_pivot);
}

}  // namespace ntklab
