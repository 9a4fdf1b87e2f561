#pragma once

#include <functional>
#include <string>

#include "ntklab/datagen.hpp"
#include "ntklab/network.hpp"
#include "ntklab/numerics.hpp"

namespace ntklab {

enum class KernelProvenance { empirical, limiting, laplace, dot_product };

struct KernelMatrix {
  SymmetricMatrix gram;
  KernelProvenance provenance;
  std::string meta;  // builder parameters, e.g. "L=3"

  int order() const { return gram.order(); }
  void write_csv(const std::string& path) const;
  // {provenance, n, trace, min_eig, max_eig}
  std::string summary_json() const;
};

// Arc-cosine dual activations of ReLU:
//   kappa0(u) = (pi - arccos u) / pi        (derivative covariance)
//   kappa1(u) = (u (pi - arccos u) + sqrt(1 - u^2)) / pi
// Inputs within 1e-12 of [-1, 1] are clipped; anything farther is rejected.
double kappa0(double u);
double kappa1(double u);

// Two-layer limiting NTK closed form: |x1||x2| (u kappa0(u) + kappa1(u)).
double ntk_2layer_closed(const Vector& x1, const Vector& x2);

// Limiting NTK of the depth-L ReLU network via the covariance recursion with
// arc-cosine closed forms and Hadamard assembly.
KernelMatrix limiting_ntk(const Matrix& X, int num_layers);

// Pairwise limiting-NTK value for two points (same recursion, order 2).
double limiting_ntk_pair(const Vector& x1, const Vector& x2, int num_layers);

// Single-draw finite-width NTK: entry (i,j) is the inner product of the
// flattened output gradients at W.
KernelMatrix empirical_ntk(const WeightSet& w, const Matrix& X);

// exp(-c |x1 - x2|).
double laplace_kernel(const Vector& x1, const Vector& x2, double c);

KernelFn make_laplace_kernel(double c);
KernelFn make_limiting_ntk_kernel(int num_layers);
// Dot-product kernel k(<x1,x2>) for unit-sphere inputs.
KernelFn make_dot_product_kernel(std::function<double(double)> k);

// Mean kernel value per (class, class) pair over distinct indices, and the
// same-minus-different gap for binary labels.
struct GapResult {
  double gap = 0.0;           // defined for exactly two classes, else NaN
  Matrix confusion;           // class x class mean kernel values
  std::vector<int> classes;   // sorted distinct labels, row/col order
};

GapResult assumption_gap(const Matrix& X, const std::vector<int>& labels,
                         const KernelFn& kernel);

}  // namespace ntklab
