#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ntklab/numerics.hpp"
#include "ntklab/rng.hpp"

namespace ntklab {

using KernelFn = std::function<double(const Vector&, const Vector&)>;

// Two-cluster classification mixture with label noise. Cluster law is a
// standard Gaussian per coordinate (1-strongly log-concave, unit
// sub-Gaussian marginals, E|z|^2 = d).
struct MixtureSpec {
  int d = 64;
  Vector mu;                 // cluster mean; defaults() puts norm 3 on coordinate 0
  double eta = 0.1;          // label flip probability, in [0, 1/2)
  double lambda_lc = 1.0;    // strong log-concavity parameter of the cluster law
  double kappa_data = 0.5;   // lower-bound constant for E|z|^2 > kappa * d
  double c_norm = 10.0;      // uniform data-norm cap after rescaling

  static MixtureSpec defaults(int d);
  void validate() const;
};

struct MixtureDataset {
  Matrix X;                      // n x d
  Vector y;                      // observed (possibly flipped) labels, +-1
  Vector y_clean;                // clean labels, +-1
  std::vector<char> noise_mask;  // true <=> label was flipped
  double scale = 1.0;            // factor applied to rows to hit the norm cap

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
  void write_csv(const std::string& path) const;
};

MixtureDataset sample_mixture(const MixtureSpec& spec, int n, const RngStream& rng);

// n i.i.d. rows uniform on the unit sphere in R^d.
Matrix sample_sphere(int n, int d, const RngStream& rng);

// Finite kernel expansion f(x) = sum_j a_j k(x, z_j) with unit-sphere anchor
// points; exactly realizable in the kernel's RKHS.
struct RkhsTarget {
  Matrix centers;        // k x d, unit rows
  Vector coeffs;
  double sigma_eps = 0.0;  // additive label-noise standard deviation
  double rkhs_norm = 0.0;  // sqrt(a' K_zz a), recorded at construction
};

RkhsTarget make_rkhs_target(int k, int d, double sigma_eps, const KernelFn& kernel,
                            const RngStream& rng);

double eval_rkhs_target(const RkhsTarget& target, const Vector& x, const KernelFn& kernel);

}  // namespace ntklab
