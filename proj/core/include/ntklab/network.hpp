#pragma once

#include <string>
#include <vector>

#include "ntklab/numerics.hpp"
#include "ntklab/rng.hpp"

namespace ntklab {

// Depth-L fully-connected ReLU network, no biases. Layer shapes are
// [width x input_dim, (width x width)^(depth-2), 1 x width].
struct NetConfig {
  int depth = 2;      // number of weight matrices, >= 2
  int width = 128;    // hidden width
  int input_dim = 8;

  void validate() const;
};

struct WeightSet {
  std::vector<Matrix> layers;

  int depth() const { return static_cast<int>(layers.size()); }
  int width() const { return static_cast<int>(layers.front().rows()); }
  int input_dim() const { return static_cast<int>(layers.front().cols()); }

  // Binary checkpoint (little-endian doubles, header with depth/width/dim)
  // plus a ".json" sidecar describing the shapes.
  void save(const std::string& path) const;
  static WeightSet load(const std::string& path);
};

// Hidden layers ~ N(0, 2/width), output layer ~ N(0, 1).
WeightSet init_weights(const NetConfig& cfg, const RngStream& rng);

struct ForwardRecord {
  std::vector<Vector> preacts;  // depth-1 hidden pre-activations
  std::vector<Vector> acts;     // depth-1 hidden post-activations
  double output = 0.0;
};

ForwardRecord forward(const WeightSet& w, const Vector& x);

// Batched scores f(x_i) for all rows of X at once (GEMM path).
Vector forward_scores(const WeightSet& w, const Matrix& X);

// Rank-1 factors of the per-layer output gradients: the gradient with
// respect to layer l is backs[l] * acts[l-1]^T (acts[-1] meaning x), and the
// output layer gradient is acts[depth-2]^T. Shared by gradient(),
// empirical-NTK entries and SGD updates.
struct GradientFactors {
  Vector input;               // x
  std::vector<Vector> acts;   // hidden activations h_1..h_{depth-1}
  std::vector<Vector> backs;  // d output / d preact_l for l = 1..depth-1
};

GradientFactors gradient_factors(const WeightSet& w, const Vector& x);

// Full gradient matrices of the scalar output with respect to each layer.
std::vector<Matrix> gradient(const WeightSet& w, const Vector& x);

// d f / d x at x (reverse accumulation through the sign pattern).
Vector input_gradient(const WeightSet& w, const Vector& x);

// Per-hidden-layer activation masks; a tie at 0 counts as active.
struct SignPattern {
  std::vector<std::vector<char>> masks;
};

SignPattern sign_pattern(const WeightSet& w, const Vector& x);

// Per-layer Frobenius distances |W_l - W0_l|_F.
std::vector<double> weight_distance(const WeightSet& w, const WeightSet& w0);

// Max per-layer distance; membership in an omega-neighborhood is
// max_layer_distance(...) <= omega.
double max_layer_distance(const WeightSet& w, const WeightSet& w0);

struct LipschitzEstimates {
  double spectral_upper = 0.0;   // product of layer spectral norms
  double empirical_lower = 0.0;  // max |df/dx| over probe inputs
};

LipschitzEstimates lipschitz_estimates(const WeightSet& w, const Matrix& probe_inputs);

// Largest singular value by power iteration (deterministic start vector).
double spectral_norm(const Matrix& a);

}  // namespace ntklab
