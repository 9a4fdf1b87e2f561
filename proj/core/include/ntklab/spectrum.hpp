#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ntklab/numerics.hpp"
#include "ntklab/rng.hpp"

namespace ntklab {

// First Hermite coefficient of ReLU, E[relu(g) g] for g ~ N(0,1), by
// adaptive quadrature. Equals 1/2.
double hermite_mu1();

// Zeroth coefficient E[relu(g)] = 1/sqrt(2 pi); quadrature sanity companion.
double hermite_mu0();

// The random-matrix absolute constant 2^3.5 sqrt(log 9) ~= 16.77.
double bound_constant_c();

struct BoundInputs {
  int n = 1;
  int d = 1;
  double mu1 = 0.5;
  double c_abs = bound_constant_c();
};

// Minimum-eigenvalue lower bound for the limiting NTK:
//   n >= d:  2 mu1^2 (n/d) (3/4 - (c/4) sqrt(d/n))^2
//   n <  d:  2 mu1^2 (n/d) (sqrt(d/n) - (c+6)/4)^2
double ntk_lower_bound(const BoundInputs& b);

// Sample-covariance minimum-eigenvalue bound with the same two branches,
// scaled by lambda_min of the population covariance.
double cov_min_eig_bound(int n, int d, double lambda_min_sigma);

enum class BoundRegime { n_ge_d, n_lt_d };

struct DecayMeta {
  std::string kind;
  int r_star = 0;
  double a = 0.0;
  double gamma = 0.0;
};

struct SpectrumReport {
  std::uint64_t seed = 0;
  int n = 0, d = 0, num_layers = 0;
  double lambda_min_observed = 0.0;
  double lower_bound = 0.0;
  BoundRegime regime = BoundRegime::n_ge_d;
  bool holds = false;
  bool intermediate_holds = false;  // lambda_min(K) >= 2 mu1^2 lambda_min(XX')
  double effective_dim = 0.0;       // for XX'/d at gamma = 1 unless noted
  std::optional<DecayMeta> decay;
};

void write_spectrum_csv(const std::vector<SpectrumReport>& reports, const std::string& path);

// Per seed: uniform-sphere data, limiting NTK, observed lambda_min vs the
// theorem bound, plus the intermediate covariance inequality.
std::vector<SpectrumReport> verify_ntk_bound(int n, int d, int num_layers, int seeds,
                                             const RngStream& rng);

// sum_i lambda_i / (lambda_i + gamma)^2.
double effective_dimension(const Vector& eigs, double gamma);

enum class DecayKind { harmonic, polynomial, exponential };

// Model spectra: harmonic n/i, polynomial n i^(-2a), exponential n e^(-a i),
// for i = 1..r_star, zero beyond.
Vector decay_spectrum(DecayKind kind, int n, int r_star, double a);

struct TrendRow {
  double n = 0.0;
  double bound = 0.0;
  std::string segment;  // "down1", "up1", "down2", "up2"
};

// Bound values along an n-grid with segment labels at the breakpoints
// (4/(c+6))^2 d, d, and (c^2/9) d.
std::vector<TrendRow> trend_table(int d, const std::vector<double>& n_grid, double mu1);

struct TrendCheck {
  bool ok = false;                    // every segment matches its expected direction
  std::vector<std::string> segments;  // down1, up1, down2, up2
  std::vector<bool> segment_ok;
  double branch_jump_at_d = 0.0;      // right-branch minus left-branch value at n = d
};

// Builds geometric grids strictly inside each trend segment (up to 64 d on
// the right) and checks the sign of consecutive bound differences.
TrendCheck check_trend_table(int d, int points_per_segment, double mu1);

}  // namespace ntklab
