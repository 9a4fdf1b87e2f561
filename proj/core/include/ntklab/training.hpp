#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ntklab/datagen.hpp"
#include "ntklab/network.hpp"
#include "ntklab/rng.hpp"

namespace ntklab {

// Stable log(1 + exp(-z)).
double logistic_loss(double z);

// g(z) = -d/dz logistic_loss(z) = 1 / (1 + e^z), in (0, 1).
double loss_derivative_g(double z);

struct TrainConfig {
  double alpha = 0.05;        // fixed SGD step size
  int epochs = 1;
  double stop_risk = 0.0;     // early exit once empirical risk <= stop_risk
  double stop_train01 = -1.0; // early exit once training 0-1 error <= this; off if < 0
  bool shuffle = true;        // reshuffle epochs after the first
  RngStream rng;

  void validate() const;
};

struct TraceRecord {
  long step = 0;
  double risk = 0.0;          // full empirical logistic risk
  double sample_loss = 0.0;   // loss of the sample just visited
  double margin = 0.0;        // mean clean-set margin, NaN when no margin set given
  double train01 = 0.0;       // training 0-1 error
  std::vector<double> drift;  // per-layer Frobenius distance from W0
};

struct TrainTrace {
  std::vector<TraceRecord> records;

  // Header: step,risk,margin,train01,drift_l1..drift_lL
  void write_csv(const std::string& path) const;
};

struct SgdResult {
  WeightSet weights;
  TrainTrace trace;
  long steps_taken = 0;
};

// Held-out clean sample used for the margin statistic E[y~ f(x)].
struct MarginProbe {
  Matrix X;
  Vector y_clean;
};

// One-sample-per-step logistic SGD. Epoch 1 walks the samples in order;
// later epochs reshuffle when cfg.shuffle is set. Trace (and the early-exit
// checks) fire every trace_every steps and at the final step.
SgdResult sgd_run(const WeightSet& w0, const MixtureDataset& data, const TrainConfig& cfg,
                  int trace_every, const MarginProbe* margin_probe = nullptr);

// Mean logistic loss over the noisy labels.
double empirical_risk(const WeightSet& w, const MixtureDataset& data);

// Fraction of misclassified points; sgn(0) counts as +1. use_clean selects
// the clean labels.
double test_error(const WeightSet& w, const MixtureDataset& test, bool use_clean);

// eta + exp(-(lambda/4) (margin/lip)^2): the concentration test-error bound.
double classification_bound(double eta, double lambda_lc, double margin, double lip);

}  // namespace ntklab
