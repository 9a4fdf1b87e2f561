#pragma once

#include <functional>
#include <utility>

#include "ntklab/datagen.hpp"
#include "ntklab/network.hpp"
#include "ntklab/numerics.hpp"
#include "ntklab/rng.hpp"

namespace ntklab {

// Kernel ridge / ridgeless regressor: coeffs solve (K + jitter I) c = y.
struct KernelRegressor {
  Matrix X_train;
  Vector coeffs;
  KernelFn kernel;
  double jitter_used = 0.0;
};

KernelRegressor fit(const Matrix& X, const Vector& y, const KernelFn& kernel, double jitter);

double predict(const KernelRegressor& model, const Vector& x);
Vector predict_batch(const KernelRegressor& model, const Matrix& X);

struct RiskReport {
  double excess_risk = 0.0;  // Monte Carlo estimate of |f_hat - f_rho|^2 in L2(rho_X)
  double std_err = 0.0;
  int n_test = 0;
};

using Predictor = std::function<double(const Vector&)>;

// Monte Carlo excess risk of an arbitrary predictor against an RKHS target,
// inputs uniform on the unit sphere.
RiskReport excess_risk(const Predictor& predictor, const RkhsTarget& target,
                       const KernelFn& target_kernel, int n_test, const RngStream& rng);

// Max and mean |f_nn(x) - f_ker(x)| over the rows of test_X.
std::pair<double, double> nn_vs_ntk_gap(const WeightSet& w_trained,
                                        const KernelRegressor& model, const Matrix& test_X);

// Full-batch squared-loss gradient descent (the regression-side trainer used
// for the network-vs-kernel-regression comparison).
WeightSet gd_squared_loss(const WeightSet& w0, const Matrix& X, const Vector& y,
                          double step_size, int steps);

}  // namespace ntklab
