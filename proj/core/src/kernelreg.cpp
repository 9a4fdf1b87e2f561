#include "ntklab/kernelreg.hpp"

#include <cmath>
#include <stdexcept>

namespace ntklab {

KernelRegressor fit(const Matrix& X, const Vector& y, const KernelFn& kernel, double jitter) {
  const int n = static_cast<int>(X.rows());
  if (n < 1) throw std::invalid_argument("fit: empty training set");
  if (y.size() != n) throw std::invalid_argument("fit: label count mismatch");
  Matrix gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      gram(i, j) = kernel(X.row(i), X.row(j));
      gram(j, i) = gram(i, j);
    }
  }
  KernelRegressor model;
  model.X_train = X;
  model.kernel = kernel;
  model.jitter_used = jitter;
  model.coeffs = psd_solve(SymmetricMatrix(std::move(gram)), y, jitter);
  return model;
}

double predict(const KernelRegressor& model, const Vector& x) {
  if (x.size() != model.X_train.cols()) {
    throw std::invalid_argument("predict: dimension mismatch");
  }
  double value = 0.0;
  for (int i = 0; i < model.X_train.rows(); ++i) {
    value += model.coeffs(i) * model.kernel(x, model.X_train.row(i));
  }
  return value;
}

Vector predict_batch(const KernelRegressor& model, const Matrix& X) {
  Vector out(X.rows());
  for (int i = 0; i < X.rows(); ++i) {
    out(i) = predict(model, X.row(i));
  }
  return out;
}

RiskReport excess_risk(const Predictor& predictor, const RkhsTarget& target,
                       const KernelFn& target_kernel, int n_test, const RngStream& rng) {
  if (n_test < 100) throw std::invalid_argument("excess_risk: n_test must be >= 100");
  const int d = static_cast<int>(target.centers.cols());
  const Matrix X = sample_sphere(n_test, d, rng);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_test; ++i) {
    const Vector x = X.row(i);
    const double diff = predictor(x) - eval_rkhs_target(target, x, target_kernel);
    const double sq = diff * diff;
    sum += sq;
    sum_sq += sq * sq;
  }
  RiskReport report;
  report.n_test = n_test;
  report.excess_risk = sum / n_test;
  const double var = std::max(0.0, sum_sq / n_test - report.excess_risk * report.excess_risk);
  report.std_err = std::sqrt(var / n_test);
  return report;
}

std::pair<double, double> nn_vs_ntk_gap(const WeightSet& w_trained,
                                        const KernelRegressor& model, const Matrix& test_X) {
  if (test_X.rows() < 1) throw std::invalid_argument("nn_vs_ntk_gap: empty test set");
  const Vector nn_scores = forward_scores(w_trained, test_X);
  const Vector ker_scores = predict_batch(model, test_X);
  const Vector gaps = (nn_scores - ker_scores).cwiseAbs();
  return {gaps.maxCoeff(), gaps.mean()};
}

WeightSet gd_squared_loss(const WeightSet& w0, const Matrix& X, const Vector& y,
                          double step_size, int steps) {
  if (X.rows() != y.size()) throw std::invalid_argument("gd_squared_loss: size mismatch");
  if (!(step_size > 0.0)) throw std::invalid_argument("gd_squared_loss: step_size must be > 0");
  WeightSet w = w0;
  const int n = static_cast<int>(X.rows());
  const int hidden = w.depth() - 1;
  for (int t = 0; t < steps; ++t) {
    std::vector<Matrix> grads(w.depth());
    for (int l = 0; l < hidden; ++l) {
      grads[l] = Matrix::Zero(w.layers[l].rows(), w.layers[l].cols());
    }
    grads[hidden] = Matrix::Zero(1, w.width());
    for (int i = 0; i < n; ++i) {
      GradientFactors gf = gradient_factors(w, X.row(i));
      const double f = w.layers.back().row(0).dot(gf.acts[hidden - 1]);
      const double resid = (f - y(i)) / n;
      for (int l = 0; l < hidden; ++l) {
        const Vector& below = (l == 0) ? gf.input : gf.acts[l - 1];
        grads[l].noalias() += resid * gf.backs[l] * below.transpose();
      }
      grads[hidden].row(0) += resid * gf.acts[hidden - 1].transpose();
    }
    for (int l = 0; l < w.depth(); ++l) {
      w.layers[l] -= step_size * grads[l];
    }
  }
  return w;
}

}  // namespace ntklab
