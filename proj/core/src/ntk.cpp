#include "ntklab/ntk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "ntklab/errors.hpp"

namespace ntklab {
namespace {

constexpr double kPi = 3.14159265358979323846;

double clip_cosine(double u, const char* who) {
  if (u > 1.0 + 1e-12 || u < -1.0 - 1e-12) {
    throw std::invalid_argument(std::string(who) + ": cosine argument out of [-1, 1]");
  }
  return std::clamp(u, -1.0, 1.0);
}

const char* provenance_name(KernelProvenance p) {
  switch (p) {
    case KernelProvenance::empirical: return "empirical";
    case KernelProvenance::limiting: return "limiting";
    case KernelProvenance::laplace: return "laplace";
    case KernelProvenance::dot_product: return "dot_product";
  }
  return "unknown";
}

}  // namespace

double kappa0(double u) {
  u = clip_cosine(u, "kappa0");
  return (kPi - std::acos(u)) / kPi;
}

double kappa1(double u) {
  u = clip_cosine(u, "kappa1");
  return (u * (kPi - std::acos(u)) + std::sqrt(std::max(0.0, 1.0 - u * u))) / kPi;
}

double ntk_2layer_closed(const Vector& x1, const Vector& x2) {
  const double n1 = x1.norm();
  const double n2 = x2.norm();
  if (n1 == 0.0 || n2 == 0.0) {
    throw std::invalid_argument("ntk_2layer_closed: zero vector");
  }
  const double u = clip_cosine(x1.dot(x2) / (n1 * n2), "ntk_2layer_closed");
  return n1 * n2 * (u * kappa0(u) + kappa1(u));
}

KernelMatrix limiting_ntk(const Matrix& X, int num_layers) {
  if (num_layers < 2) throw std::invalid_argument("limiting_ntk: need at least 2 layers");
  const int n = static_cast<int>(X.rows());
  if (n < 1) throw std::invalid_argument("limiting_ntk: empty input");

  Matrix cov = X * X.transpose();  // layer-1 covariance
  for (int i = 0; i < n; ++i) {
    if (cov(i, i) <= 0.0) {
      throw std::invalid_argument("limiting_ntk: zero-norm row " + std::to_string(i));
    }
  }
  Matrix kernel = cov;
  Matrix next(n, n);
  for (int layer = 2; layer <= num_layers; ++layer) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double scale = std::sqrt(cov(i, i) * cov(j, j));
        const double rho = std::clamp(cov(i, j) / scale, -1.0, 1.0);
        next(i, j) = scale * kappa1(rho);
        const double dot_cov = kappa0(rho);
        kernel(i, j) = kernel(i, j) * dot_cov + next(i, j);
        next(j, i) = next(i, j);
        kernel(j, i) = kernel(i, j);
      }
    }
    cov.swap(next);
  }
  return KernelMatrix{SymmetricMatrix(std::move(kernel)), KernelProvenance::limiting,
                      "L=" + std::to_string(num_layers)};
}

double limiting_ntk_pair(const Vector& x1, const Vector& x2, int num_layers) {
  if (num_layers < 2) throw std::invalid_argument("limiting_ntk_pair: need at least 2 layers");
  const double a = x1.squaredNorm();
  const double b = x2.squaredNorm();
  if (a == 0.0 || b == 0.0) throw std::invalid_argument("limiting_ntk_pair: zero vector");
  const double scale = std::sqrt(a * b);
  double cov = x1.dot(x2);
  double kernel = cov;
  // Diagonal covariances are fixed points of the recursion (kappa1(1) = 1).
  for (int layer = 2; layer <= num_layers; ++layer) {
    const double rho = std::clamp(cov / scale, -1.0, 1.0);
    cov = scale * kappa1(rho);
    kernel = kernel * kappa0(rho) + cov;
  }
  return kernel;
}

KernelMatrix empirical_ntk(const WeightSet& w, const Matrix& X) {
  const int n = static_cast<int>(X.rows());
  if (n < 1) throw std::invalid_argument("empirical_ntk: empty input");
  if (X.cols() != w.input_dim()) {
    throw std::invalid_argument("empirical_ntk: input dimension mismatch");
  }
  std::vector<GradientFactors> factors;
  factors.reserve(n);
  for (int i = 0; i < n; ++i) {
    factors.push_back(gradient_factors(w, X.row(i)));
  }
  const int hidden = w.depth() - 1;
  // The hidden-layer gradient terms carry the output layer's unit-variance
  // entries, which inflates them by m/2 relative to the deterministic
  // infinite-width kernel; the 2/m factor restores the normalization under
  // which the single-draw kernel converges to the limit.
  const double hidden_scale = 2.0 / w.width();
  Matrix kernel(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      // Layer-l gradients are rank one, so the Frobenius inner products
      // factor into dot products of the forward and backward vectors.
      double value = factors[i].acts[hidden - 1].dot(factors[j].acts[hidden - 1]);
      for (int l = 0; l < hidden; ++l) {
        const Vector& bi = (l == 0) ? factors[i].input : factors[i].acts[l - 1];
        const Vector& bj = (l == 0) ? factors[j].input : factors[j].acts[l - 1];
        value += hidden_scale * factors[i].backs[l].dot(factors[j].backs[l]) * bi.dot(bj);
      }
      kernel(i, j) = value;
      kernel(j, i) = value;
    }
  }
  return KernelMatrix{SymmetricMatrix(std::move(kernel)), KernelProvenance::empirical,
                      "L=" + std::to_string(w.depth()) + ",m=" + std::to_string(w.width())};
}

double laplace_kernel(const Vector& x1, const Vector& x2, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("laplace_kernel: c must be positive");
  return std::exp(-c * (x1 - x2).norm());
}

KernelFn make_laplace_kernel(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("make_laplace_kernel: c must be positive");
  return [c](const Vector& a, const Vector& b) { return laplace_kernel(a, b, c); };
}

KernelFn make_limiting_ntk_kernel(int num_layers) {
  if (num_layers < 2) throw std::invalid_argument("make_limiting_ntk_kernel: need >= 2 layers");
  return [num_layers](const Vector& a, const Vector& b) {
    return limiting_ntk_pair(a, b, num_layers);
  };
}

KernelFn make_dot_product_kernel(std::function<double(double)> k) {
  return [k = std::move(k)](const Vector& a, const Vector& b) { return k(a.dot(b)); };
}

GapResult assumption_gap(const Matrix& X, const std::vector<int>& labels,
                         const KernelFn& kernel) {
  const int n = static_cast<int>(X.rows());
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("assumption_gap: label count mismatch");
  }
  std::map<int, int> counts;
  for (int lab : labels) ++counts[lab];
  for (const auto& [lab, cnt] : counts) {
    if (cnt < 2) {
      throw InsufficientDataError(
          "assumption_gap: class " + std::to_string(lab) + " has fewer than 2 samples", lab);
    }
  }
  GapResult result;
  std::map<int, int> index;
  for (const auto& [lab, cnt] : counts) {
    index[lab] = static_cast<int>(result.classes.size());
    result.classes.push_back(lab);
  }
  const int k = static_cast<int>(result.classes.size());
  Matrix sums = Matrix::Zero(k, k);
  Matrix pair_counts = Matrix::Zero(k, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double v = kernel(X.row(i), X.row(j));
      const int a = index[labels[i]];
      const int b = index[labels[j]];
      sums(a, b) += v;
      pair_counts(a, b) += 1.0;
      if (a != b) {
        sums(b, a) += v;
        pair_counts(b, a) += 1.0;
      }
    }
  }
  sums.triangularView<Eigen::StrictlyUpper>() = sums.transpose();
  pair_counts.triangularView<Eigen::StrictlyUpper>() = pair_counts.transpose();
  result.confusion = sums.cwiseQuotient(pair_counts);

  if (k == 2) {
    const double same = (sums(0, 0) + sums(1, 1)) / (pair_counts(0, 0) + pair_counts(1, 1));
    const double diff = sums(0, 1) / pair_counts(0, 1);
    result.gap = same - diff;
  } else {
    result.gap = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

void KernelMatrix::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("KernelMatrix::write_csv: cannot open " + path);
  f.precision(17);
  const Matrix& g = gram.mat();
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      f << g(i, j) << (j + 1 == g.cols() ? '\n' : ',');
    }
  }
}

std::string KernelMatrix::summary_json() const {
  const Vector eigs = sym_eigvals(gram);
  nlohmann::json j;
  j["provenance"] = provenance_name(provenance);
  j["meta"] = meta;
  j["n"] = order();
  j["trace"] = gram.trace();
  j["min_eig"] = eigs(0);
  j["max_eig"] = eigs(eigs.size() - 1);
  return j.dump();
}

}  // namespace ntklab
