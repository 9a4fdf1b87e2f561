#include "ntklab/datagen.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ntklab {

MixtureSpec MixtureSpec::defaults(int d) {
  MixtureSpec spec;
  spec.d = d;
  spec.mu = Vector::Zero(d);
  spec.mu(0) = 3.0;
  spec.c_norm = std::sqrt(static_cast<double>(d)) + 3.0;
  return spec;
}

void MixtureSpec::validate() const {
  if (d < 1) throw std::invalid_argument("MixtureSpec: d must be positive");
  if (mu.size() != d) throw std::invalid_argument("MixtureSpec: mu dimension mismatch");
  if (!(eta >= 0.0 && eta < 0.5)) {
    throw std::invalid_argument("MixtureSpec: eta must lie in [0, 1/2)");
  }
  if (!(lambda_lc > 0.0)) throw std::invalid_argument("MixtureSpec: lambda_lc must be positive");
  if (!(kappa_data > 0.0)) throw std::invalid_argument("MixtureSpec: kappa_data must be positive");
  if (!(c_norm > 0.0)) throw std::invalid_argument("MixtureSpec: c_norm must be positive");
}

MixtureDataset sample_mixture(const MixtureSpec& spec, int n, const RngStream& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("sample_mixture: n must be positive");

  auto eng = rng.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  MixtureDataset out;
  out.X.resize(n, spec.d);
  out.y.resize(n);
  out.y_clean.resize(n);
  out.noise_mask.assign(n, 0);

  for (int i = 0; i < n; ++i) {
    const double clean = unif(eng) < 0.5 ? 1.0 : -1.0;
    for (int j = 0; j < spec.d; ++j) {
      out.X(i, j) = normal(eng) + clean * spec.mu(j);
    }
    const bool flip = spec.eta > 0.0 && unif(eng) < spec.eta;
    out.y_clean(i) = clean;
    out.y(i) = flip ? -clean : clean;
    out.noise_mask[i] = flip ? 1 : 0;
  }

  // Uniform rescale so the largest row norm hits the cap; preserves geometry.
  const double max_norm = out.X.rowwise().norm().maxCoeff();
  out.scale = max_norm > 0.0 ? spec.c_norm / max_norm : 1.0;
  out.X *= out.scale;
  return out;
}

Matrix sample_sphere(int n, int d, const RngStream& rng) {
  if (n < 1 || d < 1) throw std::invalid_argument("sample_sphere: dimensions must be positive");
  auto eng = rng.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(n, d);
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    do {
      for (int j = 0; j < d; ++j) {
        out(i, j) = normal(eng);
      }
      norm2 = out.row(i).squaredNorm();
    } while (norm2 == 0.0);  // probability-zero resample
    out.row(i) /= std::sqrt(norm2);
  }
  return out;
}

RkhsTarget make_rkhs_target(int k, int d, double sigma_eps, const KernelFn& kernel,
                            const RngStream& rng) {
  if (k < 1 || d < 1) throw std::invalid_argument("make_rkhs_target: k, d must be positive");
  if (sigma_eps < 0.0) throw std::invalid_argument("make_rkhs_target: sigma_eps must be >= 0");
  RkhsTarget target;
  target.centers = sample_sphere(k, d, rng.substream("centers"));
  target.coeffs =
      sample_gaussian(rng.substream("coeffs"), k, 1, 1.0 / static_cast<double>(k)).col(0);
  target.sigma_eps = sigma_eps;

  Matrix kzz(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      kzz(i, j) = kernel(target.centers.row(i), target.centers.row(j));
      kzz(j, i) = kzz(i, j);
    }
  }
  target.rkhs_norm = std::sqrt(std::max(0.0, target.coeffs.dot(kzz * target.coeffs)));
  return target;
}

double eval_rkhs_target(const RkhsTarget& target, const Vector& x, const KernelFn& kernel) {
  if (x.size() != target.centers.cols()) {
    throw std::invalid_argument("eval_rkhs_target: dimension mismatch");
  }
  if (std::abs(x.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("eval_rkhs_target: input must be unit-norm");
  }
  double value = 0.0;
  for (int j = 0; j < target.centers.rows(); ++j) {
    value += target.coeffs(j) * kernel(x, target.centers.row(j));
  }
  return value;
}

void MixtureDataset::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  for (int j = 0; j < d(); ++j) f << 'x' << j << ',';
  f << "y,y_clean,is_noisy\n";
  f.precision(17);
  for (int i = 0; i < n(); ++i) {
    for (int j = 0; j < d(); ++j) f << X(i, j) << ',';
    f << y(i) << ',' << y_clean(i) << ',' << int(noise_mask[i]) << '\n';
  }
}

}  // namespace ntklab
