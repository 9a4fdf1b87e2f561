#include "ntklab/network.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "ntklab/errors.hpp"

namespace ntklab {
namespace {

void check_input(const WeightSet& w, const Vector& x, const char* who) {
  if (x.size() != w.input_dim()) {
    throw std::invalid_argument(std::string(who) + ": input dimension mismatch");
  }
}

void check_shapes(const WeightSet& w) {
  if (w.layers.size() < 2) throw std::invalid_argument("WeightSet: depth must be >= 2");
  const int m = static_cast<int>(w.layers.front().rows());
  for (std::size_t l = 1; l + 1 < w.layers.size(); ++l) {
    if (w.layers[l].rows() != m || w.layers[l].cols() != m) {
      throw std::invalid_argument("WeightSet: inner layer shape mismatch");
    }
  }
  if (w.layers.back().rows() != 1 || w.layers.back().cols() != m) {
    throw std::invalid_argument("WeightSet: output layer shape mismatch");
  }
}

}  // namespace

void NetConfig::validate() const {
  if (depth < 2) throw std::invalid_argument("NetConfig: depth must be >= 2");
  if (width < 1) throw std::invalid_argument("NetConfig: width must be >= 1");
  if (input_dim < 1) throw std::invalid_argument("NetConfig: input_dim must be >= 1");
}

WeightSet init_weights(const NetConfig& cfg, const RngStream& rng) {
  cfg.validate();
  WeightSet w;
  w.layers.reserve(cfg.depth);
  const double hidden_var = 2.0 / cfg.width;
  for (int l = 0; l < cfg.depth; ++l) {
    const int rows = (l == cfg.depth - 1) ? 1 : cfg.width;
    const int cols = (l == 0) ? cfg.input_dim : cfg.width;
    const double var = (l == cfg.depth - 1) ? 1.0 : hidden_var;
    w.layers.push_back(sample_gaussian(rng.substream(static_cast<std::uint64_t>(l)),
                                       rows, cols, var));
  }
  return w;
}

ForwardRecord forward(const WeightSet& w, const Vector& x) {
  check_shapes(w);
  check_input(w, x, "forward");
  ForwardRecord rec;
  const int hidden = w.depth() - 1;
  rec.preacts.reserve(hidden);
  rec.acts.reserve(hidden);
  Vector h = x;
  for (int l = 0; l < hidden; ++l) {
    Vector z = w.layers[l] * h;
    rec.preacts.push_back(z);
    h = z.cwiseMax(0.0);
    rec.acts.push_back(h);
  }
  rec.output = (w.layers.back() * h)(0);
  return rec;
}

Vector forward_scores(const WeightSet& w, const Matrix& X) {
  check_shapes(w);
  if (X.cols() != w.input_dim()) {
    throw std::invalid_argument("forward_scores: input dimension mismatch");
  }
  Matrix h = X;
  for (int l = 0; l + 1 < w.depth(); ++l) {
    h = (h * w.layers[l].transpose()).cwiseMax(0.0);
  }
  return h * w.layers.back().transpose().col(0);
}

GradientFactors gradient_factors(const WeightSet& w, const Vector& x) {
  check_shapes(w);
  check_input(w, x, "gradient");
  GradientFactors gf;
  gf.input = x;
  const int hidden = w.depth() - 1;
  gf.acts.reserve(hidden);
  std::vector<Vector> preacts;
  preacts.reserve(hidden);
  Vector h = x;
  for (int l = 0; l < hidden; ++l) {
    Vector z = w.layers[l] * h;
    preacts.push_back(z);
    h = z.cwiseMax(0.0);
    gf.acts.push_back(h);
  }
  gf.backs.assign(hidden, Vector());
  Vector b = w.layers.back().transpose().col(0);
  for (int l = hidden - 1; l >= 0; --l) {
    // Tie at preactivation 0 counts as active.
    b = (preacts[l].array() >= 0.0).select(b, 0.0);
    gf.backs[l] = b;
    if (l > 0) b = w.layers[l].transpose() * b;
  }
  return gf;
}

std::vector<Matrix> gradient(const WeightSet& w, const Vector& x) {
  GradientFactors gf = gradient_factors(w, x);
  const int hidden = w.depth() - 1;
  std::vector<Matrix> grads(w.depth());
  for (int l = 0; l < hidden; ++l) {
    const Vector& below = (l == 0) ? gf.input : gf.acts[l - 1];
    grads[l] = gf.backs[l] * below.transpose();
  }
  grads[hidden] = gf.acts[hidden - 1].transpose();
  return grads;
}

Vector input_gradient(const WeightSet& w, const Vector& x) {
  GradientFactors gf = gradient_factors(w, x);
  return w.layers.front().transpose() * gf.backs.front();
}

SignPattern sign_pattern(const WeightSet& w, const Vector& x) {
  check_shapes(w);
  check_input(w, x, "sign_pattern");
  SignPattern sp;
  const int hidden = w.depth() - 1;
  sp.masks.reserve(hidden);
  Vector h = x;
  for (int l = 0; l < hidden; ++l) {
    Vector z = w.layers[l] * h;
    std::vector<char> mask(z.size());
    for (int k = 0; k < z.size(); ++k) mask[k] = z(k) >= 0.0;
    sp.masks.push_back(std::move(mask));
    h = z.cwiseMax(0.0);
  }
  return sp;
}

std::vector<double> weight_distance(const WeightSet& w, const WeightSet& w0) {
  if (w.layers.size() != w0.layers.size()) {
    throw std::invalid_argument("weight_distance: depth mismatch");
  }
  std::vector<double> dist(w.layers.size());
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    if (w.layers[l].rows() != w0.layers[l].rows() ||
        w.layers[l].cols() != w0.layers[l].cols()) {
      throw std::invalid_argument("weight_distance: shape mismatch");
    }
    dist[l] = (w.layers[l] - w0.layers[l]).norm();
  }
  return dist;
}

double max_layer_distance(const WeightSet& w, const WeightSet& w0) {
  const auto dist = weight_distance(w, w0);
  double mx = 0.0;
  for (double v : dist) mx = std::max(mx, v);
  return mx;
}

double spectral_norm(const Matrix& a) {
  const int n = static_cast<int>(a.cols());
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double sigma = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector av = a * v;
    const double next = av.norm();
    if (next == 0.0) return 0.0;
    v = a.transpose() * av;
    const double vn = v.norm();
    if (vn == 0.0) return next;
    v /= vn;
    if (std::abs(next - sigma) <= 1e-10 * next) {
      return next;
    }
    sigma = next;
  }
  return sigma;
}

LipschitzEstimates lipschitz_estimates(const WeightSet& w, const Matrix& probe_inputs) {
  check_shapes(w);
  if (probe_inputs.rows() < 1) {
    throw std::invalid_argument("lipschitz_estimates: empty probe set");
  }
  if (probe_inputs.cols() != w.input_dim()) {
    throw std::invalid_argument("lipschitz_estimates: probe dimension mismatch");
  }
  LipschitzEstimates est;
  est.spectral_upper = 1.0;
  for (const Matrix& layer : w.layers) {
    est.spectral_upper *= spectral_norm(layer);
  }
  for (int i = 0; i < probe_inputs.rows(); ++i) {
    est.empirical_lower =
        std::max(est.empirical_lower, input_gradient(w, probe_inputs.row(i)).norm());
  }
  return est;
}

void WeightSet::save(const std::string& path) const {
  check_shapes(*this);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("WeightSet::save: cannot open " + path);
  const char magic[4] = {'N', 'T', 'K', 'W'};
  f.write(magic, 4);
  const std::int32_t header[3] = {static_cast<std::int32_t>(depth()),
                                  static_cast<std::int32_t>(width()),
                                  static_cast<std::int32_t>(input_dim())};
  f.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (const Matrix& layer : layers) {
    // Row-major, little-endian 64-bit floats.
    for (int i = 0; i < layer.rows(); ++i) {
      for (int j = 0; j < layer.cols(); ++j) {
        const double v = layer(i, j);
        f.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
    }
  }
  nlohmann::json sidecar;
  sidecar["depth"] = depth();
  sidecar["width"] = width();
  sidecar["input_dim"] = input_dim();
  auto& shapes = sidecar["shapes"];
  for (const Matrix& layer : layers) {
    shapes.push_back({layer.rows(), layer.cols()});
  }
  std::ofstream js(path + ".json");
  js << sidecar.dump(2) << '\n';
}

WeightSet WeightSet::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("WeightSet::load: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || magic[0] != 'N' || magic[1] != 'T' || magic[2] != 'K' || magic[3] != 'W') {
    throw FormatError(path + ": bad checkpoint magic at byte offset 0");
  }
  std::int32_t header[3];
  f.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!f) throw FormatError(path + ": truncated header at byte offset 4");
  NetConfig cfg{header[0], header[1], header[2]};
  cfg.validate();
  WeightSet w;
  for (int l = 0; l < cfg.depth; ++l) {
    const int rows = (l == cfg.depth - 1) ? 1 : cfg.width;
    const int cols = (l == 0) ? cfg.input_dim : cfg.width;
    Matrix layer(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        double v;
        f.read(reinterpret_cast<char*>(&v), sizeof(double));
        if (!f) throw FormatError(path + ": truncated payload in layer " + std::to_string(l));
        layer(i, j) = v;
      }
    }
    w.layers.push_back(std::move(layer));
  }
  return w;
}

}  // namespace ntklab
