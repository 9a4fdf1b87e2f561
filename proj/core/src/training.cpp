#include "ntklab/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ntklab/errors.hpp"

namespace ntklab {

double logistic_loss(double z) {
  if (z > 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double loss_derivative_g(double z) {
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("TrainConfig: alpha must be >= 0");
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (stop_risk < 0.0) throw std::invalid_argument("TrainConfig: stop_risk must be >= 0");
}

namespace {

double mean_risk(const Vector& scores, const Vector& y) {
  double total = 0.0;
  for (int i = 0; i < scores.size(); ++i) {
    total += logistic_loss(y(i) * scores(i));
  }
  return total / scores.size();
}

double zero_one(const Vector& scores, const Vector& y) {
  int wrong = 0;
  for (int i = 0; i < scores.size(); ++i) {
    const double sign = scores(i) >= 0.0 ? 1.0 : -1.0;
    if (sign != y(i)) ++wrong;
  }
  return static_cast<double>(wrong) / scores.size();
}

}  // namespace

SgdResult sgd_run(const WeightSet& w0, const MixtureDataset& data, const TrainConfig& cfg,
                  int trace_every, const MarginProbe* margin_probe) {
  cfg.validate();
  if (trace_every < 1) throw std::invalid_argument("sgd_run: trace_every must be >= 1");
  if (data.n() < 1) throw std::invalid_argument("sgd_run: empty dataset");
  if (data.d() != w0.input_dim()) throw std::invalid_argument("sgd_run: dimension mismatch");

  SgdResult result;
  result.weights = w0;
  WeightSet& w = result.weights;
  const int n = data.n();
  const int hidden = w.depth() - 1;

  auto record = [&](long step, double sample_loss) {
    TraceRecord rec;
    rec.step = step;
    rec.sample_loss = sample_loss;
    const Vector scores = forward_scores(w, data.X);
    rec.risk = mean_risk(scores, data.y);
    rec.train01 = zero_one(scores, data.y);
    if (margin_probe != nullptr && margin_probe->X.rows() > 0) {
      const Vector probe_scores = forward_scores(w, margin_probe->X);
      rec.margin = probe_scores.dot(margin_probe->y_clean) / probe_scores.size();
    } else {
      rec.margin = std::numeric_limits<double>::quiet_NaN();
    }
    rec.drift = weight_distance(w, w0);
    result.trace.records.push_back(std::move(rec));
    return result.trace.records.back();
  };

  record(0, std::numeric_limits<double>::quiet_NaN());

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto eng = cfg.rng.engine();

  long step = 0;
  bool done = false;
  for (int epoch = 0; epoch < cfg.epochs && !done; ++epoch) {
    if (epoch > 0 && cfg.shuffle) {
      std::shuffle(order.begin(), order.end(), eng);
    }
    for (int idx : order) {
      const Vector x = data.X.row(idx);
      const double y = data.y(idx);
      GradientFactors gf = gradient_factors(w, x);
      const double f = w.layers.back().row(0).dot(gf.acts[hidden - 1]);
      if (!std::isfinite(f) || std::abs(f) > 1e8) {
        throw DivergenceError("sgd_run: score diverged at step " + std::to_string(step + 1),
                              step + 1);
      }
      const double loss = logistic_loss(y * f);
      if (!std::isfinite(loss)) {
        throw DivergenceError("sgd_run: non-finite loss at step " + std::to_string(step + 1),
                              step + 1);
      }
      // W <- W + alpha g(yf) y grad f, the chain rule of the logistic update.
      const double coef = cfg.alpha * loss_derivative_g(y * f) * y;
      if (coef != 0.0) {
        for (int l = 0; l < hidden; ++l) {
          const Vector& below = (l == 0) ? gf.input : gf.acts[l - 1];
          w.layers[l].noalias() += coef * gf.backs[l] * below.transpose();
        }
        w.layers.back().row(0) += coef * gf.acts[hidden - 1].transpose();
      }
      ++step;
      if (step % trace_every == 0) {
        const TraceRecord rec = record(step, loss);
        if (rec.risk <= cfg.stop_risk ||
            (cfg.stop_train01 >= 0.0 && rec.train01 <= cfg.stop_train01)) {
          done = true;
          break;
        }
      }
    }
  }
  if (result.trace.records.back().step != step) {
    record(step, std::numeric_limits<double>::quiet_NaN());
  }
  result.steps_taken = step;
  return result;
}

double empirical_risk(const WeightSet& w, const MixtureDataset& data) {
  if (data.n() < 1) throw std::invalid_argument("empirical_risk: empty dataset");
  return mean_risk(forward_scores(w, data.X), data.y);
}

double test_error(const WeightSet& w, const MixtureDataset& test, bool use_clean) {
  if (test.n() < 1) throw std::invalid_argument("test_error: empty test set");
  return zero_one(forward_scores(w, test.X), use_clean ? test.y_clean : test.y);
}

double classification_bound(double eta, double lambda_lc, double margin, double lip) {
  if (margin < 0.0) {
    throw std::invalid_argument("classification_bound: requires non-negative margin");
  }
  if (!(lip > 0.0)) {
    throw std::invalid_argument("classification_bound: requires positive Lipschitz estimate");
  }
  const double ratio = margin / lip;
  return eta + std::exp(-0.25 * lambda_lc * ratio * ratio);
}

void TrainTrace::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("TrainTrace::write_csv: cannot open " + path);
  const std::size_t layers = records.empty() ? 0 : records.front().drift.size();
  f << "step,risk,margin,train01";
  for (std::size_t l = 1; l <= layers; ++l) f << ",drift_l" << l;
  f << '\n';
  f.precision(17);
  for (const TraceRecord& rec : records) {
    f << rec.step << ',' << rec.risk << ',' << rec.margin << ',' << rec.train01;
    for (double d : rec.drift) f << ',' << d;
    f << '\n';
  }
}

}  // namespace ntklab
