// Acceptance gate: one check per criterion, each printing a single
// "criterion N: PASS/FAIL" line. Run with --criterion N for one of them or
// with no selection for the full gate; --data-dir points at the directory
// holding the image-classification IDX files.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ntklab/datagen.hpp"
#include "ntklab/idx.hpp"
#include "ntklab/kernelreg.hpp"
#include "ntklab/network.hpp"
#include "ntklab/ntk.hpp"
#include "ntklab/rng.hpp"
#include "ntklab/spectrum.hpp"
#include "ntklab/training.hpp"

using namespace ntklab;

namespace {

constexpr double kPi = 3.14159265358979323846;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- criterion 1: two-layer closed form ------------------------------------

bool criterion1(std::string& detail) {
  const Matrix X = sample_sphere(64, 16, RngStream{1001, 0});
  const KernelMatrix k = limiting_ntk(X, 2);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      worst = std::max(worst, std::abs(k.gram(i, j) - ntk_2layer_closed(X.row(i), X.row(j))));
    }
  }
  detail = "max |recursion - closed form| = " + std::to_string(worst);
  return worst <= 1e-12;
}

// ---- criterion 2: finite-width convergence ---------------------------------

bool criterion2(std::string& detail) {
  const int n_points = 32, d = 16, seeds = 10;
  const Matrix X = sample_sphere(n_points, d, RngStream{1002, 0});
  const KernelMatrix lim = limiting_ntk(X, 2);
  const double scale = lim.gram.mat().cwiseAbs().mean();
  std::vector<double> medians;
  for (int width : {512, 2048, 8192}) {
    std::vector<double> devs;
    for (int s = 0; s < seeds; ++s) {
      const WeightSet w = init_weights(NetConfig{2, width, d},
                                       RngStream{1002, 1}.substream(width).substream(s));
      const KernelMatrix emp = empirical_ntk(w, X);
      devs.push_back((emp.gram.mat() - lim.gram.mat()).cwiseAbs().mean());
    }
    medians.push_back(median(devs));
  }
  const bool decreasing = medians[1] < medians[0] && medians[2] < medians[1];
  const double final_rel = medians[2] / scale;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "median devs %.4g > %.4g > %.4g, final rel %.3f%%",
                medians[0], medians[1], medians[2], 100.0 * final_rel);
  detail = buf;
  return decreasing && final_rel <= 0.05;
}

// ---- criterion 3: minimum-eigenvalue bound ---------------------------------

bool criterion3(std::string& detail) {
  const int grid[3][2] = {{256, 32}, {64, 64}, {32, 256}};
  int holds = 0, inter = 0, total = 0;
  int cell = 0;
  for (const auto& nd : grid) {
    for (int layers : {2, 3}) {
      const auto reports =
          verify_ntk_bound(nd[0], nd[1], layers, 10, RngStream{1003, 0}.substream(cell++));
      for (const auto& r : reports) {
        holds += r.holds;
        inter += r.intermediate_holds;
        ++total;
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "bound holds %d/%d, intermediate inequality %d/%d",
                holds, total, inter, total);
  detail = buf;
  return holds == total && inter == total;
}

// ---- criterion 4: trend-table arrows ---------------------------------------

bool criterion4(std::string& detail) {
  const TrendCheck check = check_trend_table(100, 50, 0.5);
  detail = "segments";
  for (std::size_t i = 0; i < check.segments.size(); ++i) {
    detail += " " + check.segments[i] + (check.segment_ok[i] ? "=ok" : "=BAD");
  }
  return check.ok;
}

// ---- criteria 5 and 6: benign overfitting + margin growth ------------------

struct TrainOutcome {
  double train01 = 1.0;
  double clean_err = 1.0;
  double noisy_err = 1.0;
  double margin_slope = 0.0;
};

const std::vector<TrainOutcome>& benign_runs() {
  static std::vector<TrainOutcome> cache;
  if (!cache.empty()) return cache;
  const int n = 512, d = 64, depth = 3, width = 1024, n_test = 2048, margin_n = 2048;
  const MixtureSpec spec = MixtureSpec::defaults(d);
  MixtureSpec clean_spec = spec;
  clean_spec.eta = 0.0;
  for (int s = 0; s < 10; ++s) {
    const RngStream root{2000 + static_cast<std::uint64_t>(s), 0};
    const MixtureDataset train = sample_mixture(spec, n, root.substream("data"));
    const MixtureDataset test = sample_mixture(spec, n_test, root.substream("test"));
    const MixtureDataset margin_set =
        sample_mixture(clean_spec, margin_n, root.substream("margin"));
    const MarginProbe probe{margin_set.X, margin_set.y_clean};
    const WeightSet w0 = init_weights(NetConfig{depth, width, d}, root.substream("init"));
    TrainConfig tc;
    // Step size must scale like 1/width: the raw gradient kernel carries an
    // m/2 factor from the unit-variance output layer. 1e-3 at m=1024 keeps
    // SGD stable while the clean margin grows enough to dominate the O(1)
    // random initial function, which sets the clean-test error floor.
    tc.alpha = 1e-3;
    tc.epochs = 100;
    tc.rng = root.substream("sgd");
    const SgdResult res = sgd_run(w0, train, tc, 2048, &probe);

    TrainOutcome out;
    out.train01 = res.trace.records.back().train01;
    out.noisy_err = test_error(res.weights, test, false);
    out.clean_err = test_error(res.weights, test, true);

    // least-squares slope of the margin statistic against the step index
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const TraceRecord& rec : res.trace.records) {
      if (!std::isfinite(rec.margin)) continue;
      const double x = static_cast<double>(rec.step);
      sx += x;
      sy += rec.margin;
      sxx += x * x;
      sxy += x * rec.margin;
      ++m;
    }
    const double denom = m * sxx - sx * sx;
    out.margin_slope = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    cache.push_back(out);
  }
  return cache;
}

bool criterion5(std::string& detail) {
  const auto& runs = benign_runs();
  int fit = 0, generalized = 0;
  for (int s = 0; s < 5; ++s) {
    fit += runs[s].train01 <= 0.01;
    generalized += runs[s].clean_err <= 0.05 && runs[s].noisy_err <= 0.1 + 0.08;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "train01<=1%% in %d/5, test thresholds met in %d/5", fit,
                generalized);
  detail = buf;
  return fit == 5 && generalized >= 4;
}

bool criterion6(std::string& detail) {
  const auto& runs = benign_runs();
  int positive = 0;
  for (const TrainOutcome& out : runs) positive += out.margin_slope > 0.0;
  detail = "positive margin slope in " + std::to_string(positive) + "/10 seeds";
  return positive >= 9;
}

// ---- criterion 7: class-similarity gaps ------------------------------------

bool criterion7(const std::string& data_dir, std::string& detail) {
  const KernelFn kernel = make_limiting_ntk_kernel(2);

  MixtureSpec spec = MixtureSpec::defaults(8);
  spec.eta = 0.0;
  int positive = 0;
  for (int s = 0; s < 10; ++s) {
    const MixtureDataset data =
        sample_mixture(spec, 1000, RngStream{1007, 0}.substream(s));
    std::vector<int> labels(data.n());
    for (int i = 0; i < data.n(); ++i) labels[i] = data.y_clean(i) > 0 ? 1 : 0;
    positive += assumption_gap(data.X, labels, kernel).gap > 0.0;
  }

  const IdxData idx = load_idx(data_dir + "/mnist/images.idx", data_dir + "/mnist/labels.idx");
  std::vector<int> take;
  std::map<int, int> used;
  for (std::size_t i = 0; i < idx.labels.size(); ++i) {
    if (used[idx.labels[i]] < 100) {
      take.push_back(static_cast<int>(i));
      ++used[idx.labels[i]];
    }
  }
  Matrix X(take.size(), idx.images.cols());
  std::vector<int> labels(take.size());
  for (std::size_t i = 0; i < take.size(); ++i) {
    X.row(i) = idx.images.row(take[i]);
    labels[i] = idx.labels[take[i]];
  }
  const GapResult gap = assumption_gap(X, labels, kernel);
  int dominant = 0;
  const int k = static_cast<int>(gap.classes.size());
  for (int a = 0; a < k; ++a) {
    bool ok = true;
    for (int b = 0; b < k; ++b) {
      if (b != a && gap.confusion(a, b) >= gap.confusion(a, a)) ok = false;
    }
    dominant += ok;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "synthetic gap>0 in %d/10 seeds, diagonal dominance in %d/%d classes", positive,
                dominant, k);
  detail = buf;
  return positive == 10 && dominant >= 8;
}

// ---- criterion 8: Hermite + arc-cosine identities --------------------------

void leggauss(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Quadrant-restricted quadrature of the two bivariate Gaussian expectations;
// on u, v >= 0 both integrands are analytic, so this converges to machine
// precision where naive whole-plane quadrature stalls on the ReLU kinks.
void gaussian_quadrant_moments(double rho, double& e_ind, double& e_relu) {
  const int panels = 12, per = 20;
  const double r_max = 12.0;
  std::vector<double> gx, gw;
  leggauss(per, gx, gw);
  std::vector<double> u, wu;
  for (int p = 0; p < panels; ++p) {
    const double a = r_max * p / panels, b = r_max * (p + 1) / panels;
    for (int i = 0; i < per; ++i) {
      u.push_back(0.5 * (b - a) * (gx[i] + 1.0) + a);
      wu.push_back(0.5 * (b - a) * gw[i]);
    }
  }
  const double s = std::sqrt(1.0 - rho * rho);
  e_ind = 0.0;
  e_relu = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double z = (u[j] - rho * u[i]) / s;
      const double p = std::exp(-0.5 * (u[i] * u[i] + z * z)) / (2.0 * kPi * s);
      const double wt = wu[i] * wu[j] * p;
      e_ind += wt;
      e_relu += wt * u[i] * u[j];
    }
  }
}

bool criterion8(std::string& detail) {
  const double mu1_err = std::abs(hermite_mu1() - 0.5);
  double worst = 0.0;
  for (double rho : {-0.9, 0.0, 0.5, 0.99}) {
    double e_ind = 0.0, e_relu = 0.0;
    gaussian_quadrant_moments(rho, e_ind, e_relu);
    worst = std::max(worst, std::abs(kappa0(rho) - 2.0 * e_ind));
    worst = std::max(worst, std::abs(kappa1(rho) - 2.0 * e_relu));
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "|mu1 - 1/2| = %.3g, max kappa identity error = %.3g",
                mu1_err, worst);
  detail = buf;
  return mu1_err <= 1e-8 && worst <= 1e-6;
}

// ---- criterion 9: backprop vs finite differences ---------------------------

bool criterion9(std::string& detail) {
  double worst = 0.0;
  int checked = 0;
  for (int net = 0; net < 5; ++net) {
    const NetConfig cfg{3, 24, 6};
    WeightSet w = init_weights(cfg, RngStream{1009, static_cast<std::uint64_t>(net)});
    const Vector x =
        sample_gaussian(RngStream{1009, 100 + static_cast<std::uint64_t>(net)}, 6, 1, 1.0)
            .col(0);
    const std::vector<Matrix> g = gradient(w, x);
    const SignPattern base = sign_pattern(w, x);
    auto eng = RngStream{1009, 200 + static_cast<std::uint64_t>(net)}.engine();
    const double h = 1e-6;
    int net_checked = 0;
    for (int trial = 0; trial < 200 && net_checked < 50; ++trial) {
      const int l = static_cast<int>(eng() % w.layers.size());
      const int r = static_cast<int>(eng() % w.layers[l].rows());
      const int c = static_cast<int>(eng() % w.layers[l].cols());
      const double orig = w.layers[l](r, c);
      w.layers[l](r, c) = orig + h;
      const double fp = forward(w, x).output;
      const bool kp = sign_pattern(w, x).masks == base.masks;
      w.layers[l](r, c) = orig - h;
      const double fm = forward(w, x).output;
      const bool km = sign_pattern(w, x).masks == base.masks;
      w.layers[l](r, c) = orig;
      if (!kp || !km) continue;  // a kink sits inside the probe interval
      const double fd = (fp - fm) / (2.0 * h);
      const double rel =
          std::abs(fd - g[l](r, c)) / std::max({1.0, std::abs(fd), std::abs(g[l](r, c))});
      worst = std::max(worst, rel);
      ++net_checked;
    }
    checked += net_checked;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d coordinates checked, worst relative error %.3g", checked,
                worst);
  detail = buf;
  return checked >= 250 && worst <= 1e-5;
}

// ---- criterion 10: interpolation + network-vs-regressor trend --------------

bool criterion10(std::string& detail) {
  const Matrix Xi = sample_sphere(32, 8, RngStream{1010, 0});
  const Vector yi = sample_gaussian(RngStream{1010, 1}, 32, 1, 1.0).col(0);
  const KernelRegressor interp = fit(Xi, yi, make_limiting_ntk_kernel(2), 0.0);
  const double interp_err = (predict_batch(interp, Xi) - yi).cwiseAbs().maxCoeff();

  // Under the standard-variance output init the raw gradient kernel is
  // dominated by the hidden-layer terms (the output-layer part is smaller by
  // m/2), so the lazy limit of plain GD is regression with the hidden part of
  // the tangent kernel: u * kappa0(u) at depth 2 on unit-norm inputs.
  const KernelFn kernel =
      make_dot_product_kernel([](double u) { return u * kappa0(u); });

  const int n = 16, d = 32;
  std::vector<double> med_gaps;
  for (int width : {512, 2048, 8192}) {
    std::vector<double> gaps;
    for (int s = 0; s < 9; ++s) {
      const RngStream root{1010, 10 + static_cast<std::uint64_t>(s)};
      const Matrix X = sample_sphere(n, d, root.substream("x"));
      const Vector y = sample_gaussian(root.substream("y"), n, 1, 1.0).col(0);
      const Matrix X_test = sample_sphere(64, d, root.substream("test"));
      const WeightSet w0 =
          init_weights(NetConfig{2, width, d}, root.substream("w0").substream(width));
      const WeightSet wt = gd_squared_loss(w0, X, y, 4.0 / width, 3000);
      // the lazy limit of the trained network is the initial function plus
      // the kernel fit of the initial residuals
      const Vector f0_train = forward_scores(w0, X);
      const KernelRegressor model = fit(X, Vector(y - f0_train), kernel, 0.0);
      const Vector lazy =
          forward_scores(w0, X_test) + predict_batch(model, X_test);
      const Vector actual = forward_scores(wt, X_test);
      gaps.push_back((actual - lazy).cwiseAbs().maxCoeff());
    }
    med_gaps.push_back(median(gaps));
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "interpolation error %.2g, median gaps %.4g > %.4g > %.4g", interp_err,
                med_gaps[0], med_gaps[1], med_gaps[2]);
  detail = buf;
  return interp_err <= 1e-6 && med_gaps[1] < med_gaps[0] && med_gaps[2] < med_gaps[1];
}

// ---- criterion 11: excess-risk peak ----------------------------------------

bool criterion11(std::string& detail) {
  const int d = 64, seeds = 10, k_centers = 16, n_test = 1000;
  const double sigma = 0.5;
  const KernelFn kernel = make_limiting_ntk_kernel(2);
  const std::vector<int> grid = {16, 32, 64, 128, 256};
  std::vector<double> medians;
  for (int n : grid) {
    std::vector<double> risks;
    for (int s = 0; s < seeds; ++s) {
      const RngStream sr = RngStream{1011, 0}.substream(s);
      const RkhsTarget target =
          make_rkhs_target(k_centers, d, sigma, kernel, sr.substream("target"));
      const Matrix X = sample_sphere(n, d, sr.substream("x").substream(n));
      Vector y(n);
      auto eng = sr.substream("noise").substream(n).engine();
      std::normal_distribution<double> noise(0.0, 1.0);
      for (int i = 0; i < n; ++i) {
        y(i) = eval_rkhs_target(target, X.row(i), kernel) + sigma * noise(eng);
      }
      const KernelRegressor model = fit(X, y, kernel, 0.0);
      risks.push_back(excess_risk([&](const Vector& x) { return predict(model, x); }, target,
                                  kernel, n_test, sr.substream("mc").substream(n))
                          .excess_risk);
    }
    medians.push_back(median(risks));
  }
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (medians[i] > medians[argmax]) argmax = i;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf), "median risk peaks at n = %d (%.4g)", grid[argmax],
                medians[argmax]);
  detail = buf;
  return argmax >= 1 && argmax <= 3;  // interior peak: n in {32, 64, 128}
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;  // 0 = all
  std::string data_dir = "data";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--data-dir") == 0 && i + 1 < argc) {
      data_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--data-dir DIR]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::function<bool(std::string&)>> checks = {
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6,
      [&data_dir](std::string& d) { return criterion7(data_dir, d); },
      criterion8, criterion9, criterion10, criterion11,
  };

  bool all_pass = true;
  for (int id = 1; id <= static_cast<int>(checks.size()); ++id) {
    if (selected != 0 && selected != id) continue;
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = checks[id - 1](detail);
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%s) [%.1fs]\n", id, ok ? "PASS" : "FAIL", detail.c_str(),
                secs);
    std::fflush(stdout);
    all_pass = all_pass && ok;
  }
  return all_pass ? 0 : 1;
}
