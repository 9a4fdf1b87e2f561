#include "ntklab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "ntklab/datagen.hpp"
#include "ntklab/idx.hpp"
#include "ntklab/kernelreg.hpp"
#include "ntklab/network.hpp"
#include "ntklab/ntk.hpp"
#include "ntklab/rng.hpp"
#include "ntklab/spectrum.hpp"
#include "ntklab/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ntklab {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json merged(const json& defaults, const json& params) {
  json out = defaults;
  for (auto it = params.begin(); it != params.end(); ++it) {
    out[it.key()] = it.value();
  }
  return out;
}

std::string config_hash(const json& resolved, std::uint64_t seed) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a(resolved.dump() + "#" + std::to_string(seed))));
  return buf;
}

// One experiment process at a time per output directory.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) : path_(dir / ".ntklab.lock") {
    fs::create_directories(dir);
    if (fs::exists(path_)) {
      throw std::runtime_error("output directory locked by another run: " + path_.string());
    }
    std::ofstream(path_) << "locked\n";
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  fs::path path_;
};

void write_manifest(const fs::path& dir, const std::string& subcommand, const json& resolved,
                    std::uint64_t seed) {
  json manifest;
  manifest["subcommand"] = subcommand;
  manifest["seed"] = seed;
  manifest["config"] = resolved;
  manifest["config_hash"] = config_hash(resolved, seed);
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

void write_report(const fs::path& dir, const RunReport& report) {
  std::ofstream(dir / "report.json") << report.to_json().dump(2) << '\n';
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MixtureSpec spec_from(const json& p) {
  const int d = p.at("d").get<int>();
  MixtureSpec spec = MixtureSpec::defaults(d);
  spec.eta = p.at("eta").get<double>();
  if (p.contains("mu_norm")) spec.mu(0) = p["mu_norm"].get<double>();
  if (p.contains("c_norm")) spec.c_norm = p["c_norm"].get<double>();
  if (p.contains("lambda_lc")) spec.lambda_lc = p["lambda_lc"].get<double>();
  return spec;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path,
                                             const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(f);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    j.erase("seed");
    j.erase("output_dir");
    cfg.params = j;
  }
  for (const auto& kv : overrides) cfg.apply_override(kv);
  return cfg;
}

void ExperimentConfig::apply_override(const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override must look like key=value: " + key_value);
  }
  const std::string key = key_value.substr(0, eq);
  const std::string raw = key_value.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  if (key == "seed") {
    seed = value.get<std::uint64_t>();
  } else if (key == "output_dir") {
    output_dir = value.get<std::string>();
  } else {
    params[key] = value;
  }
}

json RunReport::to_json() const {
  json j;
  j["subcommand"] = subcommand;
  json m = json::object();
  for (const auto& [k, v] : metrics) {
    if (std::isfinite(v)) {
      m[k] = v;
    } else {
      m[k] = nullptr;
    }
  }
  j["metrics"] = m;
  if (pass.has_value()) {
    j["pass"] = *pass;
  } else {
    j["pass"] = nullptr;
  }
  j["artifacts"] = artifacts;
  return j;
}

RunReport cmd_benign_class(const ExperimentConfig& cfg) {
  const json defaults = {
      {"n", 512},         {"n_test", 2048},    {"d", 64},          {"depth", 3},
      {"width", 1024},    {"eta", 0.1},        {"alpha", 1e-3},    {"epochs", 200},
      {"trace_every", 2048}, {"stop_train01", 0.01}, {"margin_n", 2048},
      {"lip_probes", 128},
  };
  const json p = merged(defaults, cfg.params);
  const fs::path dir = cfg.output_dir;
  DirLock lock(dir);
  write_manifest(dir, "benign-class", p, cfg.seed);

  const RngStream root{cfg.seed, 0};
  const MixtureSpec spec = spec_from(p);
  const MixtureDataset train = sample_mixture(spec, p["n"].get<int>(), root.substream("data"));
  const MixtureDataset test =
      sample_mixture(spec, p["n_test"].get<int>(), root.substream("test"));

  MixtureSpec clean_spec = spec;
  clean_spec.eta = 0.0;
  const MixtureDataset margin_set =
      sample_mixture(clean_spec, p["margin_n"].get<int>(), root.substream("margin"));
  const MarginProbe probe{margin_set.X, margin_set.y_clean};

  const NetConfig net{p["depth"].get<int>(), p["width"].get<int>(), p["d"].get<int>()};
  const WeightSet w0 = init_weights(net, root.substream("init"));

  RunReport report;
  report.subcommand = "benign-class";
  const int epochs = p["epochs"].get<int>();

  WeightSet w = w0;
  bool trained = false;
  if (epochs >= 1) {
    TrainConfig tc;
    tc.alpha = p["alpha"].get<double>();
    tc.epochs = epochs;
    tc.stop_train01 = p["stop_train01"].get<double>();
    tc.rng = root.substream("sgd");
    SgdResult result = sgd_run(w0, train, tc, p["trace_every"].get<int>(), &probe);
    w = std::move(result.weights);
    result.trace.write_csv((dir / "trace.csv").string());
    report.artifacts.push_back((dir / "trace.csv").string());
    report.metrics["steps"] = static_cast<double>(result.steps_taken);
    trained = true;
  } else {
    TrainTrace empty_trace;
    empty_trace.write_csv((dir / "trace.csv").string());
    report.artifacts.push_back((dir / "trace.csv").string());
    report.metrics["steps"] = 0.0;
  }

  const double train01 = test_error(w, train, /*use_clean=*/false);
  const double noisy_err = test_error(w, test, /*use_clean=*/false);
  const double clean_err = test_error(w, test, /*use_clean=*/true);
  const Vector probe_scores = forward_scores(w, probe.X);
  const double margin = probe_scores.dot(probe.y_clean) / probe_scores.size();

  const int n_probe = std::min<int>(p["lip_probes"].get<int>(), test.n());
  const LipschitzEstimates lip = lipschitz_estimates(w, test.X.topRows(n_probe));

  report.metrics["train01"] = train01;
  report.metrics["test_error_noisy"] = noisy_err;
  report.metrics["test_error_clean"] = clean_err;
  report.metrics["eta"] = spec.eta;
  report.metrics["margin"] = margin;
  report.metrics["lip_spectral"] = lip.spectral_upper;
  report.metrics["lip_empirical"] = lip.empirical_lower;
  report.metrics["bound"] =
      margin >= 0.0 ? classification_bound(spec.eta, spec.lambda_lc, margin, lip.spectral_upper)
                    : std::numeric_limits<double>::quiet_NaN();
  report.pass = trained && train01 <= 0.01 && noisy_err <= spec.eta + 0.08;
  write_report(dir, report);
  return report;
}

RunReport cmd_min_eig_sweep(const ExperimentConfig& cfg) {
  const json defaults = {
      {"grid", json::array({{256, 32, 2}, {256, 32, 3}, {64, 64, 2}, {64, 64, 3},
                            {32, 256, 2}, {32, 256, 3}})},
      {"seeds", 10},
      {"trend_d", 100},
      {"trend_points", 50},
  };
  const json p = merged(defaults, cfg.params);
  const fs::path dir = cfg.output_dir;
  DirLock lock(dir);
  write_manifest(dir, "min-eig-sweep", p, cfg.seed);

  const RngStream root{cfg.seed, 0};
  std::vector<SpectrumReport> all;
  int cell = 0;
  for (const auto& item : p["grid"]) {
    const int n = item.at(0).get<int>();
    const int d = item.at(1).get<int>();
    const int layers = item.at(2).get<int>();
    auto reports = verify_ntk_bound(n, d, layers, p["seeds"].get<int>(),
                                    root.substream("cell").substream(cell++));
    all.insert(all.end(), reports.begin(), reports.end());
  }
  write_spectrum_csv(all, (dir / "spectrum.csv").string());

  int holds = 0, inter = 0;
  for (const auto& r : all) {
    holds += r.holds;
    inter += r.intermediate_holds;
  }
  const TrendCheck trend =
      check_trend_table(p["trend_d"].get<int>(), p["trend_points"].get<int>(), 0.5);
  {
    std::ofstream f(dir / "trend.csv");
    f << "segment,ok\n";
    for (std::size_t i = 0; i < trend.segments.size(); ++i) {
      f << trend.segments[i] << ',' << int(trend.segment_ok[i]) << '\n';
    }
  }

  RunReport report;
  report.subcommand = "min-eig-sweep";
  report.metrics["holds_rate"] = all.empty() ? 0.0 : double(holds) / all.size();
  report.metrics["intermediate_rate"] = all.empty() ? 0.0 : double(inter) / all.size();
  report.metrics["trend_ok"] = trend.ok ? 1.0 : 0.0;
  report.metrics["branch_jump_at_d"] = trend.branch_jump_at_d;
  report.pass = holds == int(all.size()) && inter == int(all.size()) && trend.ok;
  report.artifacts = {(dir / "spectrum.csv").string(), (dir / "trend.csv").string()};
  write_report(dir, report);
  return report;
}

RunReport cmd_ntk_converge(const ExperimentConfig& cfg) {
  const json defaults = {
      {"widths", json::array({512, 2048, 8192})},
      {"n_points", 32}, {"d", 16}, {"depth", 2}, {"seeds", 10}, {"rel_tol", 0.05},
  };
  const json p = merged(defaults, cfg.params);
  const fs::path dir = cfg.output_dir;
  DirLock lock(dir);
  write_manifest(dir, "ntk-converge", p, cfg.seed);

  const RngStream root{cfg.seed, 0};
  const int n_points = p["n_points"].get<int>();
  const int d = p["d"].get<int>();
  const int depth = p["depth"].get<int>();
  const int seeds = p["seeds"].get<int>();
  const Matrix X = sample_sphere(n_points, d, root.substream("points"));
  const KernelMatrix lim = limiting_ntk(X, depth);
  const double lim_scale = lim.gram.mat().cwiseAbs().mean();

  std::ofstream csv(dir / "deviation.csv");
  csv << "width,seed,mean_abs_dev,mean_rel_dev\n";
  csv.precision(17);

  std::vector<double> medians, rel_medians;
  for (const auto& wj : p["widths"]) {
    const int width = wj.get<int>();
    std::vector<double> devs, rels;
    for (int s = 0; s < seeds; ++s) {
      const WeightSet w = init_weights(
          NetConfig{depth, width, d},
          root.substream("init").substream(width).substream(std::uint64_t(s)));
      const KernelMatrix emp = empirical_ntk(w, X);
      const double dev = (emp.gram.mat() - lim.gram.mat()).cwiseAbs().mean();
      devs.push_back(dev);
      rels.push_back(dev / lim_scale);
      csv << width << ',' << s << ',' << dev << ',' << dev / lim_scale << '\n';
    }
    medians.push_back(median(devs));
    rel_medians.push_back(median(rels));
  }

  RunReport report;
  report.subcommand = "ntk-converge";
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    decreasing = decreasing && medians[i] < medians[i - 1];
  }
  const double final_rel = rel_medians.back();
  report.metrics["final_median_rel_dev"] = final_rel;
  report.metrics["final_median_abs_dev"] = medians.back();
  const double rel_tol = p["rel_tol"].get<double>();
  if (final_rel > rel_tol) {
    report.pass = false;
  } else if (medians.size() < 2) {
    report.pass = std::nullopt;  // single width: trend not applicable
  } else {
    report.pass = decreasing;
  }
  report.artifacts = {(dir / "deviation.csv").string()};
  write_report(dir, report);
  return report;
}

RunReport cmd_assumption_check(const ExperimentConfig& cfg) {
  const json defaults = {
      {"mode", "synthetic"}, {"n", 1000},   {"d", 8},           {"eta", 0.0},
      {"seeds", 10},         {"depth", 2},  {"per_class", 100}, {"dominance_min", 8},
      {"images", ""},        {"labels", ""},
  };
  const json p = merged(defaults, cfg.params);
  const fs::path dir = cfg.output_dir;
  DirLock lock(dir);
  write_manifest(dir, "assumption-check", p, cfg.seed);

  const RngStream root{cfg.seed, 0};
  const KernelFn kernel = make_limiting_ntk_kernel(p["depth"].get<int>());
  RunReport report;
  report.subcommand = "assumption-check";

  if (p["mode"].get<std::string>() == "synthetic") {
    const int seeds = p["seeds"].get<int>();
    const MixtureSpec spec = spec_from(p);
    int positive = 0;
    double last_gap = 0.0;
    std::ofstream csv(dir / "gaps.csv");
    csv << "seed,gap\n";
    csv.precision(17);
    GapResult last;
    for (int s = 0; s < seeds; ++s) {
      const MixtureDataset data =
          sample_mixture(spec, p["n"].get<int>(), root.substream("data").substream(s));
      std::vector<int> labels(data.n());
      for (int i = 0; i < data.n(); ++i) labels[i] = data.y_clean(i) > 0 ? 1 : 0;
      last = assumption_gap(data.X, labels, kernel);
      last_gap = last.gap;
      positive += last.gap > 0.0;
      csv << s << ',' << last.gap << '\n';
    }
    report.metrics["gap"] = last_gap;
    report.metrics["positive_gap_seeds"] = positive;
    report.pass = positive == seeds;
    report.artifacts = {(dir / "gaps.csv").string()};
  } else {
    const IdxData data = load_idx(p["images"].get<std::string>(), p["labels"].get<std::string>());
    const int per_class = p["per_class"].get<int>();
    std::vector<int> take;
    std::map<int, int> used;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (used[data.labels[i]] < per_class) {
        take.push_back(static_cast<int>(i));
        ++used[data.labels[i]];
      }
    }
    Matrix X(take.size(), data.images.cols());
    std::vector<int> labels(take.size());
    for (std::size_t i = 0; i < take.size(); ++i) {
      X.row(i) = data.images.row(take[i]);
      labels[i] = data.labels[take[i]];
    }
    const GapResult gap = assumption_gap(X, labels, kernel);

    int dominant = 0;
    const int k = static_cast<int>(gap.classes.size());
    for (int a = 0; a < k; ++a) {
      bool row_ok = true;
      for (int b = 0; b < k; ++b) {
        if (b != a && gap.confusion(a, b) >= gap.confusion(a, a)) row_ok = false;
      }
      dominant += row_ok;
    }
    std::ofstream csv(dir / "confusion.csv");
    csv << "class";
    for (int b = 0; b < k; ++b) csv << ',' << gap.classes[b];
    csv << '\n';
    csv.precision(17);
    for (int a = 0; a < k; ++a) {
      csv << gap.classes[a];
      for (int b = 0; b < k; ++b) csv << ',' << gap.confusion(a, b);
      csv << '\n';
    }
    report.metrics["classes"] = k;
    report.metrics["diagonal_dominant_rows"] = dominant;
    report.pass = dominant >= p["dominance_min"].get<int>();
    report.artifacts = {(dir / "confusion.csv").string()};
  }
  write_report(dir, report);
  return report;
}

RunReport cmd_excess_risk_sweep(const ExperimentConfig& cfg) {
  const json defaults = {
      {"n_grid", json::array({16, 32, 64, 128, 256})},
      {"d", 64}, {"sigma_eps", 0.5}, {"seeds", 10}, {"k_centers", 16},
      {"n_test", 1000}, {"jitter", 0.0}, {"depth", 2},
  };
  const json p = merged(defaults, cfg.params);
  const fs::path dir = cfg.output_dir;
  DirLock lock(dir);
  write_manifest(dir, "excess-risk-sweep", p, cfg.seed);

  const RngStream root{cfg.seed, 0};
  const int d = p["d"].get<int>();
  const int seeds = p["seeds"].get<int>();
  const double sigma = p["sigma_eps"].get<double>();
  const KernelFn kernel = make_limiting_ntk_kernel(p["depth"].get<int>());

  std::ofstream csv(dir / "risk.csv");
  csv << "n,seed,excess_risk,std_err\n";
  csv.precision(17);

  std::vector<double> grid;
  for (const auto& nj : p["n_grid"]) grid.push_back(nj.get<double>());
  std::vector<double> medians;
  for (double nd : grid) {
    const int n = static_cast<int>(nd);
    std::vector<double> risks;
    for (int s = 0; s < seeds; ++s) {
      const RngStream sr = root.substream("seed").substream(s);
      const RkhsTarget target =
          make_rkhs_target(p["k_centers"].get<int>(), d, sigma, kernel, sr.substream("target"));
      const Matrix X = sample_sphere(n, d, sr.substream("x").substream(n));
      Vector y(n);
      auto eng = sr.substream("noise").substream(n).engine();
      std::normal_distribution<double> noise(0.0, 1.0);
      for (int i = 0; i < n; ++i) {
        y(i) = eval_rkhs_target(target, X.row(i), kernel) + sigma * noise(eng);
      }
      const KernelRegressor model = fit(X, y, kernel, p["jitter"].get<double>());
      const RiskReport risk =
          excess_risk([&](const Vector& x) { return predict(model, x); }, target, kernel,
                      p["n_test"].get<int>(), sr.substream("mc").substream(n));
      risks.push_back(risk.excess_risk);
      csv << n << ',' << s << ',' << risk.excess_risk << ',' << risk.std_err << '\n';
    }
    medians.push_back(median(risks));
  }

  RunReport report;
  report.subcommand = "excess-risk-sweep";
  report.artifacts = {(dir / "risk.csv").string()};
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    if (medians[i] > medians[argmax]) argmax = i;
  }
  report.metrics["peak_n"] = grid.empty() ? 0.0 : grid[argmax];
  report.metrics["peak_median_risk"] = medians.empty() ? 0.0 : medians[argmax];
  if (grid.size() < 3) {
    report.pass = std::nullopt;
  } else {
    report.pass = argmax > 0 && argmax + 1 < medians.size();
  }
  write_report(dir, report);
  return report;
}

}  // namespace ntklab
