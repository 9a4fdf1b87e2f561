#include "ntklab/spectrum.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "ntklab/datagen.hpp"
#include "ntklab/ntk.hpp"

namespace ntklab {
namespace {

// Adaptive Simpson on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  // Unit-width panels: the integrands are concentrated near the origin, and
  // a single coarse Simpson triple over a long interval would see only
  // (numerically) zero samples and terminate immediately.
  const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels;
    const double hi = a + (b - a) * (p + 1) / panels;
    const double mid = 0.5 * (lo + hi);
    total += adaptive_simpson(f, lo, hi, f(lo), f(mid), f(hi), tol / panels, 48);
  }
  return total;
}

double gauss_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

double hermite_mu1() {
  // relu(g) g integrates over g > 0 only.
  return integrate([](double z) { return z * z * gauss_pdf(z); }, 0.0, 40.0, 1e-13);
}

double hermite_mu0() {
  return integrate([](double z) { return z * gauss_pdf(z); }, 0.0, 40.0, 1e-13);
}

double bound_constant_c() { return std::pow(2.0, 3.5) * std::sqrt(std::log(9.0)); }

double ntk_lower_bound(const BoundInputs& b) {
  if (b.n < 1 || b.d < 1) throw std::invalid_argument("ntk_lower_bound: n, d must be >= 1");
  if (!(b.mu1 > 0.0)) throw std::invalid_argument("ntk_lower_bound: mu1 must be positive");
  const double n = b.n, d = b.d;
  const double lead = 2.0 * b.mu1 * b.mu1 * n / d;
  if (b.n >= b.d) {
    const double t = 0.75 - 0.25 * b.c_abs * std::sqrt(d / n);
    return lead * t * t;
  }
  const double t = std::sqrt(d / n) - 0.25 * (b.c_abs + 6.0);
  return lead * t * t;
}

double cov_min_eig_bound(int n, int d, double lambda_min_sigma) {
  if (n < 1 || d < 1) throw std::invalid_argument("cov_min_eig_bound: n, d must be >= 1");
  if (lambda_min_sigma < 0.0) {
    throw std::invalid_argument("cov_min_eig_bound: lambda_min_sigma must be >= 0");
  }
  const double c = bound_constant_c();
  const double dn = static_cast<double>(d) / n;
  if (n >= d) {
    const double t = 0.75 - 0.25 * c * std::sqrt(dn);
    return lambda_min_sigma * t * t;
  }
  const double t = std::sqrt(dn) - 0.25 * (c + 6.0);
  return lambda_min_sigma * t * t;
}

std::vector<SpectrumReport> verify_ntk_bound(int n, int d, int num_layers, int seeds,
                                             const RngStream& rng) {
  if (n < 1 || d < 1 || num_layers < 2 || seeds < 1) {
    throw std::invalid_argument("verify_ntk_bound: invalid sweep parameters");
  }
  const double mu1 = 0.5;
  std::vector<SpectrumReport> reports;
  reports.reserve(seeds);
  for (int s = 0; s < seeds; ++s) {
    const RngStream stream = rng.substream(static_cast<std::uint64_t>(s));
    const Matrix X = sample_sphere(n, d, stream);
    const KernelMatrix kernel = limiting_ntk(X, num_layers);

    SpectrumReport rep;
    rep.seed = stream.stream_id;
    rep.n = n;
    rep.d = d;
    rep.num_layers = num_layers;
    rep.lambda_min_observed = sym_eig_min(kernel.gram);
    rep.lower_bound = ntk_lower_bound(BoundInputs{n, d, mu1, bound_constant_c()});
    rep.regime = n >= d ? BoundRegime::n_ge_d : BoundRegime::n_lt_d;
    rep.holds = rep.lambda_min_observed >= rep.lower_bound;

    const SymmetricMatrix gram_x(X * X.transpose());
    const double cov_min = sym_eig_min(gram_x);
    rep.intermediate_holds = rep.lambda_min_observed >= 2.0 * mu1 * mu1 * cov_min;

    const Vector eigs = sym_eigvals(SymmetricMatrix(gram_x.mat() / d));
    rep.effective_dim = effective_dimension(eigs.cwiseMax(0.0), 1.0);
    reports.push_back(rep);
  }
  return reports;
}

double effective_dimension(const Vector& eigs, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("effective_dimension: gamma must be positive");
  double total = 0.0;
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs(i) < 0.0) {
      throw std::invalid_argument("effective_dimension: eigenvalues must be non-negative");
    }
    const double denom = eigs(i) + gamma;
    total += eigs(i) / (denom * denom);
  }
  return total;
}

Vector decay_spectrum(DecayKind kind, int n, int r_star, double a) {
  if (n < 1 || r_star < 1 || r_star > n) {
    throw std::invalid_argument("decay_spectrum: need 1 <= r_star <= n");
  }
  if (kind == DecayKind::polynomial && !(a > 0.5)) {
    throw std::invalid_argument("decay_spectrum: polynomial decay needs a > 1/2");
  }
  if (kind == DecayKind::exponential && !(a > 0.0)) {
    throw std::invalid_argument("decay_spectrum: exponential decay needs a > 0");
  }
  Vector spectrum = Vector::Zero(n);
  for (int i = 1; i <= r_star; ++i) {
    switch (kind) {
      case DecayKind::harmonic: spectrum(i - 1) = static_cast<double>(n) / i; break;
      case DecayKind::polynomial: spectrum(i - 1) = n * std::pow(i, -2.0 * a); break;
      case DecayKind::exponential: spectrum(i - 1) = n * std::exp(-a * i); break;
    }
  }
  return spectrum;
}

std::vector<TrendRow> trend_table(int d, const std::vector<double>& n_grid, double mu1) {
  if (d < 1) throw std::invalid_argument("trend_table: d must be >= 1");
  const double c = bound_constant_c();
  const double b1 = std::pow(4.0 / (c + 6.0), 2.0) * d;
  const double b3 = c * c / 9.0 * d;
  std::vector<TrendRow> rows;
  rows.reserve(n_grid.size());
  double prev = -1.0;
  for (double n : n_grid) {
    if (n < prev) throw std::invalid_argument("trend_table: n_grid must be sorted ascending");
    prev = n;
    TrendRow row;
    row.n = n;
    // Evaluate the bound as a continuous function of n (branch by n vs d).
    const double lead = 2.0 * mu1 * mu1 * n / d;
    if (n >= d) {
      const double t = 0.75 - 0.25 * c * std::sqrt(d / n);
      row.bound = lead * t * t;
    } else {
      const double t = std::sqrt(d / n) - 0.25 * (c + 6.0);
      row.bound = lead * t * t;
    }
    if (n <= b1) row.segment = "down1";
    else if (n <= d) row.segment = "up1";
    else if (n <= b3) row.segment = "down2";
    else row.segment = "up2";
    rows.push_back(std::move(row));
  }
  return rows;
}

TrendCheck check_trend_table(int d, int points_per_segment, double mu1) {
  if (points_per_segment < 2) {
    throw std::invalid_argument("check_trend_table: need at least 2 points per segment");
  }
  const double c = bound_constant_c();
  const double b1 = std::pow(4.0 / (c + 6.0), 2.0) * d;
  const double b3 = c * c / 9.0 * d;
  const double dd = d;

  struct Segment {
    double lo, hi;
    bool increasing;
    const char* name;
  };
  const Segment segments[4] = {
      {b1 * 1e-3, b1, false, "down1"},
      {b1, dd, true, "up1"},
      {dd, b3, false, "down2"},
      {b3, 64.0 * dd, true, "up2"},
  };

  TrendCheck check;
  check.ok = true;
  for (const Segment& seg : segments) {
    // Stay strictly inside the segment so the endpoints' flat spots and the
    // branch switch at n = d do not contaminate the direction test.
    const double lo = seg.lo * 1.001;
    const double hi = seg.hi * 0.999;
    std::vector<double> grid(points_per_segment);
    const double ratio = std::pow(hi / lo, 1.0 / (points_per_segment - 1));
    double v = lo;
    for (int i = 0; i < points_per_segment; ++i) {
      grid[i] = v;
      v *= ratio;
    }
    const auto rows = trend_table(d, grid, mu1);
    bool seg_ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double diff = rows[i].bound - rows[i - 1].bound;
      if (seg.increasing ? diff <= 0.0 : diff >= 0.0) {
        seg_ok = false;
        break;
      }
    }
    check.segments.emplace_back(seg.name);
    check.segment_ok.push_back(seg_ok);
    check.ok = check.ok && seg_ok;
  }

  // The two branch formulas do not agree at n = d; record the jump.
  const double lead = 2.0 * mu1 * mu1;
  const double right = lead * std::pow(0.75 - 0.25 * c, 2.0);
  const double left = lead * std::pow(1.0 - 0.25 * (c + 6.0), 2.0);
  check.branch_jump_at_d = right - left;
  return check;
}

void write_spectrum_csv(const std::vector<SpectrumReport>& reports, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_spectrum_csv: cannot open " + path);
  f << "seed,n,d,L,lambda_min,bound,holds,intermediate_holds\n";
  f.precision(17);
  for (const SpectrumReport& r : reports) {
    f << r.seed << ',' << r.n << ',' << r.d << ',' << r.num_layers << ','
      << r.lambda_min_observed << ',' << r.lower_bound << ',' << int(r.holds) << ','
      << int(r.intermediate_holds) << '\n';
  }
}

}  // namespace ntklab
