#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ntklab/spectrum.hpp"

using namespace ntklab;

TEST_CASE("hermite coefficients by quadrature") {
  CHECK(std::abs(hermite_mu1() - 0.5) < 1e-8);
  CHECK(std::abs(hermite_mu0() - 0.3989422804014327) < 1e-8);  // 1/sqrt(2 pi)
}

TEST_CASE("the absolute constant") {
  CHECK(bound_constant_c() == doctest::Approx(16.77035318349128).epsilon(1e-12));
}

TEST_CASE("bound value at the n = d crossover uses the n >= d branch") {
  // frozen: 2 * 0.25 * (3/4 - c/4)^2 with c = 2^3.5 sqrt(log 9)
  const double v = ntk_lower_bound(BoundInputs{64, 64, 0.5, bound_constant_c()});
  CHECK(v == doctest::Approx(5.925707087440264).epsilon(1e-12));
  // identical for any d at the crossover: the bound depends on n/d only
  CHECK(ntk_lower_bound(BoundInputs{7, 7, 0.5, bound_constant_c()}) ==
        doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("covariance bound factor at n = 16 d") {
  // frozen: (3/4 - c/16)^2
  CHECK(cov_min_eig_bound(1600, 100, 1.0) ==
        doctest::Approx(0.08889167771580234).epsilon(1e-12));
  // scales linearly in the population eigenvalue
  CHECK(cov_min_eig_bound(1600, 100, 2.5) ==
        doctest::Approx(2.5 * 0.08889167771580234).epsilon(1e-12));
  CHECK_THROWS_AS(cov_min_eig_bound(10, 5, -1.0), std::invalid_argument);
}

TEST_CASE("kernel bound factors through the covariance bound") {
  // 2 mu1^2 (n/d) t^2 == 2 mu1^2 n * (t^2 / d) for both branches
  for (auto [n, d] : std::vector<std::pair<int, int>>{{256, 32}, {32, 256}, {100, 100}}) {
    const double lhs = ntk_lower_bound(BoundInputs{n, d, 0.5, bound_constant_c()});
    const double rhs = 2.0 * 0.25 * n * cov_min_eig_bound(n, d, 1.0 / d);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ntk_lower_bound(BoundInputs{0, 4, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ntk_lower_bound(BoundInputs{4, 4, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("sphere sweep in the valid regime holds with the intermediate inequality") {
  // n << d keeps the bound's inner factor meaningful; both inequalities
  // should hold for every seed here.
  const auto reports = verify_ntk_bound(32, 256, 2, 3, RngStream{42, 0});
  REQUIRE(reports.size() == 3);
  for (const SpectrumReport& r : reports) {
    CHECK(r.n == 32);
    CHECK(r.d == 256);
    CHECK(r.num_layers == 2);
    CHECK(r.regime == BoundRegime::n_lt_d);
    CHECK(r.holds);
    CHECK(r.intermediate_holds);
    CHECK(r.lambda_min_observed > 0.0);
    CHECK(r.effective_dim > 0.0);
  }
  // deterministic per stream
  const auto again = verify_ntk_bound(32, 256, 2, 3, RngStream{42, 0});
  CHECK(again[1].lambda_min_observed == reports[1].lambda_min_observed);
}

TEST_CASE("the intermediate inequality also holds where the headline bound is vacuous") {
  const auto reports = verify_ntk_bound(64, 16, 3, 3, RngStream{43, 0});
  for (const SpectrumReport& r : reports) {
    CHECK(r.regime == BoundRegime::n_ge_d);
    CHECK(r.intermediate_holds);
    // trace/n ceiling: lambda_min can never exceed the mean diagonal (= L)
    CHECK(r.lambda_min_observed <= 3.0 + 1e-9);
  }
}

TEST_CASE("effective dimension formula and preconditions") {
  Vector eigs(2);
  eigs << 1.0, 1.0;
  CHECK(effective_dimension(eigs, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  eigs << 3.0, 0.0;
  CHECK(effective_dimension(eigs, 1.0) == doctest::Approx(3.0 / 16.0).epsilon(1e-15));
  CHECK_THROWS_AS(effective_dimension(eigs, 0.0), std::invalid_argument);
  eigs << 1.0, -0.1;
  CHECK_THROWS_AS(effective_dimension(eigs, 1.0), std::invalid_argument);
}

TEST_CASE("model spectra") {
  const Vector h = decay_spectrum(DecayKind::harmonic, 10, 4, 0.0);
  CHECK(h(0) == doctest::Approx(10.0));
  CHECK(h(3) == doctest::Approx(2.5));
  CHECK(h(4) == 0.0);
  const Vector p = decay_spectrum(DecayKind::polynomial, 10, 3, 1.0);
  CHECK(p(1) == doctest::Approx(2.5));  // 10 * 2^-2
  const Vector e = decay_spectrum(DecayKind::exponential, 10, 3, 1.0);
  CHECK(e(0) == doctest::Approx(10.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(decay_spectrum(DecayKind::polynomial, 10, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(decay_spectrum(DecayKind::exponential, 10, 3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(decay_spectrum(DecayKind::harmonic, 10, 11, 0.0), std::invalid_argument);
}

TEST_CASE("segment labels around the breakpoints") {
  // breakpoints over d: (4/(c+6))^2 ~= 0.0308589 and c^2/9 ~= 31.2494
  const int d = 100;
  const auto rows = trend_table(d, {3.0, 3.1, 99.0, 101.0, 3124.0, 3126.0}, 0.5);
  CHECK(rows[0].segment == "down1");
  CHECK(rows[1].segment == "up1");
  CHECK(rows[2].segment == "up1");
  CHECK(rows[3].segment == "down2");
  CHECK(rows[4].segment == "down2");
  CHECK(rows[5].segment == "up2");
  CHECK_THROWS_AS(trend_table(d, {2.0, 1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("breakpoint locations frozen against the closed forms") {
  const double c = bound_constant_c();
  CHECK(std::pow(4.0 / (c + 6.0), 2.0) ==
        doctest::Approx(0.030858900556478105).epsilon(1e-12));
  CHECK(c * c / 9.0 == doctest::Approx(31.249416211004018).epsilon(1e-12));
}

TEST_CASE("all four trend segments have the advertised directions") {
  const TrendCheck check = check_trend_table(100, 50, 0.5);
  REQUIRE(check.segments.size() == 4);
  CHECK(check.segments[0] == "down1");
  CHECK(check.segments[3] == "up2");
  for (bool ok : check.segment_ok) CHECK(ok);
  CHECK(check.ok);
  // the two branch formulas disagree at n = d; frozen against the closed forms
  const double c = bound_constant_c();
  const double expected =
      0.5 * (std::pow(0.75 - 0.25 * c, 2.0) - std::pow(1.0 - 0.25 * (c + 6.0), 2.0));
  CHECK(check.branch_jump_at_d == doctest::Approx(expected).epsilon(1e-12));
  CHECK(check.branch_jump_at_d < 0.0);
}

TEST_CASE("spectrum csv schema") {
  const auto reports = verify_ntk_bound(8, 32, 2, 2, RngStream{44, 0});
  const std::string path = "spectrum_test.csv";
  write_spectrum_csv(reports, path);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "seed,n,d,L,lambda_min,bound,holds,intermediate_holds");
  int rows = 0;
  std::string line;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 2);
  std::remove(path.c_str());
}
