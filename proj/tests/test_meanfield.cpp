#include <doctest.h>

#include <cmath>

#include "oqs/meanfield.hpp"

using namespace oqs;
using meanfield::BcsRunOptions;
using meanfield::BcsState;
using Complex = meanfield::Complex;

namespace {

MomentumGrid single_level(double eps_value) {
  MomentumGrid g;
  g.mu = -eps_value;  // eps = k^2 - mu with k = 0
  g.cutoff = 1.0;
  g.k = {0.0};
  g.w = {1.0};
  g.eps = {eps_value};
  return g;
}

MomentumGrid three_levels() {
  MomentumGrid g;
  g.mu = 0.0;
  g.cutoff = 2.0;
  g.k = {0.5, 1.0, 1.5};
  g.w = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  g.eps = {-1.0, 0.0, 1.0};
  return g;
}

}  // namespace

TEST_CASE("gap equation on a single level: Delta = U/2") {
  auto g = single_level(0.0);
  for (double u : {0.3, 1.0, 1.7})
    CHECK(meanfield::solve_gap(u, g) == doctest::Approx(u / 2).epsilon(1e-10));
}

TEST_CASE("gap equation on the symmetric three-level grid") {
  auto g = three_levels();
  const double u = 1.0;
  const double root = meanfield::solve_gap(u, g);
  // independent oracle: bisection on 1 = (1/3)(1/sqrt(1+D^2) + 1/(2D))
  auto f = [](double d) {
    return 1.0 - (1.0 / std::sqrt(1.0 + d * d) + 1.0 / (2.0 * d)) / 3.0;
  };
  double lo = 1e-9, hi = 2.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  CHECK(root == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
  // substituting the root back makes the residual vanish
  double s = 0.0;
  for (int i = 0; i < g.size(); ++i)
    s += g.w[i] / (2.0 * std::hypot(g.eps[i], root));
  CHECK(std::abs(1.0 - u * s) < 1e-10);
}

TEST_CASE("too-weak attraction reports no solution") {
  auto g = MomentumGrid::make_uniform(128, 1.0, 3.0);
  CHECK_THROWS_AS(meanfield::solve_gap(1e-6, g), meanfield::NoGapSolution);
}

TEST_CASE("attraction_for_gap inverts solve_gap") {
  auto g = MomentumGrid::make_uniform(256, 1.0, 3.0);
  const double u = meanfield::attraction_for_gap(0.1, g);
  CHECK(meanfield::solve_gap(u, g) == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("equilibrium amplitudes") {
  SUBCASE("eps = 0 gives u = v = 1/sqrt(2)") {
    auto g = single_level(0.0);
    auto s = meanfield::init_bcs(0.37, g);
    CHECK(std::abs(s.u[0] - Complex(1 / std::sqrt(2.0), 0)) < 1e-14);
    CHECK(std::abs(s.v[0] - Complex(1 / std::sqrt(2.0), 0)) < 1e-14);
  }
  SUBCASE("eps >> Delta empties the mode") {
    auto g = single_level(50.0);
    auto s = meanfield::init_bcs(0.1, g);
    CHECK(std::abs(s.v[0]) < 1e-3);
    CHECK(std::abs(s.u[0]) > 0.999);
  }
  SUBCASE("pair sum reproduces the gap") {
    auto g = MomentumGrid::make_uniform(512, 1.0, 3.0);
    const double u = meanfield::attraction_for_gap(0.1, g);
    auto s = meanfield::init_bcs(0.1, g);
    Complex delta = meanfield::order_parameter(s, g, Complex(u, 0.0));
    CHECK(std::abs(delta) == doctest::Approx(0.1).epsilon(1e-9));
    // n_k = 2 |v_k|^2 = 1 - eps/E
    for (int i : {0, 127, 255, 511}) {
      const double e = g.eps[i];
      const double ee = std::hypot(e, 0.1);
      CHECK(2.0 * std::norm(s.v[i]) ==
            doctest::Approx(1.0 - e / ee).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed-system BCS is stationary") {
  auto g = MomentumGrid::make_uniform(256, 1.0, 3.0);
  const double u = meanfield::attraction_for_gap(0.1, g);
  auto s = meanfield::init_bcs(0.1, g);
  BcsRunOptions opts;
  opts.total_time = 10.0;
  opts.dt0 = 1e-2;
  auto rows = meanfield::evolve_bcs(s, u, 0.0, g, opts);
  for (const auto& r : rows) {
    CHECK(std::abs(std::abs(r.delta) - 0.1) < 1e-6);
    CHECK(std::abs(r.n - rows.front().n) < 1e-8);
  }
  CHECK(meanfield::max_norm_defect(s) < 1e-8);
}

TEST_CASE("pair loss drains the condensate") {
  auto g = MomentumGrid::make_uniform(256, 1.0, 3.0);
  const double u = meanfield::attraction_for_gap(0.1, g);
  auto s = meanfield::init_bcs(0.1, g);
  BcsRunOptions opts;
  opts.total_time = 10.0;
  opts.dt0 = 5e-3;
  auto rows = meanfield::evolve_bcs(s, u, 0.1 * u, g, opts);
  CHECK(rows.back().n < rows.front().n);
  CHECK(meanfield::max_norm_defect(s) < 1e-8);
}

TEST_CASE("single-mode Rabi rotation with a frozen pair field") {
  auto g = single_level(0.0);
  const double delta = 0.8;
  BcsState s;
  s.u = {Complex(1.0, 0.0)};
  s.v = {Complex(0.0, 0.0)};
  BcsRunOptions opts;
  opts.total_time = 2.0 * M_PI / delta;
  opts.dt0 = 1e-4;
  opts.frozen_delta = Complex(delta, 0.0);
  auto rows = meanfield::evolve_bcs(s, 1.0, 0.0, g, opts);
  // analytic two-level solution: |u(t)|^2 = cos^2(delta t), period pi/delta
  for (std::size_t i = 0; i < rows.size(); i += rows.size() / 16) {
    const double t = rows[i].t;
    const double n_expect = 2.0 * std::pow(std::sin(delta * t), 2);
    CHECK(rows[i].n == doctest::Approx(n_expect).epsilon(1e-6));
  }
}

TEST_CASE("mean-field O_N") {
  SUBCASE("filled modes give zero") {
    MomentumGrid g = single_level(0.0);
    BcsState s;
    s.u = {Complex(0.0, 0.0)};
    s.v = {Complex(1.0, 0.0)};
    CHECK(meanfield::mf_on(s, g) == doctest::Approx(0.0));
  }
  SUBCASE("balanced modes of unit weight give -M") {
    for (int m : {1, 3, 5}) {
      MomentumGrid g;
      g.mu = 0.0;
      g.cutoff = 1.0;
      for (int i = 0; i < m; ++i) {
        g.k.push_back(1.0);
        g.w.push_back(1.0);
        g.eps.push_back(0.0);
      }
      BcsState s;
      s.u.assign(m, Complex(1 / std::sqrt(2.0), 0.0));
      s.v.assign(m, Complex(1 / std::sqrt(2.0), 0.0));
      CHECK(meanfield::mf_on(s, g) == doctest::Approx(-double(m)));
    }
  }
  SUBCASE("BCS ground state has negative O_N") {
    auto g = MomentumGrid::make_uniform(256, 1.0, 3.0);
    auto s = meanfield::init_bcs(0.1, g);
    CHECK(meanfield::mf_on(s, g) < 0.0);
  }
}

TEST_CASE("dissipative run: O_N stays negative and non-decreasing") {
  auto g = MomentumGrid::make_uniform(512, 1.0, 3.0);
  const double u = meanfield::attraction_for_gap(0.1, g);
  auto s = meanfield::init_bcs(0.1, g);
  BcsRunOptions opts;
  opts.total_time = 5.0;
  opts.dt0 = 5e-3;
  auto rows = meanfield::evolve_bcs(s, u, 0.1 * u, g, opts);
  double prev = rows.front().on;
  for (const auto& r : rows) {
    CHECK(r.on < 0.0);
    CHECK(r.on >= prev - 1e-10);
    prev = r.on;
  }
}

TEST_CASE("bad arguments are rejected") {
  auto g = MomentumGrid::make_uniform(16, 1.0, 3.0);
  auto s = meanfield::init_bcs(0.1, g);
  BcsRunOptions opts;
  opts.total_time = -1.0;
  CHECK_THROWS_AS(meanfield::evolve_bcs(s, 1.0, 0.0, g, opts),
                  std::invalid_argument);
  CHECK_THROWS_AS(meanfield::init_bcs(-0.1, g), std::invalid_argument);
  CHECK_THROWS_AS(meanfield::solve_gap(-1.0, g), std::invalid_argument);
}
