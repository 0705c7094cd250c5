#include <doctest.h>

#include <random>

#include "oqs/meanfield.hpp"
#include "oqs/response.hpp"

using namespace oqs;
using response::GreensKind;
using response::Matrix2;
using response::NambuGreens;
using Complex = response::Complex;

TEST_CASE("Keldysh identities hold pointwise") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_adv = 0.0, worst_rt = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    NambuGreens g;
    g.mu = 1.0;
    g.delta = 0.05 + 1.5 * u(rng);
    g.gamma_n = 2.0 * u(rng);
    const double omega = -3.0 + 6.0 * u(rng);
    const double k = 0.05 + 2.5 * u(rng);
    Matrix2 gr = g.evaluate(GreensKind::retarded, omega, k);
    Matrix2 ga = g.evaluate(GreensKind::advanced, omega, k);
    Matrix2 gl = g.evaluate(GreensKind::lesser, omega, k);
    Matrix2 gt = g.evaluate(GreensKind::time_ordered, omega, k);
    worst_adv = std::max(worst_adv,
                         (ga - gr.adjoint()).cwiseAbs().maxCoeff());
    worst_rt = std::max(worst_rt,
                        (gt - gl - gr).cwiseAbs().maxCoeff());
  }
  CHECK(worst_adv < 1e-12);
  CHECK(worst_rt < 1e-12);
}

TEST_CASE("free limit: diagonal retarded function with poles at +-eps") {
  NambuGreens g;
  g.mu = 1.0;
  g.delta = 0.0;
  g.gamma_n = 1e-6;
  const double k = 1.4;
  const double e = g.eps(k);
  Matrix2 gr = g.evaluate(GreensKind::retarded, 0.3, k);
  CHECK(std::abs(gr(0, 1)) == doctest::Approx(0.0));
  CHECK(std::abs(gr(1, 0)) == doctest::Approx(0.0));
  // the diagonal entries reduce to 1/(w -+ eps + i0)
  CHECK(std::abs(gr(0, 0) - 1.0 / Complex(0.3 - e, 1e-6)) < 1e-4);
  // near-pole evaluation is large
  Matrix2 near = g.evaluate(GreensKind::retarded, e + 1e-5, k);
  CHECK(std::abs(near(0, 0)) > 1e3);
}

TEST_CASE("pole guard raises a singular-point error") {
  NambuGreens g;
  g.mu = 1.0;
  g.delta = 0.5;
  g.gamma_n = 0.0;
  const double k = 1.2;
  const double edge = std::hypot(g.eps(k), g.delta);
  CHECK_THROWS_AS(g.evaluate(GreensKind::retarded, edge, k),
                  response::SingularPoint);
}

TEST_CASE("Ward-Takahashi vertex identity") {
  SUBCASE("free limit reduces to the tau0/tau3 combination") {
    NambuGreens g;
    g.mu = 1.0;
    g.delta = 0.0;
    g.gamma_n = 0.3;
    const double k = 0.7, q = 0.2, omega = 0.9, q0 = 0.15;
    Matrix2 lhs = response::wt_vertex_lhs(g, k, q, omega, omega + q0);
    const double de = g.eps(k + q) - g.eps(k);
    CHECK(std::abs(lhs(0, 0) - Complex(de - q0, 0)) < 1e-12);
    CHECK(std::abs(lhs(1, 1) - Complex(de + q0, 0)) < 1e-12);
    CHECK(std::abs(lhs(0, 1)) < 1e-12);
    CHECK(std::abs(lhs(1, 0)) < 1e-12);
  }
  SUBCASE("q -> 0 leaves the finite pair-field vertex") {
    // the tau2 component stays at magnitude 2 delta as q, q0 -> 0: the
    // vertex must develop a pole for the identity to survive the limit
    NambuGreens g;
    g.mu = 1.0;
    g.delta = 0.35;
    g.gamma_n = 0.8;
    Matrix2 lhs = response::wt_vertex_lhs(g, 0.9, 0.0, 0.6, 0.6);
    CHECK(std::abs(lhs(0, 1) - Complex(2.0 * g.delta, 0.0)) < 1e-12);
    CHECK(std::abs(lhs(1, 0) + Complex(2.0 * g.delta, 0.0)) < 1e-12);
    CHECK(std::abs(lhs(0, 0)) < 1e-12);
    CHECK(std::abs(lhs(1, 1)) < 1e-12);
  }
  SUBCASE("1000 randomized samples, gamma_n up to 10 delta") {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      NambuGreens g;
      g.mu = 1.0;
      g.delta = 0.05 + 0.95 * u(rng);
      g.gamma_n = 10.0 * g.delta * u(rng);
      const double k = 0.05 + 2.5 * u(rng);
      const double q = -0.5 + u(rng);
      const double omega = -3.0 + 6.0 * u(rng);
      const double q0 = -1.0 + 2.0 * u(rng);
      worst = std::max(worst,
                       response::wt_vertex_check(g, k, q, omega, omega + q0));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("response current") {
  const double n = 0.7, m = 0.5;
  SUBCASE("transverse component passes whole") {
    Eigen::Vector3d q(1.0, 0.0, 0.0);
    Eigen::Vector3cd a(Complex(0, 0), Complex(1, 0), Complex(0, 0));
    auto j = response::response_current(q, a, n, m);
    CHECK(std::abs(j.spatial(1) + n / m) < 1e-15);
    CHECK(std::abs(j.spatial(0)) < 1e-15);
    CHECK(std::abs(j.spatial(2)) < 1e-15);
    CHECK(std::abs(j.temporal) == 0.0);
  }
  SUBCASE("longitudinal component is annihilated") {
    Eigen::Vector3d q(0.3, -0.4, 1.1);
    Eigen::Vector3cd a = q.cast<Complex>() * Complex(2.0, -0.5);
    auto j = response::response_current(q, a, n, m);
    CHECK(j.spatial.cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("gauge shift and transversality on random samples") {
    std::mt19937_64 rng(107);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::Vector3d q(g(rng), g(rng), g(rng));
      if (q.norm() < 1e-2) continue;
      Eigen::Vector3cd a;
      for (int i = 0; i < 3; ++i) a(i) = Complex(g(rng), g(rng));
      Complex phi(g(rng), g(rng));
      auto j1 = response::response_current(q, a, n, m);
      auto j2 = response::response_current(
          q, a + Complex(0, 1) * phi * q.cast<Complex>(), n, m);
      CHECK((j1.spatial - j2.spatial).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(std::abs(q.cast<Complex>().dot(j1.spatial)) < 1e-14);
    }
  }
  SUBCASE("q = 0 is rejected") {
    Eigen::Vector3d q = Eigen::Vector3d::Zero();
    Eigen::Vector3cd a = Eigen::Vector3cd::Ones();
    CHECK_THROWS_AS(response::response_current(q, a, n, m),
                    std::invalid_argument);
  }
}

TEST_CASE("density from the Green's functions") {
  SUBCASE("step-function limit") {
    auto grid = MomentumGrid::make_uniform(2048, 1.0, 3.0);
    const double n = response::density_from_greens(1e-9, grid);
    double fermi_sea = 0.0;
    for (int i = 0; i < grid.size(); ++i)
      if (grid.eps[i] < 0.0) fermi_sea += 2.0 * grid.w[i];
    CHECK(n == doctest::Approx(fermi_sea).epsilon(1e-6));
  }
  SUBCASE("matches the BCS occupation sum") {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double mu = 0.5 + u(rng);
      const double delta = 0.02 + 0.3 * u(rng);
      auto grid = MomentumGrid::make_uniform(512, mu, 3.0);
      auto s = meanfield::init_bcs(delta, grid);
      CHECK(std::abs(response::density_from_greens(delta, grid) -
                     meanfield::particle_number(s, grid)) < 1e-10);
    }
  }
  SUBCASE("chemical potential below the band empties the system") {
    auto grid = MomentumGrid::make_uniform(512, -1.0, 3.0);
    CHECK(response::density_from_greens(1e-7, grid) < 1e-8);
  }
}
