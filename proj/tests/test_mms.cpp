#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hdg/mms.hpp"

#include <cmath>
#include <random>

using namespace hdg;

TEST_CASE("manufactured velocity is divergence free and zero on the boundary") {
  const mms::ExactFields ex;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x(U(rng), U(rng));
    CHECK(std::abs(ex.velocity_gradient(x).trace()) < 1e-12);
  }
  for (double s : {0.0, 0.25, 0.7, 1.0}) {
    CHECK(ex.velocity(Vec2(0, s)).norm() < 1e-14);
    CHECK(ex.velocity(Vec2(1, s)).norm() < 1e-14);
    CHECK(ex.velocity(Vec2(s, 0)).norm() < 1e-14);
    CHECK(ex.velocity(Vec2(s, 1)).norm() < 1e-14);
    CHECK(std::abs(ex.nu_tilde(Vec2(s, 0))) < 1e-14);
  }
}

TEST_CASE("pressure mean and wall distance") {
  const mms::ExactFields ex;
  CHECK(ex.pressure_mean() == doctest::Approx(4.0 / (M_PI * M_PI)).epsilon(1e-14));
  // midpoint-rule check of the mean
  const int n = 400;
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s += ex.pressure(Vec2((i + 0.5) / n, (j + 0.5) / n));
  CHECK(s / (n * n) == doctest::Approx(ex.pressure_mean()).epsilon(1e-5));
  CHECK(ex.wall_distance(Vec2(0.3, 0.7)) == 0.3);
  CHECK(ex.wall_distance(Vec2(0.5, 0.95)) == doctest::Approx(0.05));
}

TEST_CASE("gradients from the dual numbers match finite differences") {
  const mms::ExactFields ex;
  const double eps = 1e-6;
  const Vec2 x(0.37, 0.62);
  const Mat2 g = ex.velocity_gradient(x);
  for (int c = 0; c < 2; ++c) {
    const Vec2 dx = (ex.velocity(x + Vec2(eps, 0)) - ex.velocity(x - Vec2(eps, 0))) / (2 * eps);
    const Vec2 dy = (ex.velocity(x + Vec2(0, eps)) - ex.velocity(x - Vec2(0, eps))) / (2 * eps);
    CHECK(g(c, 0) == doctest::Approx(dx[c]).epsilon(1e-7));
    CHECK(g(c, 1) == doctest::Approx(dy[c]).epsilon(1e-7));
  }
  const Vec2 gn = ex.nu_tilde_gradient(x);
  CHECK(gn.x() == doctest::Approx((ex.nu_tilde(x + Vec2(eps, 0)) - ex.nu_tilde(x - Vec2(eps, 0))) /
                                  (2 * eps))
                      .epsilon(1e-8));
}

TEST_CASE("forcings match an independent symbolic computation") {
  // reference values computed with a symbolic algebra system for
  // nu = 1e-2, theta = 1 and frozen here
  const mms::ExactFields ex;
  struct Ref {
    Vec2 x, u;
    double p, nt;
    Vec2 fm;
    double fsa;
  };
  const Ref refs[] = {
      {{0.3, 0.7},
       {-1.0000833933569092e-02, -1.2626052841130978e-02},
       6.5450849718747373e-01,
       6.5450849718747373e-01,
       {1.3942847790652126e+00, -1.6450614629573761e+00},
       3.2879606203133186e+01},
      {{0.55, 0.2},
       {2.0385135393742010e-02, -5.2163982825737128e-04},
       5.8054864046304711e-01,
       5.8054864046304711e-01,
       {2.2774011716036813e-01, 2.5003156632266501e+00},
       4.9228611834901635e+01},
      {{0.9, 0.45},
       {9.8617786741837907e-04, 2.0475517972274093e-02},
       3.0521248238988885e-01,
       3.0521248238988885e-01,
       {-3.0503113388117393e+00, 4.5801020619369476e-01},
       4.1954611679149103e+01},
  };
  for (const Ref& r : refs) {
    CHECK((ex.velocity(r.x) - r.u).norm() < 1e-12 * r.u.norm());
    CHECK(ex.pressure(r.x) == doctest::Approx(r.p).epsilon(1e-12));
    CHECK(ex.nu_tilde(r.x) == doctest::Approx(r.nt).epsilon(1e-12));
    const Vec2 fm = ex.momentum_forcing(r.x);
    CHECK((fm - r.fm).norm() < 1e-10 * r.fm.norm());
    CHECK(ex.sa_forcing(r.x) == doctest::Approx(r.fsa).epsilon(1e-10));
  }
}

TEST_CASE("rate fit recovers the exponent of synthetic data") {
  std::vector<double> h{0.1, 0.05, 0.025, 0.0125}, err;
  for (double hi : h) err.push_back(3.7 * std::pow(hi, 2.5));
  CHECK(mms::fit_rate(h, err) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("coarse manufactured case runs and is conservative") {
  mms::ExactFields ex; // defaults: nu = 1e-2, theta = 1
  mms::CaseOptions co;
  const mms::CaseResult r = mms::run_case(4, 2, ex, co);
  CHECK(r.converged);
  CHECK(r.err_u < 0.05);
  CHECK(r.err_nu < 0.3);
  CHECK(r.max_div < 1e-10);
  CHECK(r.max_jump < 1e-10);
}
