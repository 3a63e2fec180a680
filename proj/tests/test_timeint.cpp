#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mhddg/driver.hpp"
#include "mhddg/timeint.hpp"

using namespace mhddg;

TEST_CASE("low-storage RK coefficients are consistent") {
  CHECK(LsrkCoeffs::A[0] == 0.0);
  CHECK(LsrkCoeffs::c[0] == 0.0);
  for (int s = 0; s < 5; ++s) {
    CHECK(LsrkCoeffs::B[s] > 0.0);
    CHECK(LsrkCoeffs::c[s] >= 0.0);
    CHECK(LsrkCoeffs::c[s] < 1.0);
  }
  // a fourth-order step integrates y' = t^p exactly for p <= 3
  for (int p = 0; p <= 3; ++p) {
    double y = 0.0, reg = 0.0;
    const double t0 = 0.3, dt = 0.7;
    rk_step_scalar(y, reg, t0, dt,
                   [p](double, double t) { return std::pow(t, p); });
    const double exact =
        (std::pow(t0 + dt, p + 1) - std::pow(t0, p + 1)) / (p + 1);
    CHECK(y == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("scalar stepper is fourth order") {
  // y' = -y + sin(2t), y(0)=1; reference by tiny-step integration
  const auto rhs = [](double y, double t) { return -y + std::sin(2.0 * t); };
  const double T = 1.5;

  auto integrate = [&](int steps) {
    double y = 1.0, reg = 0.0;
    const double dt = T / steps;
    for (int s = 0; s < steps; ++s) rk_step_scalar(y, reg, s * dt, dt, rhs);
    return y;
  };

  const double yref = integrate(1 << 14);
  std::vector<double> err;
  for (int steps : {10, 20, 40, 80}) err.push_back(std::abs(integrate(steps) - yref));
  for (size_t i = 1; i < err.size(); ++i) {
    const double rate = std::log2(err[i - 1] / err[i]);
    CHECK(rate > 3.7);
    CHECK(rate < 4.5);
  }
}

TEST_CASE("field stepper matches the scalar stepper componentwise") {
  // decoupled linear ODE per entry: du_c/dt = a_c u_c
  Field u(2, 3);
  for (int e = 0; e < 2; ++e)
    for (int n = 0; n < 3; ++n)
      for (int c = 0; c < kNumVars; ++c) u.at(e, n)[c] = 1.0 + 0.1 * (e + n + c);

  const auto coef = [](int c) { return -0.5 + 0.13 * c; };
  const auto rhs = [&](const Field &f, double) {
    Field r(f.K, f.npe);
    for (size_t i = 0; i < f.data.size(); ++i)
      for (int c = 0; c < kNumVars; ++c) r.data[i][c] = coef(c) * f.data[i][c];
    return r;
  };

  const Field u0 = u;
  Field reg;
  const double dt = 0.07;
  rk_step(u, reg, 0.0, dt, rhs);

  for (size_t i = 0; i < u.data.size(); ++i)
    for (int c = 0; c < kNumVars; ++c) {
      double y = u0.data[i][c], yreg = 0.0;
      rk_step_scalar(y, yreg, 0.0, dt,
                     [&](double yy, double) { return coef(c) * yy; });
      CHECK(u.data[i][c] == doctest::Approx(y).epsilon(1e-14));
    }
}

TEST_CASE("step size formula") {
  CHECK(compute_dt(0.5, 0.25, 3, 2.0) == doctest::Approx(0.5 * 0.25 / (2.0 * 7.0)));
  CHECK(compute_dt(1.0, 1.0, 0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("compensated summation") {
  KahanSum ks;
  double naive = 0.0;
  ks.add(1.0);
  naive += 1.0;
  for (int i = 0; i < 10000000; ++i) {
    ks.add(1e-16);
    naive += 1e-16;
  }
  CHECK(ks.value() == doctest::Approx(1.0 + 1e-9).epsilon(1e-14));
  CHECK(naive == 1.0);  // plain accumulation loses every increment
}

TEST_CASE("divergence-wave speed estimate on a uniform field") {
  MappingSpec spec;
  spec.alpha = 0.0;
  spec.N_geo = 1;
  spec.elems = {2, 2, 2};
  const CurvMesh mesh = build_mesh(spec, NodeKind::Gauss, 2);
  const GasModel gas;

  Primitive q{1.0, {0.3, 0.0, 0.0}, 0.6, {0.0, 0.0, 0.0}, 0.0};
  Field u(mesh.K, mesh.nodes_per_elem());
  for (auto &st : u.data) st = prim_to_cons(q, gas);

  // with B = 0 the fast speed is the sound speed; the max over directions
  // adds the largest |v.n| over the unit contravariant directions
  const double a = std::sqrt(gas.gamma * q.p / q.rho);
  const double ch = compute_ch(u, mesh, gas);
  CHECK(ch == doctest::Approx(0.3 + a).epsilon(1e-12));

  const double lam = max_wave_speed_global(u, mesh, gas, ch);
  CHECK(lam >= ch - 1e-13);
}
