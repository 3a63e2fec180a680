#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mhddg/cases.hpp"

using namespace mhddg;

namespace {

// checks that the manufactured field solves u_t + div f = source pointwise.
// the field has psi = 0 and div B = 0, so the non-conservative terms vanish
// and the residual is independent of c_h.
State pde_residual(const Vec3 &x, double t, double c_h) {
  const GasModel gas = manufactured_gas();
  const double h = 1e-5;
  State r{};

  State up = manufactured_exact(x, t + h);
  State um = manufactured_exact(x, t - h);
  for (int c = 0; c < kNumVars; ++c) r[c] = (up[c] - um[c]) / (2.0 * h);

  for (int d = 0; d < 3; ++d) {
    Vec3 xp = x, xm = x;
    xp[d] += h;
    xm[d] -= h;
    const State fp = flux(manufactured_exact(xp, t), gas, c_h, d);
    const State fm = flux(manufactured_exact(xm, t), gas, c_h, d);
    for (int c = 0; c < kNumVars; ++c) r[c] += (fp[c] - fm[c]) / (2.0 * h);
  }

  const State src = manufactured_source(x, t);
  for (int c = 0; c < kNumVars; ++c) r[c] -= src[c];
  return r;
}

CurvMesh unit_cartesian(int n, NodeKind kind, int N) {
  MappingSpec spec;
  spec.alpha = 0.0;
  spec.N_geo = 1;
  spec.elems = {n, n, n};
  return build_mesh(spec, kind, N);
}

}  // namespace

TEST_CASE("manufactured solution satisfies the system") {
  for (double c_h : {0.0, 1.3}) {
    for (const Vec3 &x : {Vec3{0.13, -0.42, 0.71}, Vec3{-0.8, 0.05, 0.3}}) {
      for (double t : {0.0, 0.37}) {
        const State r = pde_residual(x, t, c_h);
        for (int c = 0; c < kNumVars; ++c) CHECK(std::abs(r[c]) <= 1e-6);
      }
    }
  }
  // structure of the exact state
  const State u = manufactured_exact({0.2, 0.1, -0.3}, 0.5);
  CHECK(u[0] == doctest::Approx(u[1]));  // v1 = 1
  CHECK(u[2] == doctest::Approx(u[0]));
  CHECK(u[3] == 0.0);
  CHECK(u[5] == doctest::Approx(0.5 * u[0]));
  CHECK(u[6] == doctest::Approx(-0.25 * u[0]));
  CHECK(u[8] == 0.0);
}

TEST_CASE("blast initial condition blends the two states") {
  const GasModel gas;
  // deep inside: inner state
  const Primitive qc = cons_to_prim(blast_ic({0.0, 0.0, 0.0}, gas), gas);
  const double lam0 = std::exp(-5.0);
  CHECK(qc.rho == doctest::Approx((1.2 + lam0 * 1.0) / (1.0 + lam0)).epsilon(1e-13));
  CHECK(qc.p == doctest::Approx((0.9 + lam0 * 0.3) / (1.0 + lam0)).epsilon(1e-13));
  CHECK(qc.v[1] == doctest::Approx(lam0 * (-0.4) / (1.0 + lam0)).epsilon(1e-12));
  // far outside: outer state
  const Primitive qf = cons_to_prim(blast_ic({0.5, 0.5, 0.5}, gas), gas);
  CHECK(qf.rho == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(qf.p == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(qf.v[1] == doctest::Approx(-0.4).epsilon(1e-10));
  // the magnetic field is uniform, psi starts at zero
  for (int d = 0; d < 3; ++d) CHECK(qf.B[d] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(qc.psi == 0.0);
  // exact midpoint of the blend at r = r0
  const Primitive qm = cons_to_prim(blast_ic({0.1, 0.0, 0.0}, gas), gas);
  CHECK(qm.rho == doctest::Approx(1.1).epsilon(1e-13));
}

TEST_CASE("shear layer initial condition") {
  const GasModel gas{5.0 / 3.0, 1.0};
  const Primitive qp = cons_to_prim(khi_ic({0.3, 0.6, 0.0}, gas), gas);
  CHECK(qp.rho == doctest::Approx(1.0));
  CHECK(qp.p == doctest::Approx(1.0 / gas.gamma));
  CHECK(qp.v[0] == doctest::Approx(0.5 * std::tanh(0.6 / 0.05)).epsilon(1e-12));
  CHECK(qp.v[2] == 0.0);
  CHECK(qp.B[0] == doctest::Approx(0.1 * std::cos(M_PI / 3.0)).epsilon(1e-12));
  CHECK(qp.B[1] == 0.0);
  CHECK(qp.B[2] == doctest::Approx(0.1 * std::sin(M_PI / 3.0)).epsilon(1e-12));
  // perturbation peaks at the layer
  const Primitive q0 = cons_to_prim(khi_ic({0.25, 0.0, 0.0}, gas), gas);
  CHECK(q0.v[1] == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("shear layer diagnostics at t=0") {
  MappingSpec spec;
  spec.alpha = 0.0;
  spec.N_geo = 1;
  spec.origin = {0.0, -1.0, 0.0};
  spec.length = {1.0, 2.0, 0.1};
  spec.elems = {8, 16, 1};
  const CurvMesh mesh = build_mesh(spec, NodeKind::Gauss, 3);
  const GasModel gas{5.0 / 3.0, 1.0};
  const Field u = sample_ic(mesh, [&](const Vec3 &x) { return khi_ic(x, gas); });
  const KhiDiagnostics d = khi_diagnostics(u, mesh, gas);
  CHECK(d.dv_y == doctest::Approx(0.01).epsilon(0.05));
  CHECK(d.rho_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.p_min == doctest::Approx(1.0 / gas.gamma).epsilon(1e-12));
  // uniform in-plane field ca*cos(theta): integral over the box volume
  const double bp2 = std::pow(0.1 * std::cos(M_PI / 3.0), 2) * (1.0 * 2.0 * 0.1);
  CHECK(d.bp2_integral == doctest::Approx(bp2).epsilon(1e-10));
}

TEST_CASE("wave setups are eigenmodes of the directional Jacobian") {
  const GasModel gas{5.0 / 3.0, 1.0};
  const Vec3 box{1.0, 1.0, 1.0};
  const double c_h = 1.2;
  for (WaveFamily fam :
       {WaveFamily::Fast, WaveFamily::Alfven, WaveFamily::Slow, WaveFamily::Contact}) {
    CAPTURE(static_cast<int>(fam));
    const WaveSetup w = build_wave(fam, box, gas, c_h, 1e-6);
    const Vec3 nhat = (1.0 / norm(w.kvec)) * w.kvec;
    const Matrix A = wave_jacobian(w.base, gas, c_h, nhat);
    double rnorm = 0.0, vnorm = 0.0;
    for (int i = 0; i < kNumVars; ++i) {
      double Ar = 0.0;
      for (int j = 0; j < kNumVars; ++j) Ar += A(i, j) * w.eigvec[j];
      rnorm = std::max(rnorm, std::abs(Ar - w.speed * w.eigvec[i]));
      vnorm += w.eigvec[i] * w.eigvec[i];
    }
    CHECK(vnorm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rnorm <= 1e-6);

    // zero amplitude gives the background
    const WaveSetup w0 = build_wave(fam, box, gas, c_h, 0.0);
    const Vec3 x{0.21, 0.55, 0.83};
    const State b = wave_state(w0, x, 0.4);
    for (int c = 0; c < kNumVars; ++c)
      CHECK(b[c] == doctest::Approx(w.base[c]).epsilon(1e-14));

    // the contact mode is stationary on the zero-velocity background and has
    // no finite period; the travelling families return after one period
    if (fam == WaveFamily::Contact) {
      CHECK(std::abs(w.speed) <= 1e-10);
    } else {
      CHECK(w.period() ==
            doctest::Approx(2.0 * M_PI / (norm(w.kvec) * std::abs(w.speed))));
      const State s0 = wave_state(w, x, 0.0);
      const State sT = wave_state(w, x, w.period());
      for (int c = 0; c < kNumVars; ++c)
        CHECK(sT[c] == doctest::Approx(s0[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("error norms and convergence-rate helper") {
  const CurvMesh mesh = unit_cartesian(2, NodeKind::Gauss, 2);
  const GasModel gas;
  const auto exact = [&](const Vec3 &x) {
    Primitive q{1.0 + 0.1 * x[0], {0.0, 0.0, 0.0}, 1.0, {0.0, 0.0, 0.0}, 0.0};
    return prim_to_cons(q, gas);
  };
  const Field u = sample_ic(mesh, exact);
  const auto e0 = error_l2(u, mesh, exact);
  for (double e : e0) CHECK(e <= 1e-13);
  CHECK(error_l1_max(u, mesh, exact) <= 1e-13);

  // constant offset of size eps in one variable -> L2 error eps
  Field v = u;
  for (auto &st : v.data) st[0] += 1e-3;
  const auto e1 = error_l2(v, mesh, exact);
  CHECK(e1[0] == doctest::Approx(1e-3).epsilon(1e-10));
  for (int c = 1; c < kNumVars; ++c) CHECK(e1[c] <= 1e-13);

  // exact cubic decay -> rate 3
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> err;
  for (double hh : h) err.push_back(2.0 * hh * hh * hh);
  CHECK(eoc_mean(h, err) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("total entropy of a uniform unit state vanishes") {
  const CurvMesh mesh = unit_cartesian(2, NodeKind::Lobatto, 2);
  const GasModel gas{2.0, 1.0};
  Field u(mesh.K, mesh.nodes_per_elem());
  const Primitive q{1.0, {0.2, 0.0, 0.0}, 1.0, {0.1, 0.0, 0.0}, 0.0};
  for (auto &st : u.data) st = prim_to_cons(q, gas);
  // s = ln(p rho^-gamma) = 0, so S = -rho s/(gamma-1) integrates to zero
  CHECK(std::abs(total_entropy(u, mesh, gas)) <= 1e-13);
}
