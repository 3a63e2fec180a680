#include "mhddg/cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <lapacke.h>

#include "mhddg/timeint.hpp"

namespace mhddg {

namespace {

double mh(const Vec3 &x, double t) {
  return 0.5 * std::sin(2.0 * M_PI * (x[0] + x[1] + x[2] - t)) + 2.0;
}
double mh_x(const Vec3 &x, double t) {
  return M_PI * std::cos(2.0 * M_PI * (x[0] + x[1] + x[2] - t));
}

}  // namespace

State manufactured_exact(const Vec3 &x, double t) {
  const double h = mh(x, t);
  return {h, h, h, 0.0, 2.0 * h * h + h, 0.5 * h, -0.25 * h, -0.25 * h, 0.0};
}

State manufactured_source(const Vec3 &x, double t) {
  const double h = mh(x, t);
  const double hx = mh_x(x, t);
  return {hx,
          hx + 4.0 * h * hx,
          hx + 4.0 * h * hx,
          4.0 * h * hx,
          hx + 12.0 * h * hx,
          0.5 * hx,
          -0.25 * hx,
          -0.25 * hx,
          0.0};
}

State blast_ic(const Vec3 &x, const GasModel &gas) {
  const double r0 = 0.1, delta0 = 0.1;
  const double r = norm(x);
  const double lam = std::exp((5.0 / delta0) * (r - r0));
  const Primitive inner{1.2, {0.1, 0.0, 0.1}, 0.9, {1.0, 1.0, 1.0}, 0.0};
  const Primitive outer{1.0, {0.2, -0.4, 0.2}, 0.3, {1.0, 1.0, 1.0}, 0.0};
  const double s = 1.0 / (1.0 + lam);
  Primitive q;
  q.rho = s * (inner.rho + lam * outer.rho);
  q.p = s * (inner.p + lam * outer.p);
  q.psi = s * (inner.psi + lam * outer.psi);
  for (int d = 0; d < 3; ++d) {
    q.v[d] = s * (inner.v[d] + lam * outer.v[d]);
    q.B[d] = s * (inner.B[d] + lam * outer.B[d]);
  }
  return prim_to_cons(q, gas);
}

State khi_ic(const Vec3 &x, const GasModel &gas) {
  const double M = 1.0, y0 = 1.0 / 20.0, ca = 0.1, theta = M_PI / 3.0;
  const double v20 = 0.01, sigma = 0.1;
  Primitive q;
  q.rho = 1.0;
  q.p = 1.0 / gas.gamma;
  q.psi = 0.0;
  q.v[0] = 0.5 * M * std::tanh(x[1] / y0);
  q.v[1] = v20 * std::sin(2.0 * M_PI * x[0]) * std::exp(-x[1] * x[1] / (sigma * sigma));
  q.v[2] = 0.0;
  q.B = {ca * std::cos(theta), 0.0, ca * std::sin(theta)};
  return prim_to_cons(q, gas);
}

Matrix wave_jacobian(const State &u, const GasModel &gas, double c_h, const Vec3 &nhat) {
  Matrix A(kNumVars, kNumVars);
  for (int j = 0; j < kNumVars; ++j) {
    const double eps = 1e-7 * std::max(1.0, std::abs(u[j]));
    State up = u, um = u;
    up[j] += eps;
    um[j] -= eps;
    State fp{}, fm{};
    for (int d = 0; d < 3; ++d) {
      if (nhat[d] == 0.0) continue;
      fp += nhat[d] * flux(up, gas, c_h, d);
      fm += nhat[d] * flux(um, gas, c_h, d);
    }
    for (int i = 0; i < kNumVars; ++i) A(i, j) = (fp[i] - fm[i]) / (2.0 * eps);
  }
  // non-conservative contributions: phi^MHD acts on grad(B.n), the GLM vector
  // term acts on grad(psi) along n
  const State powell = phi_powell(u, gas);
  for (int d = 0; d < 3; ++d)
    for (int i = 0; i < kNumVars; ++i) A(i, 5 + d) += powell[i] * nhat[d];
  const Primitive q = cons_to_prim(u, gas);
  const double vn = dot(q.v, nhat);
  A(4, 8) += vn * q.psi / gas.mu0;
  A(8, 8) += vn / gas.mu0;
  return A;
}

WaveSetup build_wave(WaveFamily family, const Vec3 &box_length, const GasModel &gas,
                     double c_h, double amplitude) {
  WaveSetup w;
  w.gas = gas;
  w.amplitude = amplitude;
  const Primitive bg{1.0, {0.0, 0.0, 0.0}, 3.0 / 5.0, {1.0, std::sqrt(2.0), 0.5}, 0.0};
  w.base = prim_to_cons(bg, gas);

  // wavevector along the box diagonal with integer period counts per side
  double l2min = std::numeric_limits<double>::infinity();
  for (int d = 0; d < 3; ++d) l2min = std::min(l2min, box_length[d] * box_length[d]);
  for (int d = 0; d < 3; ++d) {
    const double m = std::round(box_length[d] * box_length[d] / l2min);
    w.kvec[d] = 2.0 * M_PI * m / box_length[d];
  }
  const Vec3 nhat = (1.0 / norm(w.kvec)) * w.kvec;

  double target = 0.0;
  const double bn = dot(bg.B, nhat) / std::sqrt(gas.mu0 * bg.rho);
  switch (family) {
    case WaveFamily::Fast:
      target = fast_speed(w.base, gas, nhat);
      break;
    case WaveFamily::Alfven:
      target = std::abs(bn);
      break;
    case WaveFamily::Slow: {
      const double a2 = gas.gamma * bg.p / bg.rho;
      const double b2 = dot(bg.B, bg.B) / (gas.mu0 * bg.rho);
      const double rad = std::sqrt(std::max(0.0, (a2 + b2) * (a2 + b2) - 4.0 * a2 * bn * bn));
      target = std::sqrt(std::max(0.0, 0.5 * (a2 + b2 - rad)));
      break;
    }
    case WaveFamily::Contact:
      target = dot(bg.v, nhat);
      break;
  }

  Matrix A = wave_jacobian(w.base, gas, c_h, nhat);
  std::vector<double> wr(kNumVars), wi(kNumVars), vr(kNumVars * kNumVars);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'V', kNumVars, A.a.data(), kNumVars,
                    wr.data(), wi.data(), nullptr, kNumVars, vr.data(), kNumVars);
  if (info != 0) throw ConfigError("eigen-decomposition of the wave Jacobian failed");

  int best = -1;
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  for (int j = 0; j < kNumVars; ++j) {
    const double d = std::hypot(wr[j] - target, wi[j]);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = j;
    } else if (d < d2) {
      d2 = d;
    }
  }
  if (best < 0 || std::abs(wi[best]) > 1e-8 || d2 - d1 < 1e-3)
    throw ConfigError("degenerate eigenstructure for the requested wave family");

  w.speed = wr[best];
  double nrm = 0.0;
  for (int i = 0; i < kNumVars; ++i) {
    w.eigvec[i] = vr[static_cast<size_t>(i) * kNumVars + best];
    nrm += w.eigvec[i] * w.eigvec[i];
  }
  nrm = std::sqrt(nrm);
  int imax = 0;
  for (int i = 1; i < kNumVars; ++i)
    if (std::abs(w.eigvec[i]) > std::abs(w.eigvec[imax])) imax = i;
  const double sgn = (w.eigvec[imax] >= 0.0) ? 1.0 : -1.0;
  w.eigvec = (sgn / nrm) * w.eigvec;
  return w;
}

State wave_state(const WaveSetup &w, const Vec3 &x, double t) {
  const double phase = dot(w.kvec, x) - w.speed * norm(w.kvec) * t;
  return w.base + (w.amplitude * std::sin(phase)) * w.eigvec;
}

Field sample_ic(const CurvMesh &mesh, const std::function<State(const Vec3 &)> &ic) {
  Field f(mesh.K, mesh.nodes_per_elem());
  for (int e = 0; e < mesh.K; ++e)
    for (int n = 0; n < mesh.nodes_per_elem(); ++n)
      f.at(e, n) = ic(mesh.elem[e].xyz[n]);
  return f;
}

namespace {

template <typename Fn>
void quad_loop(const CurvMesh &mesh, Fn &&fn) {
  const OperatorSet &ops = get_operators(mesh.kind, mesh.N);
  const int np = mesh.np();
  for (int e = 0; e < mesh.K; ++e) {
    const ElementGeometry &g = mesh.elem[e];
    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
          const int n = mesh.node_index(i, j, k);
          const double wJ = ops.rule.w[i] * ops.rule.w[j] * ops.rule.w[k] * g.J[n];
          fn(e, n, g.xyz[n], wJ);
        }
  }
}

}  // namespace

std::array<double, kNumVars> error_l2(const Field &field, const CurvMesh &mesh,
                                      const std::function<State(const Vec3 &)> &exact) {
  std::array<KahanSum, kNumVars> num{};
  KahanSum vol;
  quad_loop(mesh, [&](int e, int n, const Vec3 &x, double wJ) {
    const State d = field.at(e, n) - exact(x);
    for (int v = 0; v < kNumVars; ++v) num[v].add(wJ * d[v] * d[v]);
    vol.add(wJ);
  });
  std::array<double, kNumVars> out;
  for (int v = 0; v < kNumVars; ++v) out[v] = std::sqrt(num[v].value() / vol.value());
  return out;
}

double error_l1_max(const Field &field, const CurvMesh &mesh,
                    const std::function<State(const Vec3 &)> &exact) {
  std::array<KahanSum, kNumVars> num{};
  KahanSum vol;
  quad_loop(mesh, [&](int e, int n, const Vec3 &x, double wJ) {
    const State d = field.at(e, n) - exact(x);
    for (int v = 0; v < kNumVars; ++v) num[v].add(wJ * std::abs(d[v]));
    vol.add(wJ);
  });
  double out = 0.0;
  for (int v = 0; v < kNumVars; ++v) out = std::max(out, num[v].value() / vol.value());
  return out;
}

double eoc_mean(const std::vector<double> &h, const std::vector<double> &err) {
  if (h.size() != err.size() || h.size() < 2)
    throw ConfigError("convergence study needs at least two levels");
  std::vector<double> rates;
  for (size_t l = 1; l < h.size(); ++l)
    rates.push_back(std::log(err[l - 1] / err[l]) / std::log(h[l - 1] / h[l]));
  const size_t use = std::min<size_t>(3, rates.size());
  double s = 0.0;
  for (size_t l = rates.size() - use; l < rates.size(); ++l) s += rates[l];
  return s / use;
}

double total_entropy(const Field &field, const CurvMesh &mesh, const GasModel &gas) {
  KahanSum s;
  quad_loop(mesh, [&](int e, int n, const Vec3 &, double wJ) {
    s.add(wJ * entropy(field.at(e, n), gas));
  });
  return s.value();
}

KhiDiagnostics khi_diagnostics(const Field &field, const CurvMesh &mesh,
                               const GasModel &gas) {
  KhiDiagnostics d;
  d.rho_min = std::numeric_limits<double>::infinity();
  d.p_min = std::numeric_limits<double>::infinity();
  double v2min = std::numeric_limits<double>::infinity();
  double v2max = -std::numeric_limits<double>::infinity();
  KahanSum bp2;
  quad_loop(mesh, [&](int e, int n, const Vec3 &, double wJ) {
    const Primitive q = cons_to_prim(field.at(e, n), gas);
    bp2.add(wJ * (q.B[0] * q.B[0] + q.B[1] * q.B[1]));
    v2min = std::min(v2min, q.v[1]);
    v2max = std::max(v2max, q.v[1]);
    d.rho_min = std::min(d.rho_min, q.rho);
    d.p_min = std::min(d.p_min, q.p);
  });
  d.bp2_integral = bp2.value();
  d.dv_y = 0.5 * (v2max - v2min);
  return d;
}

}  // namespace mhddg
