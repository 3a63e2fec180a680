#include "mhddg/physics.hpp"

namespace mhddg {

double pressure(const State &u, const GasModel &gas) {
  const double rho = u[0];
  const double ke = 0.5 * (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / rho;
  const double me = 0.5 * (u[5] * u[5] + u[6] * u[6] + u[7] * u[7]) / gas.mu0;
  const double pe = 0.5 * u[8] * u[8] / gas.mu0;
  return (gas.gamma - 1.0) * (u[4] - ke - me - pe);
}

bool admissible(const State &u, const GasModel &gas) {
  if (!(u[0] > 0.0)) return false;
  if (!(pressure(u, gas) > 0.0)) return false;
  for (int c = 0; c < kNumVars; ++c)
    if (!std::isfinite(u[c])) return false;
  return true;
}

Primitive cons_to_prim(const State &u, const GasModel &gas) {
  Primitive q;
  q.rho = u[0];
  q.v = {u[1] / u[0], u[2] / u[0], u[3] / u[0]};
  q.p = pressure(u, gas);
  q.B = {u[5], u[6], u[7]};
  q.psi = u[8];
  return q;
}

State prim_to_cons(const Primitive &q, const GasModel &gas) {
  State u;
  u[0] = q.rho;
  u[1] = q.rho * q.v[0];
  u[2] = q.rho * q.v[1];
  u[3] = q.rho * q.v[2];
  u[4] = q.p / (gas.gamma - 1.0) + 0.5 * q.rho * dot(q.v, q.v) +
         0.5 * dot(q.B, q.B) / gas.mu0 + 0.5 * q.psi * q.psi / gas.mu0;
  u[5] = q.B[0];
  u[6] = q.B[1];
  u[7] = q.B[2];
  u[8] = q.psi;
  return u;
}

double entropy(const State &u, const GasModel &gas) {
  const double p = pressure(u, gas);
  const double s = std::log(p) - gas.gamma * std::log(u[0]);
  return -u[0] * s / (gas.gamma - 1.0);
}

State entropy_vars(const State &u, const GasModel &gas) {
  const Primitive q = cons_to_prim(u, gas);
  const double beta = q.rho / (2.0 * q.p);
  const double s = std::log(q.p) - gas.gamma * std::log(q.rho);
  State v;
  v[0] = (gas.gamma - s) / (gas.gamma - 1.0) - beta * dot(q.v, q.v);
  v[1] = 2.0 * beta * q.v[0];
  v[2] = 2.0 * beta * q.v[1];
  v[3] = 2.0 * beta * q.v[2];
  v[4] = -2.0 * beta;
  v[5] = 2.0 * beta * q.B[0];
  v[6] = 2.0 * beta * q.B[1];
  v[7] = 2.0 * beta * q.B[2];
  v[8] = 2.0 * beta * q.psi;
  return v;
}

State entropy_vars_to_state(const State &v, const GasModel &gas) {
  if (!(v[4] < 0.0)) throw InadmissibleState("entropy variables require v5 < 0");
  const double beta = -0.5 * v[4];
  const double inv2b = 1.0 / (2.0 * beta);
  Primitive q;
  q.v = {v[1] * inv2b, v[2] * inv2b, v[3] * inv2b};
  q.B = {v[5] * inv2b, v[6] * inv2b, v[7] * inv2b};
  q.psi = v[8] * inv2b;
  const double s = gas.gamma - (gas.gamma - 1.0) * (v[0] + beta * dot(q.v, q.v));
  q.rho = std::exp((s + std::log(2.0 * beta)) / (1.0 - gas.gamma));
  q.p = q.rho * inv2b;
  return prim_to_cons(q, gas);
}

State flux(const State &u, const GasModel &gas, double c_h, int dir) {
  const Primitive q = cons_to_prim(u, gas);
  const double im = 1.0 / gas.mu0;
  const double B2 = dot(q.B, q.B);
  const double vd = q.v[dir];
  State f;
  f[0] = q.rho * vd;
  for (int i = 0; i < 3; ++i) f[1 + i] = q.rho * vd * q.v[i] - q.B[dir] * q.B[i] * im;
  f[1 + dir] += q.p + 0.5 * B2 * im;
  f[4] = vd * (0.5 * q.rho * dot(q.v, q.v) + gas.gamma * q.p / (gas.gamma - 1.0)) +
         (vd * B2 - q.B[dir] * dot(q.v, q.B)) * im + c_h * q.psi * q.B[dir] * im;
  for (int i = 0; i < 3; ++i) f[5 + i] = vd * q.B[i] - q.v[i] * q.B[dir];
  f[5 + dir] = c_h * q.psi;
  f[8] = c_h * q.B[dir];
  return f;
}

State phi_powell(const State &u, const GasModel &gas) {
  const Primitive q = cons_to_prim(u, gas);
  const double im = 1.0 / gas.mu0;
  return {0.0, q.B[0] * im, q.B[1] * im, q.B[2] * im, dot(q.v, q.B) * im,
          q.v[0], q.v[1], q.v[2], 0.0};
}

State phi_glm(const State &u, const GasModel &gas, int dir) {
  const Primitive q = cons_to_prim(u, gas);
  const double im = 1.0 / gas.mu0;
  State p{};
  p[4] = q.v[dir] * q.psi * im;
  p[8] = q.v[dir] * im;
  return p;
}

State phi_cap(const State &u, const GasModel &gas, int dir) {
  const Primitive q = cons_to_prim(u, gas);
  return q.B[dir] * phi_powell(u, gas) + q.psi * phi_glm(u, gas, dir);
}

double entropy_potential(const State &u, const GasModel &gas, int dir) {
  // contracts the c_h = 0 flux: the c_h parts of v^T f (2 beta c_h psi B_d / mu0)
  // cancel against the GLM non-conservative terms in the entropy balance, so the
  // potential itself carries no divergence-speed dependence.
  const Primitive q = cons_to_prim(u, gas);
  const State v = entropy_vars(u, gas);
  const double S = entropy(u, gas);
  const double theta = (q.rho / q.p) * dot(q.v, q.B) / gas.mu0;
  return dot(v, flux(u, gas, 0.0, dir)) - q.v[dir] * S + theta * q.B[dir];
}

Vec3 entropy_potential_vec(const State &u, const GasModel &gas) {
  return {entropy_potential(u, gas, 0), entropy_potential(u, gas, 1),
          entropy_potential(u, gas, 2)};
}

double fast_speed(const State &u, const GasModel &gas, const Vec3 &n) {
  const Primitive q = cons_to_prim(u, gas);
  const double a2 = gas.gamma * q.p / q.rho;
  const double b2 = dot(q.B, q.B) / (gas.mu0 * q.rho);
  const double bn = dot(q.B, n);
  const double bn2 = bn * bn / (gas.mu0 * q.rho);
  const double s = a2 + b2;
  const double disc = std::sqrt(std::max(0.0, s * s - 4.0 * a2 * bn2));
  return std::sqrt(0.5 * (s + disc));
}

double max_wave_speed(const State &u, const GasModel &gas, const Vec3 &n, double c_h) {
  const Primitive q = cons_to_prim(u, gas);
  return std::max(std::abs(dot(q.v, n)) + fast_speed(u, gas, n), c_h);
}

double jump(double a, double b) { return b - a; }
double avg(double a, double b) { return 0.5 * (a + b); }

double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw InadmissibleState("log_mean needs positive arguments");
  const double zeta = a / b;
  // generous series band: the direct formula loses ~1e-12 relative accuracy
  // near zeta = 1 +- 1e-4 (cancellation in ln), while the 4-term expansion is
  // exact to ~1e-20 everywhere below 1e-2
  if (std::abs(zeta - 1.0) < 1e-2) {
    const double t = (zeta - 1.0) / (zeta + 1.0);
    const double t2 = t * t;
    // 1/ln(zeta) = (1/(2t)) / (1 + t^2/3 + t^4/5 + t^6/7 + ...)
    const double series = 1.0 + t2 / 3.0 + t2 * t2 / 5.0 + t2 * t2 * t2 / 7.0;
    return 0.5 * (a + b) / series;
  }
  return (b - a) / std::log(b / a);
}

}  // namespace mhddg
