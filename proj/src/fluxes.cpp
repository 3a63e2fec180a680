#include "mhddg/fluxes.hpp"

namespace mhddg {

namespace {

// Two-point means shared by all flux directions of one node pair.
struct PairMeans {
  double rho_ln, beta_ln, p_tilde;
  Vec3 v_bar, B_bar;
  double psi_bar;
  double v2_avg, B2_avg, vB_avg;
  Vec3 vB2_avg;   // avg(v_d |B|^2)
  Vec3 psiB_avg;  // avg(psi B_d)
};

PairMeans pair_means(const Primitive &L, const Primitive &R) {
  PairMeans m;
  const double betaL = L.rho / (2.0 * L.p);
  const double betaR = R.rho / (2.0 * R.p);
  m.rho_ln = log_mean(L.rho, R.rho);
  m.beta_ln = log_mean(betaL, betaR);
  m.p_tilde = avg(L.rho, R.rho) / (2.0 * avg(betaL, betaR));
  for (int d = 0; d < 3; ++d) {
    m.v_bar[d] = avg(L.v[d], R.v[d]);
    m.B_bar[d] = avg(L.B[d], R.B[d]);
  }
  m.psi_bar = avg(L.psi, R.psi);
  m.v2_avg = avg(dot(L.v, L.v), dot(R.v, R.v));
  const double B2L = dot(L.B, L.B), B2R = dot(R.B, R.B);
  m.B2_avg = avg(B2L, B2R);
  m.vB_avg = avg(dot(L.v, L.B), dot(R.v, R.B));
  for (int d = 0; d < 3; ++d) {
    m.vB2_avg[d] = avg(L.v[d] * B2L, R.v[d] * B2R);
    m.psiB_avg[d] = avg(L.psi * L.B[d], R.psi * R.B[d]);
  }
  return m;
}

State ec_flux_from_means(const PairMeans &m, const GasModel &gas, double c_h, int d) {
  const double im = 1.0 / gas.mu0;
  State f;
  f[0] = m.rho_ln * m.v_bar[d];
  for (int i = 0; i < 3; ++i) f[1 + i] = f[0] * m.v_bar[i] - m.B_bar[d] * m.B_bar[i] * im;
  f[1 + d] += m.p_tilde + 0.5 * m.B2_avg * im;
  for (int i = 0; i < 3; ++i) f[5 + i] = m.v_bar[d] * m.B_bar[i] - m.v_bar[i] * m.B_bar[d];
  f[5 + d] = c_h * m.psi_bar;
  f[8] = c_h * m.B_bar[d];
  f[4] = f[0] * (0.5 / ((gas.gamma - 1.0) * m.beta_ln) - 0.5 * m.v2_avg) +
         f[1] * m.v_bar[0] + f[2] * m.v_bar[1] + f[3] * m.v_bar[2] +
         (f[5] * m.B_bar[0] + f[6] * m.B_bar[1] + f[7] * m.B_bar[2] + f[8] * m.psi_bar -
          0.5 * m.vB2_avg[d] + m.B_bar[d] * m.vB_avg - c_h * m.psiB_avg[d]) *
             im;
  return f;
}

}  // namespace

State ec_flux(const State &uL, const State &uR, const GasModel &gas, double c_h, int dir) {
  const PairMeans m = pair_means(cons_to_prim(uL, gas), cons_to_prim(uR, gas));
  return ec_flux_from_means(m, gas, c_h, dir);
}

State ec_flux_vec(const State &uL, const State &uR, const GasModel &gas, double c_h,
                  const Vec3 &n) {
  const PairMeans m = pair_means(cons_to_prim(uL, gas), cons_to_prim(uR, gas));
  State f{};
  for (int d = 0; d < 3; ++d) {
    if (n[d] == 0.0) continue;
    f += n[d] * ec_flux_from_means(m, gas, c_h, d);
  }
  return f;
}

PreparedState prepare_state(const State &u, const GasModel &gas) {
  const Primitive q = cons_to_prim(u, gas);
  PreparedState s;
  s.u = u;
  s.rho = q.rho;
  s.psi = q.psi;
  s.beta = q.rho / (2.0 * q.p);
  s.ln_rho = std::log(s.rho);
  s.ln_beta = std::log(s.beta);
  s.v = q.v;
  s.B = q.B;
  s.v2 = dot(q.v, q.v);
  s.B2 = dot(q.B, q.B);
  s.vB = dot(q.v, q.B);
  for (int d = 0; d < 3; ++d) {
    s.vB2[d] = q.v[d] * s.B2;
    s.psiB[d] = q.psi * q.B[d];
  }
  return s;
}

namespace {

// log mean with the logarithms precomputed; same near-equal series branch as
// log_mean, difference-of-logs otherwise
double log_mean_hoisted(double a, double la, double b, double lb) {
  const double zeta = a / b;
  if (std::abs(zeta - 1.0) < 1e-2) {
    const double t = (zeta - 1.0) / (zeta + 1.0);
    const double t2 = t * t;
    const double series = 1.0 + t2 / 3.0 + t2 * t2 / 5.0 + t2 * t2 * t2 / 7.0;
    return 0.5 * (a + b) / series;
  }
  return (a - b) / (la - lb);
}

}  // namespace

State ec_flux_prepared(const PreparedState &L, const PreparedState &R, const GasModel &gas,
                       double c_h, const Vec3 &n) {
  const double im = 1.0 / gas.mu0;
  const double rho_ln = log_mean_hoisted(L.rho, L.ln_rho, R.rho, R.ln_rho);
  const double beta_ln = log_mean_hoisted(L.beta, L.ln_beta, R.beta, R.ln_beta);
  const double p_tilde = avg(L.rho, R.rho) / (2.0 * avg(L.beta, R.beta));
  Vec3 v_bar, B_bar;
  for (int d = 0; d < 3; ++d) {
    v_bar[d] = avg(L.v[d], R.v[d]);
    B_bar[d] = avg(L.B[d], R.B[d]);
  }
  const double psi_bar = avg(L.psi, R.psi);
  const double v2_avg = avg(L.v2, R.v2);
  const double B2_avg = avg(L.B2, R.B2);
  const double vB_avg = avg(L.vB, R.vB);
  const double vn = dot(v_bar, n), Bn = dot(B_bar, n);

  State f;
  f[0] = rho_ln * vn;
  const double ptot = p_tilde + 0.5 * B2_avg * im;
  for (int i = 0; i < 3; ++i) f[1 + i] = f[0] * v_bar[i] - Bn * B_bar[i] * im + n[i] * ptot;
  for (int i = 0; i < 3; ++i)
    f[5 + i] = vn * B_bar[i] - v_bar[i] * Bn + n[i] * c_h * psi_bar;
  f[8] = c_h * Bn;
  double vB2n = 0.0, psiBn = 0.0;
  for (int d = 0; d < 3; ++d) {
    vB2n += n[d] * avg(L.vB2[d], R.vB2[d]);
    psiBn += n[d] * avg(L.psiB[d], R.psiB[d]);
  }
  f[4] = f[0] * (0.5 / ((gas.gamma - 1.0) * beta_ln) - 0.5 * v2_avg) +
         f[1] * v_bar[0] + f[2] * v_bar[1] + f[3] * v_bar[2] +
         (f[5] * B_bar[0] + f[6] * B_bar[1] + f[7] * B_bar[2] + f[8] * psi_bar -
          0.5 * vB2n + Bn * vB_avg - c_h * psiBn) *
             im;
  return f;
}

double max_wave_speed_prepared(const PreparedState &q, const GasModel &gas,
                               const Vec3 &nhat, double c_h) {
  const double p = q.rho / (2.0 * q.beta);
  const double a2 = gas.gamma * p / q.rho;
  const double b2 = q.B2 / (q.rho * gas.mu0);
  const double Bn = dot(q.B, nhat);
  const double bn2 = Bn * Bn / (q.rho * gas.mu0);
  const double s = a2 + b2;
  const double cf2 = 0.5 * (s + std::sqrt(std::max(s * s - 4.0 * a2 * bn2, 0.0)));
  return std::max(std::abs(dot(q.v, nhat)) + std::sqrt(cf2), c_h);
}

State es_rusanov(const State &uM, const State &uP, const GasModel &gas, double c_h,
                 const Vec3 &n) {
  const double len = norm(n);
  const Vec3 nhat = (1.0 / len) * n;
  const double lam =
      len * std::max(max_wave_speed(uM, gas, nhat, c_h), max_wave_speed(uP, gas, nhat, c_h));
  State f = ec_flux_vec(uM, uP, gas, c_h, n);
  f -= (0.5 * lam) * (uP - uM);
  return f;
}

State surface_flux(const State &uM, const State &uP, const GasModel &gas, double c_h,
                   const Vec3 &n, bool dissipative) {
  return dissipative ? es_rusanov(uM, uP, gas, c_h, n)
                     : ec_flux_vec(uM, uP, gas, c_h, n);
}

State noncons_diamond(const State &uj, const State &uk, const GasModel &gas, int dir) {
  const Primitive qj = cons_to_prim(uj, gas);
  const Primitive qk = cons_to_prim(uk, gas);
  return avg(qj.B[dir], qk.B[dir]) * phi_powell(uj, gas) +
         avg(qj.psi, qk.psi) * phi_glm(uj, gas, dir);
}

State noncons_star(const State &uj, const State &uk, const GasModel &gas, int dir) {
  const Primitive qk = cons_to_prim(uk, gas);
  return qk.B[dir] * phi_powell(uj, gas) + qk.psi * phi_glm(uj, gas, dir);
}

State metric_noncons(const State &ui, const State &um, const GasModel &gas,
                     const Vec3 &Ja_i, const Vec3 &Ja_m, MetricVariant variant) {
  const Primitive qi = cons_to_prim(ui, gas);
  const Primitive qm = cons_to_prim(um, gas);
  const Vec3 Ja_avg = 0.5 * (Ja_i + Ja_m);
  double coef;
  if (variant == MetricVariant::Diamond) {
    coef = 0.5 * (dot(qi.B, Ja_i) + dot(qm.B, Ja_avg));
  } else {
    coef = dot(0.5 * (qi.B + qm.B), Ja_avg);
  }
  // GLM part: (phi^GLM-vec_i . Ja_i) avg(psi); phi^GLM_l only has entries
  // (4) = v_l psi / mu0 and (8) = v_l / mu0, so the contraction is phi^GLM
  // evaluated along v with v_l replaced by v . Ja_i.
  const double vJa = dot(qi.v, Ja_i);
  State out = coef * phi_powell(ui, gas);
  const double psi_avg = avg(qi.psi, qm.psi);
  out[4] += vJa * qi.psi / gas.mu0 * psi_avg;
  out[8] += vJa / gas.mu0 * psi_avg;
  return out;
}

State metric_noncons_prepared(const PreparedState &qi, const PreparedState &qm,
                              const GasModel &gas, const Vec3 &Ja_i, const Vec3 &Ja_m,
                              MetricVariant variant) {
  const double im = 1.0 / gas.mu0;
  const Vec3 Ja_avg = 0.5 * (Ja_i + Ja_m);
  double coef;
  if (variant == MetricVariant::Diamond) {
    coef = 0.5 * (dot(qi.B, Ja_i) + dot(qm.B, Ja_avg));
  } else {
    coef = dot(0.5 * (qi.B + qm.B), Ja_avg);
  }
  // phi^MHD = [0, B/mu0, v.B/mu0, v, 0]; GLM entries as in metric_noncons
  State out;
  out[0] = 0.0;
  for (int i = 0; i < 3; ++i) out[1 + i] = coef * qi.B[i] * im;
  out[4] = coef * qi.vB * im;
  for (int i = 0; i < 3; ++i) out[5 + i] = coef * qi.v[i];
  out[8] = 0.0;
  const double vJa = dot(qi.v, Ja_i);
  const double psi_avg = avg(qi.psi, qm.psi);
  out[4] += vJa * qi.psi * im * psi_avg;
  out[8] += vJa * im * psi_avg;
  return out;
}

State face_noncons(const State &u, const State &uOther, const GasModel &gas, const Vec3 &n) {
  return metric_noncons(u, uOther, gas, n, n, MetricVariant::Diamond);
}

double entropy_production_volume(const State &ui, const State &um, const GasModel &gas,
                                 double c_h, const Vec3 &Ja_i, const Vec3 &Ja_m,
                                 MetricVariant variant) {
  const State wi = entropy_vars(ui, gas);
  const State wm = entropy_vars(um, gas);
  const Vec3 Ja_avg = 0.5 * (Ja_i + Ja_m);
  const State fst = ec_flux_vec(ui, um, gas, c_h, Ja_avg);
  // full potential: entropy_potential plus the c_h part of v^T f, which is
  // c_h v9 (B . n); without it the c_h pieces only telescope instead of
  // cancelling pointwise
  const double Psi_i = dot(Ja_avg, entropy_potential_vec(ui, gas)) +
                       c_h * wi[8] * (ui[5] * Ja_avg[0] + ui[6] * Ja_avg[1] + ui[7] * Ja_avg[2]);
  const double Psi_m = dot(Ja_avg, entropy_potential_vec(um, gas)) +
                       c_h * wm[8] * (um[5] * Ja_avg[0] + um[6] * Ja_avg[1] + um[7] * Ja_avg[2]);
  return dot(wm - wi, fst) + dot(wm, metric_noncons(um, ui, gas, Ja_m, Ja_i, variant)) -
         dot(wi, metric_noncons(ui, um, gas, Ja_i, Ja_m, variant)) - (Psi_m - Psi_i);
}

double entropy_production_surface(const State &uM, const State &uP, const GasModel &gas,
                                  double c_h, const Vec3 &n, bool dissipative) {
  const State wM = entropy_vars(uM, gas);
  const State wP = entropy_vars(uP, gas);
  const State fhat = surface_flux(uM, uP, gas, c_h, n, dissipative);
  const double Psi_M = dot(n, entropy_potential_vec(uM, gas)) +
                       c_h * wM[8] * (uM[5] * n[0] + uM[6] * n[1] + uM[7] * n[2]);
  const double Psi_P = dot(n, entropy_potential_vec(uP, gas)) +
                       c_h * wP[8] * (uP[5] * n[0] + uP[6] * n[1] + uP[7] * n[2]);
  return dot(wP - wM, fhat) + dot(wP, face_noncons(uP, uM, gas, n)) -
         dot(wM, face_noncons(uM, uP, gas, n)) - (Psi_P - Psi_M);
}

double entropy_surface_flux(const State &uM, const State &uP, const GasModel &gas,
                            double c_h, const Vec3 &n, bool dissipative) {
  const State wM = entropy_vars(uM, gas);
  const State wP = entropy_vars(uP, gas);
  const State fhat = surface_flux(uM, uP, gas, c_h, n, dissipative);
  const double Psi_M = dot(n, entropy_potential_vec(uM, gas)) +
                       c_h * wM[8] * (uM[5] * n[0] + uM[6] * n[1] + uM[7] * n[2]);
  const double Psi_P = dot(n, entropy_potential_vec(uP, gas)) +
                       c_h * wP[8] * (uP[5] * n[0] + uP[6] * n[1] + uP[7] * n[2]);
  return dot(0.5 * (wM + wP), fhat) + 0.5 * dot(wM, face_noncons(uM, uP, gas, n)) +
         0.5 * dot(wP, face_noncons(uP, uM, gas, n)) - 0.5 * (Psi_M + Psi_P);
}

}  // namespace mhddg
