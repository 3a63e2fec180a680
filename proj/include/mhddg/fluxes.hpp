#pragma once

#include "mhddg/physics.hpp"

namespace mhddg {

// Entropy-conservative two-point volume flux in coordinate direction dir.
// Symmetric and consistent; together with the diamond coupling terms the
// pointwise entropy production vanishes to round-off.
State ec_flux(const State &uL, const State &uR, const GasModel &gas, double c_h, int dir);

// Directional EC flux contracted with a (generally non-unit) vector n:
// sum_d n[d] * ec_flux_d. All two-point means are computed once.
State ec_flux_vec(const State &uL, const State &uR, const GasModel &gas, double c_h,
                  const Vec3 &n);

// Per-node quantities shared by every two-point evaluation involving the
// node. Preparing them once per element removes the repeated primitive
// recovery from the volume and correction loops.
struct PreparedState {
  State u;
  double rho, psi, beta;     // beta = rho / (2p)
  double ln_rho, ln_beta;    // hoisted logarithms for the pairwise log means
  Vec3 v, B;
  double v2, B2, vB;  // |v|^2, |B|^2, v.B
  Vec3 vB2, psiB;     // v_d |B|^2, psi B_d
};
PreparedState prepare_state(const State &u, const GasModel &gas);

// EC flux contracted with n, from prepared nodes. Same bilinear form as
// ec_flux_vec up to summation order.
State ec_flux_prepared(const PreparedState &L, const PreparedState &R, const GasModel &gas,
                       double c_h, const Vec3 &n);

// max_wave_speed for a unit normal, from a prepared node.
double max_wave_speed_prepared(const PreparedState &q, const GasModel &gas,
                               const Vec3 &nhat, double c_h);

// Entropy-stable surface flux: EC flux contracted with the scaled normal n,
// minus local Lax-Friedrichs dissipation lambda/2 * (uP - uM). uM/uP are the
// states on the -xi/+xi side of the face; n points in +xi.
State es_rusanov(const State &uM, const State &uP, const GasModel &gas, double c_h,
                 const Vec3 &n);

// Surface flux used by the schemes: EC flux, optionally with the Rusanov
// dissipation. Arguments are spatially ordered like in es_rusanov.
State surface_flux(const State &uM, const State &uP, const GasModel &gas, double c_h,
                   const Vec3 &n, bool dissipative);

// Two-point non-conservative coupling terms, 1D reference direction dir.
// diamond_{(j,k)} = avg(B_d) phi^MHD_j + avg(psi) phi^GLM_{d,j}
// star_{(j,k)}    = phi^MHD_j B_{d,k} + phi^GLM_{d,j} psi_k
State noncons_diamond(const State &uj, const State &uk, const GasModel &gas, int dir);
State noncons_star(const State &uj, const State &uk, const GasModel &gas, int dir);

enum class MetricVariant { Diamond, Alternative };

// Metric-contracted coupling term between nodes i and m with metric vectors
// Ja_i, Ja_m (contravariant basis scaled by J).
//   Diamond:     1/2 [ (B_i . Ja_i) + (B_m . avg(Ja)) ] phi^MHD_i
//                  + (phi^GLM-vec_i . Ja_i) avg(psi)
//   Alternative: (avg(B) . avg(Ja)) phi^MHD_i + (phi^GLM-vec_i . Ja_i) avg(psi)
// The two differ by 1/4 phi^MHD_i (B_i . (Ja_m - Ja_i)) and coincide for a
// shared metric. The Alternative form has pointwise-zero entropy production
// even when the metric vectors differ.
State metric_noncons(const State &ui, const State &um, const GasModel &gas,
                     const Vec3 &Ja_i, const Vec3 &Ja_m, MetricVariant variant);

// Same coupling term from prepared nodes.
State metric_noncons_prepared(const PreparedState &qi, const PreparedState &qm,
                              const GasModel &gas, const Vec3 &Ja_i, const Vec3 &Ja_m,
                              MetricVariant variant);

// Coupling term on a conforming face where both sides share the scaled normal
// n: equals metric_noncons with Ja_i = Ja_m = n (either variant).
State face_noncons(const State &u, const State &uOther, const GasModel &gas, const Vec3 &n);

// Pointwise entropy production of the EC volume flux pair (i,m) contracted
// with metric vectors, using the given coupling variant:
//   r = jump(w)^T f* + w_m^T Phi_(m,i) - w_i^T Phi_(i,m) - jump(Psi . avg-metric)
// Psi here is the full potential including the c_h part of v^T f (the stored
// entropy_potential plus c_h v9 B.n). For 1D use unit vectors e_d for both
// metrics.
double entropy_production_volume(const State &ui, const State &um, const GasModel &gas,
                                 double c_h, const Vec3 &Ja_i, const Vec3 &Ja_m,
                                 MetricVariant variant);

// Entropy production of the surface flux across a face with shared scaled
// normal n; uM/uP as in es_rusanov. Zero for the EC flux, non-positive for
// the Rusanov flux.
double entropy_production_surface(const State &uM, const State &uP, const GasModel &gas,
                                  double c_h, const Vec3 &n, bool dissipative);

// Numerical entropy flux consistent with the surface flux (oriented in +xi):
//   fS = avg(w)^T fhat + 1/2 w_M^T Phi_(M,P) + 1/2 w_P^T Phi_(P,M) - avg(Psi . n)
double entropy_surface_flux(const State &uM, const State &uP, const GasModel &gas,
                            double c_h, const Vec3 &n, bool dissipative);

}  // namespace mhddg
