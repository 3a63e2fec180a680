#pragma once

#include "mhddg/core.hpp"

namespace mhddg {

struct GasModel {
  double gamma = 5.0 / 3.0;
  double mu0 = 1.0;
};

struct Primitive {
  double rho;
  Vec3 v;
  double p;
  Vec3 B;
  double psi;
};

double pressure(const State &u, const GasModel &gas);
bool admissible(const State &u, const GasModel &gas);
Primitive cons_to_prim(const State &u, const GasModel &gas);
State prim_to_cons(const Primitive &q, const GasModel &gas);

// Mathematical entropy S = -rho*s/(gamma-1) with s = ln(p rho^-gamma).
double entropy(const State &u, const GasModel &gas);
// Entropy variables v = dS/du.
State entropy_vars(const State &u, const GasModel &gas);
// Closed-form inverse of entropy_vars; requires v[4] < 0.
State entropy_vars_to_state(const State &v, const GasModel &gas);

// Advective flux in coordinate direction dir (0,1,2), GLM terms included.
State flux(const State &u, const GasModel &gas, double c_h, int dir);
inline State flux_1d(const State &u, const GasModel &gas, double c_h) {
  return flux(u, gas, c_h, 0);
}

// Powell term phi^MHD and directional GLM term phi^GLM_dir.
State phi_powell(const State &u, const GasModel &gas);
State phi_glm(const State &u, const GasModel &gas, int dir);
// Non-derivative non-conservative product Phi_dir = phi^MHD B_dir + phi^GLM_dir psi.
State phi_cap(const State &u, const GasModel &gas, int dir);

// Entropy flux potential Psi_dir = v^T f_dir - v_dir S + theta B_dir,
// theta = v^T phi^MHD = 2 beta (v.B). Independent of c_h.
double entropy_potential(const State &u, const GasModel &gas, int dir);
Vec3 entropy_potential_vec(const State &u, const GasModel &gas);

// Fast magnetosonic speed along unit direction n.
double fast_speed(const State &u, const GasModel &gas, const Vec3 &n);
// max(|v.n| + c_f, c_h) for a unit normal n.
double max_wave_speed(const State &u, const GasModel &gas, const Vec3 &n, double c_h);

double jump(double a, double b);
double avg(double a, double b);
// (b-a)/ln(b/a) with a numerically stable near-equal branch.
double log_mean(double a, double b);

}  // namespace mhddg
