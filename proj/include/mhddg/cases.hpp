#pragma once

#include <functional>

#include "mhddg/dgcore.hpp"

namespace mhddg {

// ---- manufactured solution (gamma = 2), periodic unit cube [-1,1]^3 ----
// u = [h, h, h, 0, 2h^2 + h, h/2, -h/4, -h/4, 0], h = 0.5 sin(2pi(x+y+z-t)) + 2
State manufactured_exact(const Vec3 &x, double t);
// Source term that makes the exact solution satisfy the system.
State manufactured_source(const Vec3 &x, double t);
inline GasModel manufactured_gas() { return GasModel{2.0, 1.0}; }

// ---- weak magnetic blast, blend of two primitive states around the origin ----
State blast_ic(const Vec3 &x, const GasModel &gas);

// ---- magnetized Kelvin-Helmholtz shear layer (gamma = 5/3) ----
State khi_ic(const Vec3 &x, const GasModel &gas);

// ---- linear wave eigenmodes on a periodic box ----
enum class WaveFamily { Fast, Alfven, Slow, Contact };

struct WaveSetup {
  GasModel gas;
  State base;        // uniform background (conserved)
  State eigvec;      // unit right eigenvector of the directional Jacobian
  double speed = 0;  // associated eigenvalue
  Vec3 kvec{};       // wavevector, commensurate with the box
  double amplitude = 1e-6;

  double period() const { return 2.0 * M_PI / (norm(kvec) * std::abs(speed)); }
};

// Quasilinear directional Jacobian d(f.n)/du plus the Powell/GLM
// non-conservative contributions, by central finite differences.
Matrix wave_jacobian(const State &u, const GasModel &gas, double c_h, const Vec3 &nhat);

// Background rho=1, p=3/5, v=0, B=(1,sqrt2,1/2); direction along the diagonal
// of the box [0,L1]x[0,L2]x[0,L3] (wavevector chosen commensurate with the
// box). Throws ConfigError if the requested eigenvalue is not well separated.
WaveSetup build_wave(WaveFamily family, const Vec3 &box_length, const GasModel &gas,
                     double c_h, double amplitude);

// u0 + A * R * sin(k.x - speed*|k|*t)
State wave_state(const WaveSetup &w, const Vec3 &x, double t);

// ---- field construction and diagnostics ----
Field sample_ic(const CurvMesh &mesh, const std::function<State(const Vec3 &)> &ic);

// Quadrature-weighted, volume-normalized L2 error per variable.
std::array<double, kNumVars> error_l2(const Field &field, const CurvMesh &mesh,
                                      const std::function<State(const Vec3 &)> &exact);
// max over variables of the normalized L1 errors
double error_l1_max(const Field &field, const CurvMesh &mesh,
                    const std::function<State(const Vec3 &)> &exact);

// Mean convergence rate over the last up-to-three refinements;
// rate_l = ln(e_{l-1}/e_l) / ln(h_{l-1}/h_l).
double eoc_mean(const std::vector<double> &h, const std::vector<double> &err);

// Total mathematical entropy integral, compensated summation.
double total_entropy(const Field &field, const CurvMesh &mesh, const GasModel &gas);

struct KhiDiagnostics {
  double bp2_integral = 0;  // integral of B1^2 + B2^2 (un-normalized)
  double dv_y = 0;          // (max v2 - min v2) / 2
  double rho_min = 0;
  double p_min = 0;
};
KhiDiagnostics khi_diagnostics(const Field &field, const CurvMesh &mesh,
                               const GasModel &gas);

}  // namespace mhddg
