#pragma once

#include <functional>

#include "mhddg/dgcore.hpp"

namespace mhddg {

// Five-stage fourth-order low-storage Runge-Kutta coefficients.
struct LsrkCoeffs {
  static const std::array<double, 5> A;
  static const std::array<double, 5> B;
  static const std::array<double, 5> c;
};

// One low-storage RK step: u <- u(t+dt) using rhs(u, t). reg is the 2N-storage
// register; pass the same (initially empty) Field across steps to reuse it.
void rk_step(Field &u, Field &reg, double t, double dt,
             const std::function<Field(const Field &, double)> &rhs);

// Scalar variant, used to verify the temporal order on an ODE.
void rk_step_scalar(double &y, double &reg, double t, double dt,
                    const std::function<double(double, double)> &rhs);

// Largest |v.n| + c_f over all nodes and the three (unit) contravariant
// directions, evaluated with psi-wave speed zero. Used to pick c_h.
double compute_ch(const Field &field, const CurvMesh &mesh, const GasModel &gas);

// Largest max_wave_speed over nodes/directions for the given c_h.
double max_wave_speed_global(const Field &field, const CurvMesh &mesh,
                             const GasModel &gas, double c_h);

// dt = cfl * dx_min / (lambda * (2N+1))
double compute_dt(double cfl, double dx_min, int N, double lambda);

// Compensated accumulator for long series of small increments.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

}  // namespace mhddg
