#include "mhddg/timeint.hpp"

namespace mhddg {

const std::array<double, 5> LsrkCoeffs::A = {
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
};
const std::array<double, 5> LsrkCoeffs::B = {
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
};
const std::array<double, 5> LsrkCoeffs::c = {
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
};

void rk_step(Field &u, Field &reg, double t, double dt,
             const std::function<Field(const Field &, double)> &rhs) {
  const size_t n = u.data.size();
  if (reg.data.size() != n) {
    reg = Field(u.K, u.npe);
  } else {
    for (auto &s : reg.data) s = State{};
  }
  for (int stage = 0; stage < 5; ++stage) {
    const Field r = rhs(u, t + LsrkCoeffs::c[stage] * dt);
    const double a = LsrkCoeffs::A[stage];
    const double b = LsrkCoeffs::B[stage] * dt;
    for (size_t i = 0; i < n; ++i) {
      for (int v = 0; v < kNumVars; ++v) {
        reg.data[i][v] = a * reg.data[i][v] + r.data[i][v];
        u.data[i][v] += b * reg.data[i][v];
      }
    }
  }
}

void rk_step_scalar(double &y, double &reg, double t, double dt,
                    const std::function<double(double, double)> &rhs) {
  reg = 0.0;
  for (int stage = 0; stage < 5; ++stage) {
    reg = LsrkCoeffs::A[stage] * reg + rhs(y, t + LsrkCoeffs::c[stage] * dt);
    y += LsrkCoeffs::B[stage] * dt * reg;
  }
}

double compute_ch(const Field &field, const CurvMesh &mesh, const GasModel &gas) {
  return max_wave_speed_global(field, mesh, gas, 0.0);
}

double max_wave_speed_global(const Field &field, const CurvMesh &mesh,
                             const GasModel &gas, double c_h) {
  double lam = 0.0;
  for (int e = 0; e < mesh.K; ++e) {
    const ElementGeometry &g = mesh.elem[e];
    for (int n = 0; n < mesh.nodes_per_elem(); ++n) {
      for (int d = 0; d < 3; ++d) {
        const Vec3 &Ja = g.Ja[d][n];
        const Vec3 nhat = (1.0 / norm(Ja)) * Ja;
        lam = std::max(lam, max_wave_speed(field.at(e, n), gas, nhat, c_h));
      }
    }
  }
  return lam;
}

double compute_dt(double cfl, double dx_min, int N, double lambda) {
  return cfl * dx_min / (lambda * (2.0 * N + 1.0));
}

}  // namespace mhddg
