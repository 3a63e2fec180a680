#pragma once

#include <functional>
#include <iosfwd>

#include "mhddg/fluxes.hpp"
#include "mhddg/mesh.hpp"

namespace mhddg {

enum class SchemeKind { Gauss, Lgl, NaiveGauss, Hybridized1d };

struct SchemeConfig {
  NodeKind nodes = NodeKind::Gauss;
  int N = 3;
  SchemeKind scheme = SchemeKind::Gauss;
  bool es_surface = false;  // false: EC surface flux, true: Rusanov dissipation
  MetricVariant noncons = MetricVariant::Diamond;
  GasModel gas;
  double c_h = 0.0;
};

// Discrete solution: per-element tensor-product array of states.
// 1D: npe = N+1 nodes per element; 3D: npe = (N+1)^3 with n = i+(N+1)(j+(N+1)k).
struct Field {
  int K = 0;
  int npe = 0;
  std::vector<State> data;

  Field() = default;
  Field(int k, int n) : K(k), npe(n), data(static_cast<size_t>(k) * n, State{}) {}
  State &at(int e, int n) { return data[static_cast<size_t>(e) * npe + n]; }
  const State &at(int e, int n) const { return data[static_cast<size_t>(e) * npe + n]; }
};

// Uniform periodic 1D mesh; per-element Jacobian dx/2.
struct Mesh1D {
  int K = 1;
  double dx = 2.0;
  double J() const { return 0.5 * dx; }
};

// Entropy-projected boundary states: ut = u(sum_i l_i(+-1) v(u_i)). For LGL
// nodes this reduces to the boundary nodal values.
struct FaceStates1D {
  std::vector<State> uL, uR;  // per element
};
FaceStates1D entropy_project_faces_1d(const Field &field, const SchemeConfig &cfg);

// 3D face-state table; face f = 2d+side, (N+1)^2 states per face.
struct FaceTable {
  std::vector<std::array<std::vector<State>, 6>> u;
};
FaceTable entropy_project_faces_3d(const Field &field, const CurvMesh &mesh,
                                   const SchemeConfig &cfg, int threads);

// Mirror ghost state for a perfectly conducting slip wall: normal velocity
// and normal magnetic field negated, everything else copied.
State wall_ghost(const State &u, const GasModel &gas, const Vec3 &nhat);

// Semi-discrete residuals. All return du/dt directly (the schemes define
// J omega du/dt + terms = 0; the returned value is -terms/(J omega)).
Field residual_gauss_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg);
Field residual_lgl_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg);
Field residual_lgl_bohm_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg);
Field residual_naive_gauss_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg);
Field residual_hybridized_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg);
// Dispatch on cfg.scheme.
Field residual_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg);

// Curvilinear 3D residual (Gauss or LGL nodes; metric-dealiased noncons per
// cfg.noncons). threads <= 1 runs the plain serial loop.
Field residual_3d(const Field &field, const CurvMesh &mesh, const SchemeConfig &cfg,
                  int threads = 1);

// Itemized semi-discrete entropy balance. dSdt = sum omega J v^T du/dt must
// equal surf_flux + surf_prod + vol_prod + proj_prod up to round-off for the
// entropy-consistent schemes; defect is the difference.
struct EntropyReport {
  struct Row {
    double surf_flux = 0, surf_prod = 0, vol_prod = 0, proj_prod = 0;
    double dSdt = 0, defect = 0;
  };
  std::vector<Row> elem;
  Row total;
};

EntropyReport audit_entropy_1d(const Field &field, const Mesh1D &mesh,
                               const SchemeConfig &cfg);
EntropyReport audit_entropy_3d(const Field &field, const CurvMesh &mesh,
                               const SchemeConfig &cfg);

// The closed-form entropy defect of the naive Gauss carryover scheme,
// summed over elements; equals the audit defect of that scheme.
double naive_gauss_defect_formula(const Field &field, const Mesh1D &mesh,
                                  const SchemeConfig &cfg);

void write_entropy_report_csv(const EntropyReport &report, std::ostream &out);

}  // namespace mhddg
