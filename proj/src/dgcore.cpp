#include "mhddg/dgcore.hpp"

#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mhddg {

namespace {

constexpr Vec3 kEx{1.0, 0.0, 0.0};

// Two-point volume term f* + diamond for the 1D reference direction.
State gamma_1d(const State &a, const State &b, const SchemeConfig &cfg) {
  return ec_flux(a, b, cfg.gas, cfg.c_h, 0) + noncons_diamond(a, b, cfg.gas, 0);
}

// f* + star coupling (the naive carryover keeps the star form everywhere).
State gamma_star_1d(const State &a, const State &b, const SchemeConfig &cfg) {
  return ec_flux(a, b, cfg.gas, cfg.c_h, 0) + noncons_star(a, b, cfg.gas, 0);
}

double side_basis(const OperatorSet &ops, int j, int side) {
  return side == 0 ? ops.lL(j) : ops.lR(j);
}

int line_index(const CurvMesh &mesh, int d, int m, int a, int b) {
  const auto t = face_tangents(d);
  std::array<int, 3> c;
  c[d] = m;
  c[t[0]] = a;
  c[t[1]] = b;
  return mesh.node_index(c[0], c[1], c[2]);
}

// Face states of the element across face f, with walls mirrored.
const State outer_face_state(const CurvMesh &mesh, const FaceTable &ft,
                             std::vector<State> &ghost_scratch, int e, int f, int q,
                             const GasModel &gas) {
  const FaceConn &fc = mesh.conn[e][f];
  if (fc.wall) {
    const Vec3 &n = mesh.elem[e].face_Ja[f][q];
    return wall_ghost(ft.u[e][f][q], gas, (1.0 / norm(n)) * n);
  }
  (void)ghost_scratch;
  const int fo = (f ^ 1);  // opposite side, same direction
  return ft.u[fc.neighbor][fo][q];
}

void element_residual_3d(int e, const Field &field, const CurvMesh &mesh,
                         const FaceTable &ft, const SchemeConfig &cfg,
                         const OperatorSet &ops, Field &dudt) {
  const int np = cfg.N + 1;
  const int npe = mesh.nodes_per_elem();
  const int nfp = np * np;
  const ElementGeometry &g = mesh.elem[e];
  const GasModel &gas = cfg.gas;

  std::vector<State> acc(npe, State{});

  // per-node preparation amortizes the primitive recovery over all the
  // two-point evaluations the node participates in
  std::vector<PreparedState> P(npe);
  for (int n = 0; n < npe; ++n) P[n] = prepare_state(field.at(e, n), gas);
  std::array<std::vector<PreparedState>, 6> Pt, Po;
  for (int f = 0; f < 6; ++f) {
    Pt[f].resize(nfp);
    Po[f].resize(nfp);
    const FaceConn &fc = mesh.conn[e][f];
    for (int q = 0; q < nfp; ++q) {
      Pt[f][q] = prepare_state(ft.u[e][f][q], gas);
      if (fc.wall) {
        const Vec3 &n = g.face_Ja[f][q];
        Po[f][q] = prepare_state(wall_ghost(ft.u[e][f][q], gas, (1.0 / norm(n)) * n), gas);
      } else {
        Po[f][q] = prepare_state(ft.u[fc.neighbor][f ^ 1][q], gas);
      }
    }
  }

  std::vector<int> lidx(np);
  std::vector<State> Gout(np);
  for (int d = 0; d < 3; ++d) {
    for (int b = 0; b < np; ++b) {
      for (int a = 0; a < np; ++a) {
        const double wperp = ops.rule.w[a] * ops.rule.w[b];
        for (int m = 0; m < np; ++m) lidx[m] = line_index(mesh, d, m, a, b);

        // volume two-point coupling along the line
        for (int i = 0; i < np; ++i) {
          for (int m = i + 1; m < np; ++m) {
            const double s = wperp * ops.Shat(i, m);
            if (s == 0.0) continue;
            const PreparedState &qi = P[lidx[i]];
            const PreparedState &qm = P[lidx[m]];
            const Vec3 &Jai = g.Ja[d][lidx[i]];
            const Vec3 &Jam = g.Ja[d][lidx[m]];
            const State fst = ec_flux_prepared(qi, qm, gas, cfg.c_h, 0.5 * (Jai + Jam));
            acc[lidx[i]] +=
                s * (fst + metric_noncons_prepared(qi, qm, gas, Jai, Jam, cfg.noncons));
            acc[lidx[m]] -=
                s * (fst + metric_noncons_prepared(qm, qi, gas, Jam, Jai, cfg.noncons));
          }
        }

        // boundary correction + surface coupling, one face node per side
        for (int side = 0; side < 2; ++side) {
          const int f = 2 * d + side;
          const int q = a + np * b;
          const PreparedState &qt = Pt[f][q];
          const PreparedState &qo = Po[f][q];
          const Vec3 &n = g.face_Ja[f][q];

          State fhat = ec_flux_prepared(qt, qo, gas, cfg.c_h, n);
          if (cfg.es_surface) {
            const double len = norm(n);
            const Vec3 nhat = (1.0 / len) * n;
            const double lam = len * std::max(max_wave_speed_prepared(qt, gas, nhat, cfg.c_h),
                                              max_wave_speed_prepared(qo, gas, nhat, cfg.c_h));
            // dissipation acts on the jump from the -xi to the +xi side
            const double sgn = (side == 0) ? 1.0 : -1.0;
            fhat -= (0.5 * lam * sgn) * (qt.u - qo.u);
          }
          const State Ghat =
              fhat + metric_noncons_prepared(qt, qo, gas, n, n, MetricVariant::Diamond);

          // the EC flux is symmetric, so the pair (u_m, face state) shares
          // one flux evaluation between the inner sum and the i-correction
          State inner{};
          for (int m = 0; m < np; ++m) {
            const double lm = side_basis(ops, m, side);
            if (lm == 0.0) continue;  // l_m(+-1) weights both uses of the pair
            const PreparedState &qm = P[lidx[m]];
            const Vec3 &Jam = g.Ja[d][lidx[m]];
            const State fst = ec_flux_prepared(qt, qm, gas, cfg.c_h, 0.5 * (n + Jam));
            inner += lm * (fst + metric_noncons_prepared(qt, qm, gas, n, Jam, cfg.noncons));
            Gout[m] = fst + metric_noncons_prepared(qm, qt, gas, Jam, n, cfg.noncons);
          }

          for (int i = 0; i < np; ++i) {
            const double li = side_basis(ops, i, side);
            if (li == 0.0) continue;
            const State term = Gout[i] - inner + Ghat;
            if (side == 0)
              acc[lidx[i]] -= (wperp * li) * term;
            else
              acc[lidx[i]] += (wperp * li) * term;
          }
        }
      }
    }
  }

  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i) {
        const int n = mesh.node_index(i, j, k);
        const double wJ = ops.rule.w[i] * ops.rule.w[j] * ops.rule.w[k] * g.J[n];
        dudt.at(e, n) = (-1.0 / wJ) * acc[n];
      }
}

// Run fn(e) over all elements, optionally with OpenMP; exceptions from worker
// iterations are captured and rethrown on the calling thread.
template <typename Fn>
void for_each_element(int K, int threads, Fn &&fn) {
#ifdef _OPENMP
  if (threads > 1) {
    std::exception_ptr err;
    std::mutex err_mutex;
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int e = 0; e < K; ++e) {
      try {
        fn(e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)threads;
#endif
  for (int e = 0; e < K; ++e) fn(e);
}

}  // namespace

FaceStates1D entropy_project_faces_1d(const Field &field, const SchemeConfig &cfg) {
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  FaceStates1D fs;
  fs.uL.resize(field.K);
  fs.uR.resize(field.K);
  for (int e = 0; e < field.K; ++e) {
    State wL{}, wR{};
    for (int j = 0; j < np; ++j) {
      const State w = entropy_vars(field.at(e, j), cfg.gas);
      wL += ops.lL(j) * w;
      wR += ops.lR(j) * w;
    }
    fs.uL[e] = entropy_vars_to_state(wL, cfg.gas);
    fs.uR[e] = entropy_vars_to_state(wR, cfg.gas);
  }
  return fs;
}

FaceTable entropy_project_faces_3d(const Field &field, const CurvMesh &mesh,
                                   const SchemeConfig &cfg, int threads) {
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const int nfp = np * np;
  FaceTable ft;
  ft.u.resize(mesh.K);
  for (int e = 0; e < mesh.K; ++e)
    for (int f = 0; f < 6; ++f) ft.u[e][f].resize(nfp);

  for_each_element(mesh.K, threads, [&](int e) {
    std::vector<State> w(mesh.nodes_per_elem());
    for (int n = 0; n < mesh.nodes_per_elem(); ++n)
      w[n] = entropy_vars(field.at(e, n), cfg.gas);
    for (int d = 0; d < 3; ++d)
      for (int side = 0; side < 2; ++side)
        for (int b = 0; b < np; ++b)
          for (int a = 0; a < np; ++a) {
            State wf{};
            for (int m = 0; m < np; ++m)
              wf += side_basis(ops, m, side) * w[line_index(mesh, d, m, a, b)];
            ft.u[e][2 * d + side][a + np * b] = entropy_vars_to_state(wf, cfg.gas);
          }
  });
  return ft;
}

State wall_ghost(const State &u, const GasModel &gas, const Vec3 &nhat) {
  Primitive q = cons_to_prim(u, gas);
  q.v = q.v - (2.0 * dot(q.v, nhat)) * nhat;
  q.B = q.B - (2.0 * dot(q.B, nhat)) * nhat;
  return prim_to_cons(q, gas);
}

Field residual_gauss_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg) {
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const FaceStates1D fs = entropy_project_faces_1d(field, cfg);
  Field dudt(field.K, np);
  const double J = mesh.J();

  for (int e = 0; e < field.K; ++e) {
    const int eL = (e + field.K - 1) % field.K;
    const int eR = (e + 1) % field.K;
    const State &utL = fs.uL[e], &utR = fs.uR[e];
    const State &uoL = fs.uR[eL], &uoR = fs.uL[eR];

    const State GhatL = surface_flux(uoL, utL, cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        face_noncons(utL, uoL, cfg.gas, kEx);
    const State GhatR = surface_flux(utR, uoR, cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        face_noncons(utR, uoR, cfg.gas, kEx);

    State innerL{}, innerR{};
    for (int k = 0; k < np; ++k) {
      innerL += ops.lL(k) * gamma_1d(utL, field.at(e, k), cfg);
      innerR += ops.lR(k) * gamma_1d(utR, field.at(e, k), cfg);
    }

    for (int j = 0; j < np; ++j) {
      State acc{};
      for (int k = 0; k < np; ++k) {
        if (k == j) continue;
        acc += ops.Shat(j, k) * gamma_1d(field.at(e, j), field.at(e, k), cfg);
      }
      acc -= ops.lL(j) * (gamma_1d(field.at(e, j), utL, cfg) - innerL + GhatL);
      acc += ops.lR(j) * (gamma_1d(field.at(e, j), utR, cfg) - innerR + GhatR);
      dudt.at(e, j) = (-1.0 / (J * ops.rule.w[j])) * acc;
    }
  }
  return dudt;
}

Field residual_lgl_bohm_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg) {
  if (cfg.nodes != NodeKind::Lobatto)
    throw ConfigError("Bohm-form residual requires Lobatto nodes");
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const int N = cfg.N;
  Field dudt(field.K, np);
  const double J = mesh.J();

  for (int e = 0; e < field.K; ++e) {
    const int eL = (e + field.K - 1) % field.K;
    const int eR = (e + 1) % field.K;
    const State &u0 = field.at(e, 0), &uN = field.at(e, N);
    const State &uoL = field.at(eL, N), &uoR = field.at(eR, 0);

    const State fhatL = surface_flux(uoL, u0, cfg.gas, cfg.c_h, kEx, cfg.es_surface);
    const State fhatR = surface_flux(uN, uoR, cfg.gas, cfg.c_h, kEx, cfg.es_surface);

    for (int j = 0; j < np; ++j) {
      State acc{};
      for (int k = 0; k < np; ++k) {
        const double q = ops.Q(j, k);
        if (q == 0.0) continue;
        acc += (2.0 * q) * ec_flux(field.at(e, j), field.at(e, k), cfg.gas, cfg.c_h, 0);
        acc += q * noncons_star(field.at(e, j), field.at(e, k), cfg.gas, 0);
      }
      if (j == 0) {
        acc += flux(u0, cfg.gas, cfg.c_h, 0) - fhatL;
        acc += phi_cap(u0, cfg.gas, 0) - noncons_diamond(u0, uoL, cfg.gas, 0);
      }
      if (j == N) {
        acc -= flux(uN, cfg.gas, cfg.c_h, 0) - fhatR;
        acc -= phi_cap(uN, cfg.gas, 0) - noncons_diamond(uN, uoR, cfg.gas, 0);
      }
      dudt.at(e, j) = (-1.0 / (J * ops.rule.w[j])) * acc;
    }
  }
  return dudt;
}

Field residual_lgl_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg) {
  if (cfg.nodes != NodeKind::Lobatto)
    throw ConfigError("collocated residual requires Lobatto nodes");
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const int N = cfg.N;
  Field dudt(field.K, np);
  const double J = mesh.J();

  for (int e = 0; e < field.K; ++e) {
    const int eL = (e + field.K - 1) % field.K;
    const int eR = (e + 1) % field.K;
    const State &u0 = field.at(e, 0), &uN = field.at(e, N);
    const State &uoL = field.at(eL, N), &uoR = field.at(eR, 0);

    const State GhatL = surface_flux(uoL, u0, cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        noncons_diamond(u0, uoL, cfg.gas, 0);
    const State GhatR = surface_flux(uN, uoR, cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        noncons_diamond(uN, uoR, cfg.gas, 0);

    for (int j = 0; j < np; ++j) {
      State acc{};
      for (int k = 0; k < np; ++k) {
        if (k == j) continue;
        acc += ops.Shat(j, k) * gamma_1d(field.at(e, j), field.at(e, k), cfg);
      }
      if (j == 0) acc -= GhatL;
      if (j == N) acc += GhatR;
      dudt.at(e, j) = (-1.0 / (J * ops.rule.w[j])) * acc;
    }
  }
  return dudt;
}

Field residual_naive_gauss_1d(const Field &field, const Mesh1D &mesh,
                              const SchemeConfig &cfg) {
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const FaceStates1D fs = entropy_project_faces_1d(field, cfg);
  Field dudt(field.K, np);
  const double J = mesh.J();

  for (int e = 0; e < field.K; ++e) {
    const int eL = (e + field.K - 1) % field.K;
    const int eR = (e + 1) % field.K;
    const State &utL = fs.uL[e], &utR = fs.uR[e];
    const State &uoL = fs.uR[eL], &uoR = fs.uL[eR];

    // surface coupling keeps the entropy-consistent diamond form
    const State GhatL = surface_flux(uoL, utL, cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        face_noncons(utL, uoL, cfg.gas, kEx);
    const State GhatR = surface_flux(utR, uoR, cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        face_noncons(utR, uoR, cfg.gas, kEx);

    State innerL{}, innerR{};
    for (int k = 0; k < np; ++k) {
      innerL += ops.lL(k) * gamma_star_1d(utL, field.at(e, k), cfg);
      innerR += ops.lR(k) * gamma_star_1d(utR, field.at(e, k), cfg);
    }

    for (int j = 0; j < np; ++j) {
      State acc{};
      for (int k = 0; k < np; ++k) {
        if (k != j)
          acc += ops.Shat(j, k) * ec_flux(field.at(e, j), field.at(e, k), cfg.gas, cfg.c_h, 0);
        const double qb = ops.Q(j, k) - ops.Bhat(j, k);
        if (qb != 0.0)
          acc += qb * noncons_star(field.at(e, j), field.at(e, k), cfg.gas, 0);
      }
      acc -= ops.lL(j) * (gamma_star_1d(field.at(e, j), utL, cfg) - innerL + GhatL);
      acc += ops.lR(j) * (gamma_star_1d(field.at(e, j), utR, cfg) - innerR + GhatR);
      dudt.at(e, j) = (-1.0 / (J * ops.rule.w[j])) * acc;
    }
  }
  return dudt;
}

Field residual_hybridized_1d(const Field &field, const Mesh1D &mesh,
                             const SchemeConfig &cfg) {
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const HybridizedOperators hops = build_hybridized(ops);
  const int np = cfg.N + 1;
  const int nh = np + 2;
  const FaceStates1D fs = entropy_project_faces_1d(field, cfg);
  Field dudt(field.K, np);
  const double J = mesh.J();

  for (int e = 0; e < field.K; ++e) {
    const int eL = (e + field.K - 1) % field.K;
    const int eR = (e + 1) % field.K;

    std::vector<State> Uh(nh);
    for (int j = 0; j < np; ++j) Uh[j] = field.at(e, j);
    Uh[np] = fs.uL[e];
    Uh[np + 1] = fs.uR[e];

    const State &uoL = fs.uR[eL], &uoR = fs.uL[eR];
    const State GhatL = surface_flux(uoL, Uh[np], cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        face_noncons(Uh[np], uoL, cfg.gas, kEx);
    const State GhatR = surface_flux(Uh[np + 1], uoR, cfg.gas, cfg.c_h, kEx, cfg.es_surface) +
                        face_noncons(Uh[np + 1], uoR, cfg.gas, kEx);

    std::vector<State> rh(nh, State{});
    for (int j = 0; j < nh; ++j)
      for (int k = 0; k < nh; ++k) {
        if (k == j) continue;
        const double s = hops.Sh(j, k);
        if (s == 0.0) continue;
        rh[j] += s * gamma_1d(Uh[j], Uh[k], cfg);
      }

    for (int j = 0; j < np; ++j) {
      State acc{};
      for (int r = 0; r < nh; ++r) {
        const double v = hops.Vh(r, j);
        if (v != 0.0) acc += v * rh[r];
      }
      acc -= ops.lL(j) * GhatL;
      acc += ops.lR(j) * GhatR;
      dudt.at(e, j) = (-1.0 / (J * ops.rule.w[j])) * acc;
    }
  }
  return dudt;
}

Field residual_1d(const Field &field, const Mesh1D &mesh, const SchemeConfig &cfg) {
  switch (cfg.scheme) {
    case SchemeKind::Gauss:
      return residual_gauss_1d(field, mesh, cfg);
    case SchemeKind::Lgl:
      return residual_lgl_1d(field, mesh, cfg);
    case SchemeKind::NaiveGauss:
      return residual_naive_gauss_1d(field, mesh, cfg);
    case SchemeKind::Hybridized1d:
      return residual_hybridized_1d(field, mesh, cfg);
  }
  throw ConfigError("unknown scheme");
}

Field residual_3d(const Field &field, const CurvMesh &mesh, const SchemeConfig &cfg,
                  int threads) {
  if (mesh.N != cfg.N || mesh.kind != cfg.nodes)
    throw ConfigError("mesh operators do not match the scheme configuration");
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const FaceTable ft = entropy_project_faces_3d(field, mesh, cfg, threads);
  Field dudt(mesh.K, mesh.nodes_per_elem());
  for_each_element(mesh.K, threads,
                   [&](int e) { element_residual_3d(e, field, mesh, ft, cfg, ops, dudt); });
  return dudt;
}

namespace {

double production_1d(const State &a, const State &b, const SchemeConfig &cfg) {
  return entropy_production_volume(a, b, cfg.gas, cfg.c_h, kEx, kEx,
                                   MetricVariant::Diamond);
}

void finish_total(EntropyReport &rep) {
  for (const auto &row : rep.elem) {
    rep.total.surf_flux += row.surf_flux;
    rep.total.surf_prod += row.surf_prod;
    rep.total.vol_prod += row.vol_prod;
    rep.total.proj_prod += row.proj_prod;
    rep.total.dSdt += row.dSdt;
  }
  rep.total.defect = rep.total.dSdt - (rep.total.surf_flux + rep.total.surf_prod +
                                       rep.total.vol_prod + rep.total.proj_prod);
}

}  // namespace

EntropyReport audit_entropy_1d(const Field &field, const Mesh1D &mesh,
                               const SchemeConfig &cfg) {
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const double J = mesh.J();
  const Field dudt = residual_1d(field, mesh, cfg);

  // collocated LGL schemes couple through the boundary nodal values; the
  // generalized schemes through the entropy-projected face states
  const bool nodal_faces = (cfg.scheme == SchemeKind::Lgl);
  FaceStates1D fs;
  if (nodal_faces) {
    fs.uL.resize(field.K);
    fs.uR.resize(field.K);
    for (int e = 0; e < field.K; ++e) {
      fs.uL[e] = field.at(e, 0);
      fs.uR[e] = field.at(e, cfg.N);
    }
  } else {
    fs = entropy_project_faces_1d(field, cfg);
  }

  EntropyReport rep;
  rep.elem.resize(field.K);
  for (int e = 0; e < field.K; ++e) {
    const int eL = (e + field.K - 1) % field.K;
    const int eR = (e + 1) % field.K;
    const State &uoL = fs.uR[eL], &uoR = fs.uL[eR];
    EntropyReport::Row &row = rep.elem[e];

    for (int j = 0; j < np; ++j)
      row.dSdt += ops.rule.w[j] * J * dot(entropy_vars(field.at(e, j), cfg.gas),
                                          dudt.at(e, j));

    row.surf_flux =
        entropy_surface_flux(uoL, fs.uL[e], cfg.gas, cfg.c_h, kEx, cfg.es_surface) -
        entropy_surface_flux(fs.uR[e], uoR, cfg.gas, cfg.c_h, kEx, cfg.es_surface);
    row.surf_prod =
        0.5 * entropy_production_surface(uoL, fs.uL[e], cfg.gas, cfg.c_h, kEx,
                                         cfg.es_surface) +
        0.5 * entropy_production_surface(fs.uR[e], uoR, cfg.gas, cfg.c_h, kEx,
                                         cfg.es_surface);

    for (int j = 0; j < np; ++j)
      for (int k = j + 1; k < np; ++k)
        row.vol_prod +=
            ops.Shat(j, k) * production_1d(field.at(e, j), field.at(e, k), cfg);

    if (!nodal_faces) {
      for (int j = 0; j < np; ++j) {
        row.proj_prod += ops.lR(j) * production_1d(field.at(e, j), fs.uR[e], cfg);
        row.proj_prod -= ops.lL(j) * production_1d(field.at(e, j), fs.uL[e], cfg);
      }
    }
    row.defect =
        row.dSdt - (row.surf_flux + row.surf_prod + row.vol_prod + row.proj_prod);
  }
  finish_total(rep);
  return rep;
}

EntropyReport audit_entropy_3d(const Field &field, const CurvMesh &mesh,
                               const SchemeConfig &cfg) {
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const Field dudt = residual_3d(field, mesh, cfg, 1);
  const FaceTable ft = entropy_project_faces_3d(field, mesh, cfg, 1);

  EntropyReport rep;
  rep.elem.resize(mesh.K);
  std::vector<State> ghost;
  for (int e = 0; e < mesh.K; ++e) {
    const ElementGeometry &g = mesh.elem[e];
    EntropyReport::Row &row = rep.elem[e];

    for (int k = 0; k < np; ++k)
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) {
          const int n = mesh.node_index(i, j, k);
          const double wJ = ops.rule.w[i] * ops.rule.w[j] * ops.rule.w[k] * g.J[n];
          row.dSdt += wJ * dot(entropy_vars(field.at(e, n), cfg.gas), dudt.at(e, n));
        }

    for (int d = 0; d < 3; ++d) {
      for (int b = 0; b < np; ++b) {
        for (int a = 0; a < np; ++a) {
          const double wperp = ops.rule.w[a] * ops.rule.w[b];
          std::vector<int> lidx(np);
          for (int m = 0; m < np; ++m) lidx[m] = line_index(mesh, d, m, a, b);

          for (int i = 0; i < np; ++i)
            for (int m = i + 1; m < np; ++m) {
              const double s = ops.Shat(i, m);
              if (s == 0.0) continue;
              row.vol_prod += wperp * s *
                              entropy_production_volume(
                                  field.at(e, lidx[i]), field.at(e, lidx[m]), cfg.gas,
                                  cfg.c_h, g.Ja[d][lidx[i]], g.Ja[d][lidx[m]],
                                  cfg.noncons);
            }

          for (int side = 0; side < 2; ++side) {
            const int f = 2 * d + side;
            const int q = a + np * b;
            const State &ut = ft.u[e][f][q];
            const State uo = outer_face_state(mesh, ft, ghost, e, f, q, cfg.gas);
            const Vec3 &n = g.face_Ja[f][q];
            const double sgn = (side == 0) ? 1.0 : -1.0;

            const double fS =
                (side == 0)
                    ? entropy_surface_flux(uo, ut, cfg.gas, cfg.c_h, n, cfg.es_surface)
                    : entropy_surface_flux(ut, uo, cfg.gas, cfg.c_h, n, cfg.es_surface);
            const double rhat =
                (side == 0) ? entropy_production_surface(uo, ut, cfg.gas, cfg.c_h, n,
                                                         cfg.es_surface)
                            : entropy_production_surface(ut, uo, cfg.gas, cfg.c_h, n,
                                                         cfg.es_surface);
            row.surf_flux += wperp * sgn * fS;
            row.surf_prod += wperp * 0.5 * rhat;

            for (int m = 0; m < np; ++m) {
              const double lm = side_basis(ops, m, side);
              if (lm == 0.0) continue;
              const double rp = entropy_production_volume(
                  field.at(e, lidx[m]), ut, cfg.gas, cfg.c_h, g.Ja[d][lidx[m]], n,
                  cfg.noncons);
              row.proj_prod -= wperp * sgn * lm * rp;
            }
          }
        }
      }
    }
    row.defect =
        row.dSdt - (row.surf_flux + row.surf_prod + row.vol_prod + row.proj_prod);
  }
  finish_total(rep);
  return rep;
}

double naive_gauss_defect_formula(const Field &field, const Mesh1D &mesh,
                                  const SchemeConfig &cfg) {
  (void)mesh;
  const OperatorSet &ops = get_operators(cfg.nodes, cfg.N);
  const int np = cfg.N + 1;
  const FaceStates1D fs = entropy_project_faces_1d(field, cfg);
  double total = 0.0;
  for (int e = 0; e < field.K; ++e) {
    const State &utL = fs.uL[e], &utR = fs.uR[e];
    const State wtL = entropy_vars(utL, cfg.gas);
    const State wtR = entropy_vars(utR, cfg.gas);
    for (int j = 0; j < np; ++j) {
      const State &uj = field.at(e, j);
      const State wj = entropy_vars(uj, cfg.gas);
      total += ops.lL(j) *
               (dot(wj, noncons_diamond(uj, utL, cfg.gas, 0)) -
                dot(wtL, noncons_diamond(utL, uj, cfg.gas, 0) - phi_cap(utL, cfg.gas, 0)));
      total -= ops.lR(j) *
               (dot(wj, noncons_diamond(uj, utR, cfg.gas, 0)) -
                dot(wtR, noncons_diamond(utR, uj, cfg.gas, 0) - phi_cap(utR, cfg.gas, 0)));
      for (int k = 0; k < np; ++k) {
        const double b = ops.Bhat(j, k);
        if (b != 0.0)
          total += b * dot(wj, noncons_diamond(uj, field.at(e, k), cfg.gas, 0));
      }
    }
  }
  return total;
}

void write_entropy_report_csv(const EntropyReport &report, std::ostream &out) {
  out << "element,surf_flux,surf_prod,vol_prod,proj_prod,dSdt,defect\n";
  out << std::setprecision(17);
  auto put = [&out](const std::string &id, const EntropyReport::Row &r) {
    out << id << ',' << r.surf_flux << ',' << r.surf_prod << ',' << r.vol_prod << ','
        << r.proj_prod << ',' << r.dSdt << ',' << r.defect << '\n';
  };
  for (size_t e = 0; e < report.elem.size(); ++e) put(std::to_string(e), report.elem[e]);
  put("total", report.total);
}

}  // namespace mhddg
