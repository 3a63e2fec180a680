#include "mhddg/mesh.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace mhddg {

namespace {

Vec3 cross(const Vec3 &a, const Vec3 &b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

void axpy(double &out, double c, double in) { out += c * in; }
void axpy(Vec3 &out, double c, const Vec3 &in) {
  out[0] += c * in[0];
  out[1] += c * in[1];
  out[2] += c * in[2];
}

// Apply a 1D matrix along dimension d of a rank-3 tensor-product array.
template <typename T>
std::vector<T> tensor_apply(const Matrix &M, const std::vector<T> &in,
                            std::array<int, 3> dims, int d) {
  std::array<int, 3> od = dims;
  od[d] = M.rows;
  std::vector<T> out(static_cast<size_t>(od[0]) * od[1] * od[2], T{});
  for (int k = 0; k < od[2]; ++k)
    for (int j = 0; j < od[1]; ++j)
      for (int i = 0; i < od[0]; ++i) {
        std::array<int, 3> oi{i, j, k};
        T &acc = out[i + static_cast<size_t>(od[0]) * (j + static_cast<size_t>(od[1]) * k)];
        std::array<int, 3> ii = oi;
        for (int c = 0; c < M.cols; ++c) {
          ii[d] = c;
          axpy(acc, M(oi[d], c),
               in[ii[0] + static_cast<size_t>(dims[0]) * (ii[1] + static_cast<size_t>(dims[1]) * ii[2])]);
        }
      }
  return out;
}

template <typename T>
std::vector<T> interp3(const Matrix &M, std::vector<T> f, std::array<int, 3> dims) {
  for (int d = 0; d < 3; ++d) {
    f = tensor_apply(M, f, dims, d);
    dims[d] = M.rows;
  }
  return f;
}

}  // namespace

Vec3 apply_warp(const MappingSpec &s, const Vec3 &p) {
  if (s.alpha == 0.0) return p;
  const double Lx = s.length[0], Ly = s.length[1], Lz = s.length[2];
  const double Lt = s.shift, a = s.alpha;
  const double xi = p[0], eta = p[1], zeta = p[2];
  const double y = eta + a * Lx * std::cos(3.0 * M_PI * (xi / Lx - Lt)) *
                             std::cos(M_PI * (eta / Ly - Lt)) *
                             std::cos(M_PI * (zeta / Lz - Lt));
  const double x = xi + a * Lz * std::cos(M_PI * (xi / Lx - Lt)) *
                            std::sin(4.0 * M_PI * (y / Ly - Lt)) *
                            std::cos(M_PI * (zeta / Lz - Lt));
  const double z = zeta + a * Ly * std::cos(M_PI * (x / Lx - Lt)) *
                              std::cos(2.0 * M_PI * (y / Ly - Lt)) *
                              std::cos(M_PI * (zeta / Lz - Lt));
  return {x, y, z};
}

std::array<int, 2> face_tangents(int d) {
  switch (d) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

int face_node_volume_index(const CurvMesh &mesh, int d, int side, int a, int b) {
  std::array<int, 3> idx;
  idx[d] = side == 0 ? 0 : mesh.N;
  auto t = face_tangents(d);
  idx[t[0]] = a;
  idx[t[1]] = b;
  return mesh.node_index(idx[0], idx[1], idx[2]);
}

CurvMesh build_mesh(const MappingSpec &spec, NodeKind kind, int N, MetricForm form) {
  for (int d = 0; d < 3; ++d)
    if (spec.elems[d] < 1) throw ConfigError("element counts must be >= 1");
  if (spec.alpha < 0.0) throw ConfigError("warp amplitude must be >= 0");
  if (spec.N_geo < 1 || spec.N_geo > N)
    throw ConfigError("geometry degree must satisfy 1 <= N_geo <= N");

  CurvMesh mesh;
  mesh.spec = spec;
  mesh.kind = kind;
  mesh.N = N;
  mesh.Kdim = spec.elems;
  mesh.K = spec.elems[0] * spec.elems[1] * spec.elems[2];
  mesh.dx_min = std::numeric_limits<double>::max();
  for (int d = 0; d < 3; ++d)
    mesh.dx_min = std::min(mesh.dx_min, spec.length[d] / spec.elems[d]);

  const int Ng = spec.N_geo;
  const QuadratureRule grule = build_rule(NodeKind::Lobatto, Ng);
  const QuadratureRule arule = build_rule(NodeKind::Lobatto, N);
  const QuadratureRule srule = build_rule(kind, N);
  const Matrix Ig_a = interp_matrix(grule.x, arule.x);
  const Matrix Ig_s = interp_matrix(grule.x, srule.x);
  const Matrix Ia_s = interp_matrix(arule.x, srule.x);
  const Matrix Dg = diff_matrix(grule.x);
  const Matrix Da = diff_matrix(arule.x);
  const Matrix Vf = interp_matrix(srule.x, {-1.0, 1.0});

  const int np = N + 1;
  const std::array<int, 3> gdims{Ng + 1, Ng + 1, Ng + 1};
  const std::array<int, 3> adims{np, np, np};
  const std::array<int, 3> sdims{np, np, np};
  const int nvol = np * np * np;

  mesh.elem.resize(mesh.K);
  mesh.conn.resize(mesh.K);

  for (int ez = 0; ez < mesh.Kdim[2]; ++ez)
    for (int ey = 0; ey < mesh.Kdim[1]; ++ey)
      for (int ex = 0; ex < mesh.Kdim[0]; ++ex) {
        const int e = ex + mesh.Kdim[0] * (ey + mesh.Kdim[1] * ez);
        ElementGeometry &g = mesh.elem[e];

        // geometry interpolant samples of the warped box map
        const std::array<int, 3> eidx{ex, ey, ez};
        Vec3 lo, h;
        for (int d = 0; d < 3; ++d) {
          h[d] = spec.length[d] / spec.elems[d];
          lo[d] = spec.origin[d] + eidx[d] * h[d];
        }
        std::vector<Vec3> Xg(static_cast<size_t>(gdims[0]) * gdims[1] * gdims[2]);
        for (int c = 0; c <= Ng; ++c)
          for (int b = 0; b <= Ng; ++b)
            for (int a = 0; a <= Ng; ++a) {
              Vec3 p{lo[0] + 0.5 * (grule.x[a] + 1.0) * h[0],
                     lo[1] + 0.5 * (grule.x[b] + 1.0) * h[1],
                     lo[2] + 0.5 * (grule.x[c] + 1.0) * h[2]};
              Xg[a + static_cast<size_t>(gdims[0]) * (b + static_cast<size_t>(gdims[1]) * c)] =
                  apply_warp(spec, p);
            }

        g.xyz = interp3(Ig_s, Xg, gdims);

        // covariant basis a_d at solution nodes, exact for the degree-Ng map
        std::array<std::vector<Vec3>, 3> cov;
        for (int d = 0; d < 3; ++d)
          cov[d] = interp3(Ig_s, tensor_apply(Dg, Xg, gdims, d), gdims);

        g.J.resize(nvol);
        for (int n = 0; n < nvol; ++n) {
          g.J[n] = dot(cov[0][n], cross(cov[1][n], cov[2][n]));
          if (!(g.J[n] > 0.0))
            throw MeshError("non-positive Jacobian in element " + std::to_string(e));
        }

        if (form == MetricForm::CrossProduct) {
          for (int d = 0; d < 3; ++d) g.Ja[d].resize(nvol);
          for (int n = 0; n < nvol; ++n) {
            g.Ja[0][n] = cross(cov[1][n], cov[2][n]);
            g.Ja[1][n] = cross(cov[2][n], cov[0][n]);
            g.Ja[2][n] = cross(cov[0][n], cov[1][n]);
          }
        } else {
          // discrete curl on the auxiliary Lobatto grid of degree N:
          // (Ja^i)_n = -[curl of x_l grad(x_m)]_i with (n,m,l) cyclic
          std::vector<Vec3> Xa = interp3(Ig_a, Xg, gdims);
          std::array<std::vector<Vec3>, 3> dXa;
          for (int d = 0; d < 3; ++d) dXa[d] = tensor_apply(Da, Xa, adims, d);
          const size_t na = Xa.size();
          std::array<std::vector<Vec3>, 3> Ja_aux;
          for (int d = 0; d < 3; ++d) Ja_aux[d].assign(na, Vec3{});
          for (int n = 0; n < 3; ++n) {
            const int m = (n + 1) % 3, l = (n + 2) % 3;
            std::array<std::vector<double>, 3> v;
            for (int j = 0; j < 3; ++j) {
              v[j].resize(na);
              for (size_t q = 0; q < na; ++q) v[j][q] = Xa[q][l] * dXa[j][q][m];
            }
            const std::vector<double> d1v2 = tensor_apply(Da, v[2], adims, 1);
            const std::vector<double> d2v1 = tensor_apply(Da, v[1], adims, 2);
            const std::vector<double> d2v0 = tensor_apply(Da, v[0], adims, 2);
            const std::vector<double> d0v2 = tensor_apply(Da, v[2], adims, 0);
            const std::vector<double> d0v1 = tensor_apply(Da, v[1], adims, 0);
            const std::vector<double> d1v0 = tensor_apply(Da, v[0], adims, 1);
            for (size_t q = 0; q < na; ++q) {
              Ja_aux[0][q][n] = -(d1v2[q] - d2v1[q]);
              Ja_aux[1][q][n] = -(d2v0[q] - d0v2[q]);
              Ja_aux[2][q][n] = -(d0v1[q] - d1v0[q]);
            }
          }
          // exact transfer: the metric components are degree-N polynomials
          for (int d = 0; d < 3; ++d) g.Ja[d] = interp3(Ia_s, Ja_aux[d], adims);
        }

        // face metrics: interpolate Ja^d to the two faces normal to d
        for (int d = 0; d < 3; ++d) {
          std::vector<Vec3> fa = tensor_apply(Vf, g.Ja[d], sdims, d);
          std::array<int, 3> fdims = sdims;
          fdims[d] = 2;
          auto t = face_tangents(d);
          for (int side = 0; side < 2; ++side) {
            std::vector<Vec3> &dst = g.face_Ja[2 * d + side];
            dst.resize(static_cast<size_t>(np) * np);
            for (int b = 0; b < np; ++b)
              for (int a = 0; a < np; ++a) {
                std::array<int, 3> ii;
                ii[d] = side;
                ii[t[0]] = a;
                ii[t[1]] = b;
                dst[a + static_cast<size_t>(np) * b] =
                    fa[ii[0] + static_cast<size_t>(fdims[0]) * (ii[1] + static_cast<size_t>(fdims[1]) * ii[2])];
              }
          }
        }

        // connectivity with periodic wrap
        for (int d = 0; d < 3; ++d)
          for (int side = 0; side < 2; ++side) {
            std::array<int, 3> nb = eidx;
            nb[d] += side == 0 ? -1 : 1;
            FaceConn fc;
            if (nb[d] < 0 || nb[d] >= mesh.Kdim[d]) {
              if (spec.periodic[d]) {
                nb[d] = (nb[d] + mesh.Kdim[d]) % mesh.Kdim[d];
                fc.neighbor = nb[0] + mesh.Kdim[0] * (nb[1] + mesh.Kdim[1] * nb[2]);
              } else {
                fc.wall = true;
              }
            } else {
              fc.neighbor = nb[0] + mesh.Kdim[0] * (nb[1] + mesh.Kdim[1] * nb[2]);
            }
            mesh.conn[e][2 * d + side] = fc;
          }
      }
  return mesh;
}

double check_metric_identities(const CurvMesh &mesh) {
  const Matrix D = diff_matrix(build_rule(mesh.kind, mesh.N).x);
  const int np = mesh.np();
  const std::array<int, 3> dims{np, np, np};
  double defect = 0.0;
  for (const ElementGeometry &g : mesh.elem) {
    for (int n = 0; n < 3; ++n) {
      std::vector<double> div(g.J.size(), 0.0);
      for (int d = 0; d < 3; ++d) {
        std::vector<double> comp(g.J.size());
        for (size_t q = 0; q < comp.size(); ++q) comp[q] = g.Ja[d][q][n];
        std::vector<double> dd = tensor_apply(D, comp, dims, d);
        for (size_t q = 0; q < div.size(); ++q) div[q] += dd[q];
      }
      for (double v : div) defect = std::max(defect, std::abs(v));
    }
  }
  return defect;
}

double max_face_metric_mismatch(const CurvMesh &mesh) {
  double mismatch = 0.0;
  for (int e = 0; e < mesh.K; ++e)
    for (int d = 0; d < 3; ++d) {
      const FaceConn &fc = mesh.conn[e][2 * d + 1];
      if (fc.neighbor < 0) continue;
      const auto &own = mesh.elem[e].face_Ja[2 * d + 1];
      const auto &other = mesh.elem[fc.neighbor].face_Ja[2 * d + 0];
      for (size_t q = 0; q < own.size(); ++q)
        for (int n = 0; n < 3; ++n)
          mismatch = std::max(mismatch, std::abs(own[q][n] - other[q][n]));
    }
  return mismatch;
}

void write_mesh_summary_csv(const CurvMesh &mesh, std::ostream &out) {
  double jmin = std::numeric_limits<double>::max(), jmax = 0.0;
  for (const ElementGeometry &g : mesh.elem)
    for (double j : g.J) {
      jmin = std::min(jmin, j);
      jmax = std::max(jmax, j);
    }
  out << "elements,nodes_per_element,J_min,J_max,metric_identity_defect\n";
  out << mesh.K << ',' << mesh.nodes_per_elem() << ',' << jmin << ',' << jmax << ','
      << check_metric_identities(mesh) << '\n';
}

}  // namespace mhddg
