#pragma once

#include <iosfwd>

#include "mhddg/operators.hpp"

namespace mhddg {

// Structured box partition plus the trigonometric warp applied on top of it.
struct MappingSpec {
  int N_geo = 2;                           // geometry interpolant degree
  double alpha = 0.0;                      // warp amplitude; 0 = Cartesian
  Vec3 origin{-1.0, -1.0, -1.0};           // lower corner of the box
  Vec3 length{2.0, 2.0, 2.0};              // L_x, L_y, L_z (warp periods)
  double shift = 0.0;                      // phase shift in the warp map
  std::array<int, 3> elems{1, 1, 1};       // elements per direction
  std::array<bool, 3> periodic{true, true, true};  // non-periodic => wall
};

// Warp map applied line by line: y first, then x with the new y, then z with
// the new x and y. alpha = 0 is the identity.
Vec3 apply_warp(const MappingSpec &spec, const Vec3 &p);

enum class MetricForm {
  Curl,          // discrete-curl construction; identities hold to round-off
  CrossProduct,  // pointwise analytic cross products; negative control
};

struct FaceConn {
  int neighbor = -1;  // element id across the face; -1 for a wall
  bool wall = false;
};

struct ElementGeometry {
  std::vector<Vec3> xyz;                    // (N+1)^3 solution-node coords
  std::vector<double> J;                    // Jacobian determinant per node
  std::array<std::vector<Vec3>, 3> Ja;      // contravariant vectors J a^d
  std::array<std::vector<Vec3>, 6> face_Ja; // face f = 2d+side: Ja^d at the
                                            // (N+1)^2 face nodes, +xi^d oriented
};

struct CurvMesh {
  MappingSpec spec;
  NodeKind kind;
  int N = 0;
  std::array<int, 3> Kdim{1, 1, 1};
  int K = 1;  // total elements, id = ex + Kx*(ey + Ky*ez)
  std::vector<ElementGeometry> elem;
  std::vector<std::array<FaceConn, 6>> conn;  // per element, face 2d+side
  double dx_min = 0.0;  // smallest box-partition extent (pre-warp)

  int np() const { return N + 1; }
  int nodes_per_elem() const { return np() * np() * np(); }
  int node_index(int i, int j, int k) const { return i + np() * (j + np() * k); }
};

CurvMesh build_mesh(const MappingSpec &spec, NodeKind kind, int N,
                    MetricForm form = MetricForm::Curl);

// Max over elements/nodes/components of |sum_d D_d (Ja^d)_n|.
double check_metric_identities(const CurvMesh &mesh);

// Max disagreement of the shared face metric between conforming neighbors.
double max_face_metric_mismatch(const CurvMesh &mesh);

// Face-node index helpers: on a face normal to direction d the two tangential
// directions, in increasing order, index the face as q = a + (N+1)*b.
std::array<int, 2> face_tangents(int d);
int face_node_volume_index(const CurvMesh &mesh, int d, int side, int a, int b);

// element count, J range, identity defect as a one-row CSV with header
void write_mesh_summary_csv(const CurvMesh &mesh, std::ostream &out);

}  // namespace mhddg
