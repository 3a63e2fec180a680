#pragma once

#include "mhddg/core.hpp"

namespace mhddg {

enum class NodeKind { Gauss, Lobatto };

struct QuadratureRule {
  NodeKind kind;
  int N;                  // polynomial degree; N+1 nodes
  std::vector<double> x;  // nodes on [-1,1], strictly increasing
  std::vector<double> w;  // positive weights, sum 2
};

// Lagrange basis value l_j(xi) for the rule's node set.
double lagrange_eval(const QuadratureRule &rule, int j, double xi);

// Interpolation matrix from the rule's nodes to arbitrary points.
Matrix interp_matrix(const std::vector<double> &nodes, const std::vector<double> &points);

// Differentiation matrix D_jk = l'_k(x_j) on the given node set.
Matrix diff_matrix(const std::vector<double> &nodes);

struct OperatorSet {
  QuadratureRule rule;
  Matrix D;     // (N+1)x(N+1)
  Matrix Q;     // diag(w) * D
  Matrix Bhat;  // Vf^T B0 Vf
  Matrix Shat;  // 2Q - Bhat, skew-symmetric
  Matrix Vf;    // 2x(N+1): rows l_j(-1), l_j(+1)

  int N() const { return rule.N; }
  double lL(int j) const { return Vf(0, j); }  // l_j(-1)
  double lR(int j) const { return Vf(1, j); }  // l_j(+1)
};

struct HybridizedOperators {
  Matrix Vh;  // (N+3)x(N+1): identity stacked over Vf
  Matrix Qh;  // (N+3)x(N+3)
  Matrix Sh;  // Qh - Qh^T
};

QuadratureRule build_rule(NodeKind kind, int N);
OperatorSet build_operator_set(const QuadratureRule &rule);
HybridizedOperators build_hybridized(const OperatorSet &ops);

// Cached immutable operator sets, shared across threads after first use.
const OperatorSet &get_operators(NodeKind kind, int N);

}  // namespace mhddg
