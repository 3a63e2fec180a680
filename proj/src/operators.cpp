#include "mhddg/operators.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace mhddg {

namespace {

// Legendre polynomial P_n and derivative at x, by three-term recurrence.
struct LegendreValue {
  double p, dp;
};

LegendreValue legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  double dp0 = 0.0, dp1 = 1.0;
  if (n == 0) return {p0, dp0};
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    double dp2 = dp0 + (2 * k - 1) * p1;
    p0 = p1;
    p1 = p2;
    dp0 = dp1;
    dp1 = dp2;
  }
  return {p1, dp1};
}

// Newton iteration; the Chebyshev-type initial guesses below are close enough
// that the iteration contracts monotonically for every Legendre root.
template <typename F>
double newton(F f, double guess) {
  double x = guess;
  for (int it = 0; it < 100; ++it) {
    auto [v, dv] = f(x);
    const double xn = x - v / dv;
    if (std::abs(xn - x) <= 1e-15 * (1.0 + std::abs(x))) return xn;
    x = xn;
  }
  return x;
}

// nodes of symmetric rules come in +- pairs; enforce that exactly
void symmetrize(std::vector<double> &x) {
  const int n = static_cast<int>(x.size());
  for (int j = 0; j < n / 2; ++j) {
    const double v = 0.5 * (x[n - 1 - j] - x[j]);
    x[j] = -v;
    x[n - 1 - j] = v;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace

QuadratureRule build_rule(NodeKind kind, int N) {
  if (N < 1) throw ConfigError("quadrature degree must be >= 1");
  QuadratureRule rule;
  rule.kind = kind;
  rule.N = N;
  const int np = N + 1;
  rule.x.resize(np);
  rule.w.resize(np);

  if (kind == NodeKind::Gauss) {
    // roots of P_{N+1}
    for (int j = 0; j < np; ++j) {
      const double guess = -std::cos(M_PI * (2.0 * j + 1.5) / (2.0 * np + 1.0));
      rule.x[j] = newton([&](double x) { return legendre(np, x); }, guess);
    }
    symmetrize(rule.x);
    for (int j = 0; j < np; ++j) {
      const double dp = legendre(np, rule.x[j]).dp;
      rule.w[j] = 2.0 / ((1.0 - rule.x[j] * rule.x[j]) * dp * dp);
    }
  } else {
    // endpoints plus roots of P_N'
    rule.x[0] = -1.0;
    rule.x[N] = 1.0;
    for (int j = 1; j < N; ++j) {
      const double guess = -std::cos(M_PI * j / N);
      rule.x[j] = newton(
          [&](double x) {
            auto [p, dp] = legendre(N, x);
            // derivative of P_N' via the ODE: (1-x^2) P_N'' = 2x P_N' - N(N+1) P_N
            const double ddp = (2 * x * dp - N * (N + 1) * p) / (1 - x * x);
            return LegendreValue{dp, ddp};
          },
          guess);
    }
    symmetrize(rule.x);
    for (int j = 0; j < np; ++j) {
      const double p = legendre(N, rule.x[j]).p;
      rule.w[j] = 2.0 / (N * (N + 1) * p * p);
    }
  }
  return rule;
}

double lagrange_eval(const QuadratureRule &rule, int j, double xi) {
  double v = 1.0;
  for (int k = 0; k <= rule.N; ++k) {
    if (k == j) continue;
    v *= (xi - rule.x[k]) / (rule.x[j] - rule.x[k]);
  }
  return v;
}

Matrix interp_matrix(const std::vector<double> &nodes, const std::vector<double> &points) {
  const int n = static_cast<int>(nodes.size());
  const int m = static_cast<int>(points.size());
  Matrix V(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = 1.0;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        v *= (points[i] - nodes[k]) / (nodes[j] - nodes[k]);
      }
      V(i, j) = v;
    }
  }
  return V;
}

Matrix diff_matrix(const std::vector<double> &nodes) {
  const int n = static_cast<int>(nodes.size());
  // barycentric weights
  std::vector<double> bw(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) bw[j] /= (nodes[j] - nodes[k]);
  Matrix D(n, n);
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      D(j, k) = (bw[k] / bw[j]) / (nodes[j] - nodes[k]);
      diag -= D(j, k);
    }
    D(j, j) = diag;
  }
  return D;
}

OperatorSet build_operator_set(const QuadratureRule &rule) {
  OperatorSet ops;
  ops.rule = rule;
  const int np = rule.N + 1;
  ops.D = diff_matrix(rule.x);
  ops.Q = Matrix(np, np);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < np; ++k) ops.Q(j, k) = rule.w[j] * ops.D(j, k);
  ops.Vf = interp_matrix(rule.x, {-1.0, 1.0});
  ops.Bhat = Matrix(np, np);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < np; ++k)
      ops.Bhat(j, k) = ops.Vf(1, j) * ops.Vf(1, k) - ops.Vf(0, j) * ops.Vf(0, k);
  ops.Shat = Matrix(np, np);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < np; ++k) ops.Shat(j, k) = 2.0 * ops.Q(j, k) - ops.Bhat(j, k);
  return ops;
}

HybridizedOperators build_hybridized(const OperatorSet &ops) {
  const int np = ops.N() + 1;
  const int nh = np + 2;
  HybridizedOperators h;
  h.Vh = Matrix(nh, np);
  for (int j = 0; j < np; ++j) h.Vh(j, j) = 1.0;
  for (int j = 0; j < np; ++j) {
    h.Vh(np, j) = ops.Vf(0, j);
    h.Vh(np + 1, j) = ops.Vf(1, j);
  }
  // B0 = diag(-1, +1) on the two face nodes
  const double b0[2] = {-1.0, 1.0};
  h.Qh = Matrix(nh, nh);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < np; ++k) h.Qh(j, k) = 0.5 * ops.Shat(j, k);
  for (int j = 0; j < np; ++j)
    for (int f = 0; f < 2; ++f) {
      h.Qh(j, np + f) = 0.5 * ops.Vf(f, j) * b0[f];
      h.Qh(np + f, j) = -0.5 * b0[f] * ops.Vf(f, j);
    }
  for (int f = 0; f < 2; ++f) h.Qh(np + f, np + f) = 0.5 * b0[f];
  Matrix qt = h.Qh.transposed();
  h.Sh = Matrix(nh, nh);
  for (int j = 0; j < nh; ++j)
    for (int k = 0; k < nh; ++k) h.Sh(j, k) = h.Qh(j, k) - qt(j, k);
  return h;
}

const OperatorSet &get_operators(NodeKind kind, int N) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::unique_ptr<OperatorSet>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(static_cast<int>(kind), N);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto ops = std::make_unique<OperatorSet>(build_operator_set(build_rule(kind, N)));
    it = cache.emplace(key, std::move(ops)).first;
  }
  return *it->second;
}

}  // namespace mhddg
